#include <doctest.h>

#include <algorithm>
#include <vector>

#include "fedga/rng.hpp"

using namespace fedga;

TEST_CASE("rng streams are deterministic and seed-sensitive") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    bool differs = false;
    Rng a2(42);
    for (int i = 0; i < 100; ++i) differs |= a2.next() != c.next();
    CHECK(differs);
}

TEST_CASE("uniform stays in range and is not degenerate") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_int covers its inclusive range") {
    Rng rng(11);
    std::vector<int> seen(12, 0);
    for (int i = 0; i < 20000; ++i) {
        const auto v = rng.uniform_int(2, 11);
        REQUIRE(v >= 2);
        REQUIRE(v <= 11);
        ++seen[static_cast<std::size_t>(v)];
    }
    for (int v = 2; v <= 11; ++v) CHECK(seen[static_cast<std::size_t>(v)] > 0);
}

TEST_CASE("substreams with different tags or indices diverge") {
    const auto base = substream(42, "scenario");
    CHECK(base == substream(42, "scenario"));
    CHECK(base != substream(42, "ga.init"));
    CHECK(substream(42, "ga.vary", 1, 2) != substream(42, "ga.vary", 1, 3));
    CHECK(substream(42, "ga.vary", 1, 2) != substream(42, "ga.vary", 2, 2));
    CHECK(substream(42, "ga.vary", 1, 2) != substream(43, "ga.vary", 1, 2));
}

TEST_CASE("shuffle permutes deterministically") {
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> w = v;
    Rng r1(5), r2(5);
    shuffle(v, r1);
    shuffle(w, r2);
    CHECK(v == w);
    std::sort(w.begin(), w.end());
    CHECK(w == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}
