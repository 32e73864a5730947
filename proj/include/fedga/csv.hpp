#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedga {

// Tiny CSV layer for the experiment outputs: numeric-only cells, LF line
// endings, fixed headers. Formatting goes through snprintf so files are
// byte-identical across reruns.

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size())
            throw std::invalid_argument("csv row has " + std::to_string(cells.size()) +
                                        " cells, header has " + std::to_string(header_.size()));
        rows_.push_back(std::move(cells));
    }

    std::string str() const {
        std::ostringstream out;
        write_line(out, header_);
        for (const auto& row : rows_) write_line(out, row);
        return out.str();
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << str();
    }

private:
    static void write_line(std::ostringstream& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::runtime_error("csv column not found: " + name);
    }
};

// Parses a CSV written by CsvWriter. Ragged rows are reported with their
// 1-based line number.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (line_no == 1) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size())
                throw std::runtime_error(path + ": malformed line " + std::to_string(line_no) +
                                         " (" + std::to_string(cells.size()) + " cells, expected " +
                                         std::to_string(table.header.size()) + ")");
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty()) throw std::runtime_error(path + ": empty csv");
    return table;
}

}  // namespace fedga
