#include "worm/csv.hpp"

#include <cstdio>

namespace worm::csv {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(const std::string& v) { return v; }

Writer::Writer(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
    if (!out_) throw validation_error("cannot open output file: " + path);
    write_row(columns);
}

void Writer::write_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw validation_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void Writer::close() { out_.close(); }

}  // namespace worm::csv
