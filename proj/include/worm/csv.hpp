#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "worm/errors.hpp"

namespace worm::csv {

/// %.17g formatting: deterministic, round-trip exact.
std::string fmt(double v);
std::string fmt(int v);
std::string fmt(std::size_t v);
std::string fmt(const std::string& v);

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& columns);

    template <class... Ts>
    void row(const Ts&... vals) {
        std::vector<std::string> cells{fmt(vals)...};
        write_row(cells);
    }
    void write_row(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace worm::csv
