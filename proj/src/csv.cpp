#include "mcd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <vector>

#include "mcd/errors.hpp"

namespace mcd {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

Matrix load_csv(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_header && line_no == 1) continue;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            const std::string_view field = trim(rest.substr(0, comma));
            double value = 0.0;
            const auto [ptr, ec] =
                std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc{} || ptr != field.data() + field.size()) {
                throw ParseError("malformed numeric field '" + std::string(field) +
                                     "' at line " + std::to_string(line_no),
                                 line_no);
            }
            if (!std::isfinite(value)) {
                throw ParseError("non-finite value at line " + std::to_string(line_no), line_no);
            }
            row.push_back(value);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError("row width " + std::to_string(row.size()) + " differs from " +
                                 std::to_string(width) + " at line " + std::to_string(line_no),
                             line_no);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty table: " + path, line_no);

    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return out;
}

}  // namespace mcd
