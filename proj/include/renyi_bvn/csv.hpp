#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace renyi_bvn {

// Shortest round-trip-safe decimal rendering (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(t, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == t.size();
}

}  // namespace detail

struct CsvTable {
    std::vector<std::string> header;  // empty if the file had no header row
    std::vector<std::vector<double>> rows;
};

// Comma-separated numeric table. If the first line contains any cell that does
// not parse as a number it is treated as a header.
inline CsvTable read_csv(std::istream& in, const std::string& what) {
    CsvTable table;
    std::string line;
    bool first = true;
    std::size_t width = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        std::vector<double> row(cells.size());
        bool numeric = true;
        for (std::size_t j = 0; j < cells.size(); ++j)
            if (!detail::parse_double(cells[j], row[j])) {
                numeric = false;
                break;
            }
        if (first) {
            first = false;
            if (!numeric) {
                for (const auto& c : cells) table.header.push_back(detail::trim(c));
                width = cells.size();
                continue;
            }
        }
        if (!numeric)
            throw std::runtime_error(what + ": non-numeric cell on line " +
                                     std::to_string(lineno));
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw std::runtime_error(what + ": inconsistent column count on line " +
                                     std::to_string(lineno));
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in, path);
}

// First two columns become (x, y); a header, if present, is ignored beyond
// detection.
inline std::pair<std::vector<double>, std::vector<double>> read_xy_csv(const std::string& path) {
    const CsvTable t = read_csv_file(path);
    if (t.rows.empty()) throw std::runtime_error(path + ": no data rows");
    if (t.rows.front().size() < 2)
        throw std::runtime_error(path + ": need at least two columns");
    std::vector<double> xs, ys;
    xs.reserve(t.rows.size());
    ys.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        xs.push_back(r[0]);
        ys.push_back(r[1]);
    }
    return {std::move(xs), std::move(ys)};
}

}  // namespace renyi_bvn
