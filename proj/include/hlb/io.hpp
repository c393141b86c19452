#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlb/calibration.hpp"

namespace hlb {

/// ACT/365.25 year fraction between two calendar dates.
inline double year_fraction(std::chrono::year_month_day from,
                            std::chrono::year_month_day to) {
    using namespace std::chrono;
    const auto d = sys_days(to) - sys_days(from);
    return static_cast<double>(d.count()) / 365.25;
}

/// Parses "YYYY-MM-DD" or "M/D/YYYY".
inline std::chrono::year_month_day parse_date(const std::string& s) {
    using namespace std::chrono;
    int a = 0, b = 0, c = 0;
    char sep1 = 0, sep2 = 0;
    std::istringstream is(s);
    if (!(is >> a >> sep1 >> b >> sep2 >> c) || sep1 != sep2)
        throw std::invalid_argument("unrecognized date '" + s + "'");
    year_month_day ymd = (sep1 == '-')
                             ? year{a} / month{static_cast<unsigned>(b)} /
                                   day{static_cast<unsigned>(c)}
                             : year{c} / month{static_cast<unsigned>(a)} /
                                   day{static_cast<unsigned>(b)};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date '" + s + "'");
    return ymd;
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
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    }
    return out;
}

inline double parse_number(const std::string& s, const std::string& file, int line,
                           const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc{} || r.ptr != e)
        throw std::invalid_argument(file + ":" + std::to_string(line) +
                                    ": non-numeric " + what + " '" + s + "'");
    return v;
}

}  // namespace detail

/// Reads a yield-curve CSV. Schemas (header row required):
///   maturity_years,yield_pct
///   maturity_date,yield_pct   (requires valuation_date)
/// Yields are percent in the file, decimals in memory.
inline EmpiricalCurve read_curve_csv(
    std::istream& in, const std::string& name,
    std::optional<std::chrono::year_month_day> valuation_date = std::nullopt) {
    EmpiricalCurve curve;
    curve.label = name;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line))
        throw std::invalid_argument(name + ":1: empty input, header row expected");
    ++lineno;
    const auto header = detail::split_csv_line(line);
    int mat_col = -1, yield_col = -1;
    bool by_date = false;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "maturity_years") mat_col = static_cast<int>(i);
        if (header[i] == "maturity_date") {
            mat_col = static_cast<int>(i);
            by_date = true;
        }
        if (header[i] == "yield_pct") yield_col = static_cast<int>(i);
    }
    if (mat_col < 0 || yield_col < 0)
        throw std::invalid_argument(
            name + ":1: header must name maturity_years (or maturity_date) and yield_pct");
    if (by_date && !valuation_date)
        throw std::invalid_argument(name + ": maturity_date schema requires a valuation date");

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() <= static_cast<std::size_t>(std::max(mat_col, yield_col)))
            throw std::invalid_argument(name + ":" + std::to_string(lineno) +
                                        ": missing columns");
        double maturity;
        if (by_date) {
            std::chrono::year_month_day d;
            try {
                d = parse_date(f[static_cast<std::size_t>(mat_col)]);
            } catch (const std::exception& ex) {
                throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": " +
                                            ex.what());
            }
            maturity = year_fraction(*valuation_date, d);
        } else {
            maturity = detail::parse_number(f[static_cast<std::size_t>(mat_col)], name,
                                            lineno, "maturity");
        }
        const double ypct = detail::parse_number(f[static_cast<std::size_t>(yield_col)],
                                                 name, lineno, "yield");
        curve.points.push_back({maturity, ypct / 100.0});
    }
    curve.validate();
    return curve;
}

inline EmpiricalCurve read_curve_csv_file(
    const std::string& path,
    std::optional<std::chrono::year_month_day> valuation_date = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return read_curve_csv(in, path, valuation_date);
}

/// FNV-1a 64-bit over raw file bytes; used to pin the shipped fixtures.
inline std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::uint64_t h = 1469598103934665603ull;
    char ch;
    while (in.get(ch)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace hlb
