#include "swlqr/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "swlqr/errors.hpp"

namespace swlqr::csv {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt(long long v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(ErrorCode::InvalidArgument, "not a number: '" + std::string(s) + "'");
    return v;
}

long long parse_int(std::string_view s) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(ErrorCode::InvalidArgument, "not an integer: '" + std::string(s) + "'");
    return v;
}

void write_header(std::ostream& os, const std::vector<std::string>& columns) {
    os << kVersionLine << '\n';
    write_row(os, columns);
}

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

std::size_t Table::index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column) return i;
    throw ValidationError(ErrorCode::InvalidArgument, "CSV lacks column '" + std::string(column) + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Table read(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError(ErrorCode::InvalidArgument, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kVersionLine)
        throw ValidationError(ErrorCode::InvalidArgument, "CSV schema mismatch: expected '" + std::string(kVersionLine) + "'");
    Table t;
    bool have_columns = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!have_columns) {
            t.columns = split(line);
            have_columns = true;
            continue;
        }
        auto cells = split(line);
        if (cells.size() != t.columns.size())
            throw ValidationError(ErrorCode::InvalidArgument, "CSV row width differs from header");
        t.rows.push_back(std::move(cells));
    }
    if (!have_columns) throw ValidationError(ErrorCode::InvalidArgument, "CSV has no header row");
    return t;
}

}  // namespace swlqr::csv
