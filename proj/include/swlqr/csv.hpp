#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace swlqr::csv {

// First line of every CSV this project writes; readers refuse anything else.
inline constexpr std::string_view kVersionLine = "# switched-lqr-lab v1";

// Shortest round-trip text; "inf", "-inf" and "nan" for the special values.
std::string fmt(double v);
std::string fmt(long long v);
inline std::string fmt(int v) { return fmt(static_cast<long long>(v)); }

// Throws ValidationError(InvalidArgument) on trailing junk or an empty cell.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

void write_header(std::ostream& os, const std::vector<std::string>& columns);
void write_row(std::ostream& os, const std::vector<std::string>& cells);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    // Throws ValidationError(InvalidArgument) for an absent column.
    std::size_t index(std::string_view column) const;
};

// Requires the version line; later comment lines and blank lines are skipped.
Table read(std::istream& is);

}  // namespace swlqr::csv
