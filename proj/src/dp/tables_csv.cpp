#include <algorithm>
#include <istream>
#include <ostream>

#include "swlqr/csv.hpp"
#include "swlqr/dp.hpp"

namespace swlqr {

void write_dp_tables(std::ostream& os, const DpTables& t) {
    csv::write_header(os, {"k", "j", "s", "c0", "c1", "z0", "z1", "alpha"});
    for (int k = 0; k < t.effective_horizon; ++k)
        for (int j = 0; j <= t.q0; ++j) {
            const DpCell& c = t.at(k, j);
            csv::write_row(os, {csv::fmt(k), csv::fmt(j), csv::fmt(c.s), csv::fmt(c.c0), csv::fmt(c.c1), csv::fmt(c.z0),
                                csv::fmt(c.z1), csv::fmt(c.alpha)});
        }
}

DpTables read_dp_tables(std::istream& is) {
    const csv::Table raw = csv::read(is);
    const std::size_t ck = raw.index("k"), cj = raw.index("j");
    const std::size_t cols[] = {raw.index("s"), raw.index("c0"), raw.index("c1"),
                                raw.index("z0"), raw.index("z1"), raw.index("alpha")};
    DpTables t;
    int kmax = -1, jmax = 0;
    for (const auto& row : raw.rows) {
        kmax = std::max(kmax, static_cast<int>(csv::parse_int(row[ck])));
        jmax = std::max(jmax, static_cast<int>(csv::parse_int(row[cj])));
    }
    t.effective_horizon = kmax + 1;
    t.q0 = jmax;
    t.cells.assign(static_cast<std::size_t>(t.effective_horizon) * (t.q0 + 1), DpCell{});
    for (const auto& row : raw.rows) {
        DpCell& c = t.at(static_cast<int>(csv::parse_int(row[ck])), static_cast<int>(csv::parse_int(row[cj])));
        c.s = csv::parse_double(row[cols[0]]);
        c.c0 = csv::parse_double(row[cols[1]]);
        c.c1 = csv::parse_double(row[cols[2]]);
        c.z0 = csv::parse_double(row[cols[3]]);
        c.z1 = csv::parse_double(row[cols[4]]);
        c.alpha = csv::parse_double(row[cols[5]]);
    }
    return t;
}

}  // namespace swlqr
