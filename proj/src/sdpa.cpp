#include "procdisc/sdp/sdpa.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace procdisc::sdp {

namespace {

using EntryMap = std::map<std::tuple<int, int, int, int>, double>;  // (mat, blk, i, j) -> value

void accumulate(EntryMap& out, int mat, int blk, int order, const std::vector<Entry>& list,
                double sign) {
    for (const auto& e : list) {
        const double xr = 0.5 * sign * e.value.real();
        const double yi = 0.5 * sign * e.value.imag();
        if (xr != 0.0) {
            out[{mat, blk, e.row, e.col}] += xr;
            out[{mat, blk, order + e.row, order + e.col}] += xr;
        }
        if (yi != 0.0) {
            out[{mat, blk, e.row, order + e.col}] += -yi;
            out[{mat, blk, e.col, order + e.row}] += yi;
        }
    }
}

void format_value(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

}  // namespace

void export_sdpa(const HermitianSdp& p, std::ostream& os) {
    const int m = p.num_constraints();
    const int nb = p.num_blocks();
    const double obj_sign = (p.sense() == Sense::Maximize) ? 1.0 : -1.0;

    std::string out;
    out += std::to_string(m);
    out += "\n";
    out += std::to_string(nb);
    out += "\n";
    for (int b = 0; b < nb; ++b) {
        if (b) out += " ";
        out += std::to_string(2 * p.block(b).order);
    }
    out += "\n";
    for (int i = 0; i < m; ++i) {
        if (i) out += " ";
        format_value(out, p.rhs(i));
    }
    out += "\n";

    EntryMap entries;
    const auto& obj = p.objective_entries();
    for (int b = 0; b < nb; ++b) accumulate(entries, 0, b, p.block(b).order, obj[b], obj_sign);
    for (int i = 0; i < m; ++i)
        for (const auto& [b, list] : p.constraint_coeffs(i))
            accumulate(entries, i + 1, b, p.block(b).order, list, 1.0);

    for (const auto& [key, v] : entries) {
        if (v == 0.0) continue;
        const auto& [mat, blk, r, c] = key;
        out += std::to_string(mat);
        out += " ";
        out += std::to_string(blk + 1);
        out += " ";
        out += std::to_string(r + 1);
        out += " ";
        out += std::to_string(c + 1);
        out += " ";
        format_value(out, v);
        out += "\n";
    }
    os << out;
}

void export_sdpa_file(const HermitianSdp& p, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    export_sdpa(p, f);
    if (!f.good()) throw std::runtime_error("write failed for " + path);
}

}  // namespace procdisc::sdp
