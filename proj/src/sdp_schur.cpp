#include "procdisc/sdp/schur.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace procdisc::sdp {

ExpandedConstraint expand_entries(const std::vector<std::pair<int, std::vector<Entry>>>& coeffs) {
    ExpandedConstraint out;
    double norm2 = 0.0;
    for (const auto& [b, list] : coeffs) {
        if (list.empty()) continue;
        ExpandedBlock eb;
        eb.block = b;
        for (const auto& e : list) {
            eb.row.push_back(e.row);
            eb.col.push_back(e.col);
            eb.w.push_back(e.value);
            norm2 += std::norm(e.value);
            if (e.row != e.col) {
                eb.row.push_back(e.col);
                eb.col.push_back(e.row);
                eb.w.push_back(std::conj(e.value));
                norm2 += std::norm(e.value);
            }
        }
        out.blocks.push_back(std::move(eb));
    }
    std::sort(out.blocks.begin(), out.blocks.end(),
              [](const ExpandedBlock& a, const ExpandedBlock& b) { return a.block < b.block; });
    out.frob_norm = std::sqrt(norm2);
    return out;
}

std::vector<ExpandedConstraint> expand_constraints(const HermitianSdp& p) {
    std::vector<ExpandedConstraint> out;
    out.reserve(p.num_constraints());
    for (int i = 0; i < p.num_constraints(); ++i) out.push_back(expand_entries(p.constraint_coeffs(i)));
    return out;
}

double dot_dense(const ExpandedConstraint& a, const std::vector<Matrix>& q) {
    double acc = 0.0;
    for (const auto& eb : a.blocks) {
        const Matrix& m = q[eb.block];
        Complex c = 0.0;
        for (int k = 0; k < eb.nnz(); ++k) c += eb.w[k] * m(eb.col[k], eb.row[k]);
        acc += c.real();
    }
    return acc;
}

double dot_blocks(const ExpandedConstraint& a, const std::vector<Matrix>& x) {
    return dot_dense(a, x);
}

void add_scaled(const ExpandedConstraint& a, double y, std::vector<Matrix>& out) {
    for (const auto& eb : a.blocks) {
        Matrix& m = out[eb.block];
        for (int k = 0; k < eb.nnz(); ++k) m(eb.row[k], eb.col[k]) += y * eb.w[k];
    }
}

namespace {

// Dense W = Zinv * A * X for one (constraint, block), built from rank-one
// contributions of A's entries.
Matrix dense_w(const ExpandedBlock& eb, const Matrix& zinv, const Matrix& x) {
    const long n = zinv.rows();
    Matrix a = Matrix::Zero(n, n);
    for (int k = 0; k < eb.nnz(); ++k) a(eb.row[k], eb.col[k]) += eb.w[k];
    return zinv * a * x;
}

double pair_contribution(const ExpandedBlock& ai, const ExpandedBlock& aj, const Matrix& zinv,
                         const Matrix& x) {
    Complex acc = 0.0;
    for (int k = 0; k < ai.nnz(); ++k) {
        const int a = ai.row[k], b = ai.col[k];
        const Complex wi = ai.w[k];
        Complex inner = 0.0;
        for (int l = 0; l < aj.nnz(); ++l)
            inner += aj.w[l] * zinv(b, aj.row[l]) * x(aj.col[l], a);
        acc += wi * inner;
    }
    return acc.real();
}

double trace_with_dense(const ExpandedBlock& ai, const Matrix& w) {
    Complex acc = 0.0;
    for (int k = 0; k < ai.nnz(); ++k) acc += ai.w[k] * w(ai.col[k], ai.row[k]);
    return acc.real();
}

}  // namespace

void assemble_schur(const std::vector<ExpandedConstraint>& cons, const std::vector<Matrix>& zinv,
                    const std::vector<Matrix>& x, Eigen::MatrixXd& out, SchurMode mode) {
    const int m = static_cast<int>(cons.size());
    out.setZero(m, m);

    // Constraints with dense coefficients on a block get a precomputed
    // Zinv * A * X so pair cost stays linear in the sparse side.
    std::map<std::pair<int, int>, Matrix> heavy;  // (constraint, block) -> W
    for (int j = 0; j < m; ++j)
        for (const auto& eb : cons[j].blocks)
            if (eb.nnz() > zinv[eb.block].rows())
                heavy.emplace(std::make_pair(j, eb.block), dense_w(eb, zinv[eb.block], x[eb.block]));

    const bool par = (mode == SchurMode::Parallel);
#pragma omp parallel for schedule(dynamic, 16) if (par)
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            double acc = 0.0;
            auto itb = cons[j].blocks.begin();
            for (const auto& ai : cons[i].blocks) {
                while (itb != cons[j].blocks.end() && itb->block < ai.block) ++itb;
                if (itb == cons[j].blocks.end()) break;
                if (itb->block != ai.block) continue;
                const auto& aj = *itb;
                const int b = ai.block;
                auto hj = heavy.find({j, b});
                if (hj != heavy.end()) {
                    acc += trace_with_dense(ai, hj->second);
                } else if (auto hi = heavy.find({i, b}); hi != heavy.end()) {
                    acc += trace_with_dense(aj, hi->second);
                } else {
                    acc += pair_contribution(ai, aj, zinv[b], x[b]);
                }
            }
            out(i, j) = acc;
            out(j, i) = acc;
        }
    }
}

}  // namespace procdisc::sdp
