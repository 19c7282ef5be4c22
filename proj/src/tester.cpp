#include "procdisc/tester.hpp"

#include <stdexcept>
#include <string>

namespace procdisc {

namespace {

// Full-matrix entry lists (both triangles) of Hermitian basis elements.
struct FullEntry {
    int row, col;
    Complex v;
};
using Element = std::vector<FullEntry>;

// Traceless Hermitian basis of dimension d: symmetric and antisymmetric
// off-diagonal pairs plus consecutive diagonal differences.
std::vector<Element> traceless_basis(int d) {
    std::vector<Element> out;
    for (int r = 0; r < d; ++r)
        for (int c = r + 1; c < d; ++c) {
            out.push_back({{r, c, 1.0}, {c, r, 1.0}});
            out.push_back({{r, c, Complex(0, 1)}, {c, r, Complex(0, -1)}});
        }
    for (int k = 0; k + 1 < d; ++k) out.push_back({{k, k, 1.0}, {k + 1, k + 1, -1.0}});
    return out;
}

std::vector<Element> hermitian_basis(int d) {
    std::vector<Element> out;
    for (int r = 0; r < d; ++r) out.push_back({{r, r, 1.0}});
    for (int r = 0; r < d; ++r)
        for (int c = r + 1; c < d; ++c) {
            out.push_back({{r, c, 1.0}, {c, r, 1.0}});
            out.push_back({{r, c, Complex(0, 1)}, {c, r, Complex(0, -1)}});
        }
    return out;
}

}  // namespace

SystemSignature canonical_signature(const std::vector<StepDims>& dims) {
    std::vector<Factor> f;
    for (int t = static_cast<int>(dims.size()); t >= 1; --t) {
        f.push_back({w_label(t), dims[t - 1].n_w});
        f.push_back({v_label(t), dims[t - 1].n_v});
    }
    return SystemSignature(std::move(f));
}

int add_tester_constraints(sdp::HermitianSdp& p, const std::vector<int>& block_ids,
                           const std::vector<StepDims>& dims) {
    const int num_steps = static_cast<int>(dims.size());

    // Level t: the partial trace of the tester over all systems of steps
    // s > t must act as identity on W_t. Equivalently, the tester is
    // orthogonal to I_{>t} (x) B (x) H for every traceless B on W_t and
    // every Hermitian basis element H on the remaining (less significant)
    // factors.
    for (int t = num_steps; t >= 1; --t) {
        int d_left = 1, w_norm = 1;
        for (int s = t + 1; s <= num_steps; ++s) {
            d_left *= dims[s - 1].n_w * dims[s - 1].n_v;
            w_norm *= dims[s - 1].n_w;
        }
        const int d = dims[t - 1].n_w;
        int d_rest = dims[t - 1].n_v;
        for (int s = 1; s < t; ++s) d_rest *= dims[s - 1].n_w * dims[s - 1].n_v;
        const double scale = 1.0 / w_norm;

        for (const auto& b : traceless_basis(d)) {
            for (const auto& h : hermitian_basis(d_rest)) {
                int row = p.add_constraint(0.0);
                for (int l = 0; l < d_left; ++l) {
                    const int off = l * d * d_rest;
                    for (const auto& be : b) {
                        for (const auto& he : h) {
                            int r = off + be.row * d_rest + he.row;
                            int c = off + be.col * d_rest + he.col;
                            if (r > c) continue;  // lower triangle implied
                            Complex v = be.v * he.v * scale;
                            for (int blk : block_ids) p.add_coefficient(row, blk, r, c, v);
                        }
                    }
                }
            }
        }
    }

    double total_w = 1.0;
    int order = 1;
    for (const auto& sd : dims) {
        total_w *= sd.n_w;
        order *= sd.n_w * sd.n_v;
    }
    int norm_row = p.add_constraint(total_w);
    for (int blk : block_ids)
        for (int r = 0; r < order; ++r) p.add_coefficient(norm_row, blk, r, r, 1.0);
    return norm_row;
}

sdp::HermitianSdp build_tester_sdp(const std::vector<Matrix>& weighted_chois,
                                   const std::vector<StepDims>& dims) {
    if (weighted_chois.empty()) throw std::invalid_argument("no processes given");
    int order = 1;
    for (const auto& sd : dims) order *= sd.n_w * sd.n_v;

    sdp::HermitianSdp p;
    p.set_sense(sdp::Sense::Maximize);
    std::vector<int> blocks;
    for (size_t m = 0; m < weighted_chois.size(); ++m) {
        if (weighted_chois[m].rows() != order)
            throw std::invalid_argument("Choi order mismatch with step dims");
        blocks.push_back(p.add_block("Theta" + std::to_string(m + 1), order));
        p.add_objective_matrix(blocks.back(), weighted_chois[m]);
    }
    add_tester_constraints(p, blocks, dims);
    return p;
}

TesterSolution solve_tester_sdp(const std::vector<Matrix>& weighted_chois,
                                const std::vector<StepDims>& dims,
                                const sdp::SolverSettings& settings) {
    sdp::HermitianSdp p = build_tester_sdp(weighted_chois, dims);
    TesterSolution sol;
    sol.raw = sdp::solve(p, settings);
    if (!sol.raw.optimal())
        throw std::runtime_error(
            "tester SDP did not reach optimality (status " +
            std::to_string(static_cast<int>(sol.raw.status)) +
            ", primal residual " + std::to_string(sol.raw.primal_residual) +
            ", dual residual " + std::to_string(sol.raw.dual_residual) + ")");
    sol.value = sol.raw.objective;

    SystemSignature sig = canonical_signature(dims);
    for (size_t m = 0; m < weighted_chois.size(); ++m)
        sol.theta.emplace_back(sig, sol.raw.primal[m]);

    // Dual recovery: the hierarchy rows carry identical coefficients on
    // every block, so chi = -sum_i y_i A_i (restricted to one block)
    // dominates every weighted Choi and satisfies the comb hierarchy
    // with scalar bottom element equal to the optimum.
    Matrix chi = Matrix::Zero(sig.total_dim(), sig.total_dim());
    for (int i = 0; i < p.num_constraints(); ++i)
        if (sol.raw.dual[i] != 0.0) chi -= sol.raw.dual[i] * p.constraint_dense(i, 0);
    sol.comb = LabeledOperator(sig, 0.5 * (chi + chi.adjoint()));
    return sol;
}

}  // namespace procdisc
