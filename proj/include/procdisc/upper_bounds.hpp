#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "procdisc/tester.hpp"

namespace procdisc {

/// Segment breakpoints 0 = h_0 < h_1 < ... < h_L = T and per-segment prior
/// weights whose product over segments reproduces the priors.
struct PartitionSpec {
    std::vector<int> breakpoints;                     // h_1 .. h_L, ending at T
    std::vector<std::vector<double>> prior_allocation;  // [segment][process]

    /// Default allocation: unit weights for l < L, priors on the last segment.
    static PartitionSpec with_default_allocation(std::vector<int> breakpoints,
                                                 const std::vector<double>& priors);
    void validate(int num_steps, const std::vector<double>& priors) const;
};

struct DominatingResult {
    double s_star = 0.0;
    ChoiOperator comb;  // the optimal s * C_X on the canonical signature
    double domination_residual = 0.0;  // worst violation of comb >= w_m C_m
    double hierarchy_residual = 0.0;   // comb/s as a comb
    sdp::SdpSolution raw;
};

/// Minimal s such that some comb s*C_X dominates every weighted segment Choi.
DominatingResult dominating_comb(const std::vector<Matrix>& segment_chois,
                                 const std::vector<StepDims>& dims,
                                 const std::vector<double>& weights,
                                 const sdp::SolverSettings& settings = {});

/// Same, on steps [t0, t1] (0-based, inclusive) of an ensemble's processes.
DominatingResult dominating_comb(const Ensemble& e, int t0, int t1,
                                 const std::vector<double>& weights,
                                 const sdp::SolverSettings& settings = {});

/// Product of per-segment dominating scales, prod_l s_l.
double upper_bound_partition(const Ensemble& e, const PartitionSpec& spec,
                             const sdp::SolverSettings& settings = {});

/// (1/M) prod_t s_t with single-step segments and unit weights; identical
/// steps are solved once and reused.
double upper_bound_1(const Ensemble& e, const sdp::SolverSettings& settings = {});

/// Pairwise segments (trailing single step for odd T).
double upper_bound_2(const Ensemble& e, const sdp::SolverSettings& settings = {});

/// Per-step tensor factorization: factors[t][j][m] is the slot-j factor
/// channel of process m at step t. The declared factorization is validated
/// against the step channels to 1e-10.
using StepFactorization = std::vector<std::vector<KrausChannel>>;  // [slot][process]
double tensor_factor_bound(const Ensemble& e, const std::vector<StepFactorization>& factors,
                           const sdp::SolverSettings& settings = {});

/// Closed form for the dominating scale of a binary amplitude-damping pair.
double ad_analytic_s_star(double q_B, double q_T);

/// min(1, s_star^k * base) with base the known ultimate value at T - k uses
/// (default: 1/M at zero uses).
double chain_bound(double s_star, int T, int M,
                   std::optional<std::pair<int, double>> known = std::nullopt);

}  // namespace procdisc
