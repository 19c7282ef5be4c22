#pragma once

#include <vector>

#include "procdisc/comb.hpp"
#include "procdisc/sdp/solver.hpp"

namespace procdisc {

/// Solution of the tester-form discrimination SDP
///   maximize sum_m Tr(G_m Theta_m)
///   s.t.     Theta_m >= 0,  sum_m Theta_m a valid tester for the given
///            step dimensions,
/// where G_m are weighted Choi matrices on the canonical signature
/// W_T, V_T, ..., W_1, V_1. By SDP duality the optimum equals the minimal s
/// of the dominating-comb problem with the same weights, and the dual
/// multipliers reconstruct the optimal comb s * C_X.
struct TesterSolution {
    double value = 0.0;
    std::vector<LabeledOperator> theta;  // canonical signature, one per process
    LabeledOperator comb;                // dominating comb chi = -A*(y)
    sdp::SdpSolution raw;
};

/// Canonical signature W_T, V_T, ..., W_1, V_1 for the given step dims.
SystemSignature canonical_signature(const std::vector<StepDims>& dims);

/// Adds the tester affine constraints (hierarchy span rows plus the trace
/// normalization) to a problem whose blocks `block_ids` each carry identical
/// coefficients. Returns the index of the normalization row.
int add_tester_constraints(sdp::HermitianSdp& p, const std::vector<int>& block_ids,
                           const std::vector<StepDims>& dims);

/// weighted_chois[m] must be on the canonical signature (matrix only).
TesterSolution solve_tester_sdp(const std::vector<Matrix>& weighted_chois,
                                const std::vector<StepDims>& dims,
                                const sdp::SolverSettings& settings = {});

/// Builds (without solving) the tester-form problem, for SDPA export.
sdp::HermitianSdp build_tester_sdp(const std::vector<Matrix>& weighted_chois,
                                   const std::vector<StepDims>& dims);

}  // namespace procdisc
