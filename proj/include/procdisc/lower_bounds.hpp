#pragma once

#include <vector>

#include "procdisc/tester.hpp"

namespace procdisc {

struct StateEnsemble {
    std::vector<Matrix> states;  // density operators on a common space
    std::vector<double> priors;

    StateEnsemble(std::vector<Matrix> s, std::vector<double> p);
    int size() const { return static_cast<int>(states.size()); }
};

struct SingleShotResult {
    double value = 0.0;
    std::vector<LabeledOperator> phi;  // Phi_m on [W, V]
    Matrix phi_state;                  // the input marginal, Tr_W(sum Phi) / N_W
};

/// Single-shot discrimination SDP for weighted CP maps c_m (Chois on a
/// common [outputs, inputs] split):
///   maximize sum_m Tr(C_{c_m} Phi_m)
///   s.t.     Phi_m >= 0, sum_m Phi_m = I_W (x) phi, phi a density operator.
SingleShotResult single_shot_channels(const std::vector<ChoiOperator>& weighted_maps,
                                      const sdp::SolverSettings& settings = {});

/// Minimum-error state discrimination (POVM SDP).
struct MinErrorResult {
    double value = 0.0;
    std::vector<Matrix> povm;
};
MinErrorResult min_error_states(const StateEnsemble& e, const sdp::SolverSettings& settings = {});

/// Pretty good measurement success probability
/// sum_m p_m^2 Tr(rho_m S^{-1/2} rho_m S^{-1/2}), S = sum p_m rho_m,
/// with the inverse square root taken on S's support.
double pgm_success(const StateEnsemble& e);

/// Low-rank variant: rho_m = F_m F_m^dagger (columns need not be orthogonal).
double pgm_success_factors(const std::vector<Matrix>& factors, const std::vector<double>& priors);

struct BayesStage {
    // phi[k_prev][k]: stage optimizer given previous outcome k_prev (stage 1
    // has a single k_prev slot).
    std::vector<std::vector<LabeledOperator>> phi;
    std::vector<std::vector<LabeledOperator>> rho_tilde;  // [m][k] on W'_t
    std::vector<std::vector<double>> q;                   // joint probabilities [m][k]
    double stage_success = 0.0;                           // P^(t)
};

struct BayesTrace {
    std::vector<BayesStage> stages;
    double value = 0.0;  // P^(T)
};

/// Adaptive Bayesian-updating strategy; returns the lower bound P^(T) and
/// the full per-stage trace.
BayesTrace bayes_lower_bound(const Ensemble& e, const sdp::SolverSettings& settings = {});

/// Exact ultimate success probability (comb-constrained SDP with the priors
/// as weights). Refuses when the composed comb order exceeds order_cap.
double ultimate_success(const Ensemble& e, const sdp::SolverSettings& settings = {},
                        int order_cap = 256);

/// Min-error discrimination of the normalized Choi states (the parallel
/// strategy using a maximally entangled input).
double choi_state_lower_bound(const Ensemble& e, const sdp::SolverSettings& settings = {},
                              int order_cap = 256);

/// Optimal nonadaptive (parallel) discrimination of ch1^(x)T vs ch2^(x)T at
/// equal priors.
double nonadaptive_binary(const KrausChannel& ch1, const KrausChannel& ch2, int T,
                          const sdp::SolverSettings& settings = {}, int order_cap = 256);

}  // namespace procdisc
