#pragma once

#include <vector>

#include "procdisc/sdp/problem.hpp"

namespace procdisc::sdp {

struct SolverSettings {
    double tol = 1e-8;          // relative feasibility and gap tolerance
    int max_iter = 200;
    double step_fraction = 0.98;  // fraction of the step to the PSD boundary
    bool presolve = true;         // drop numerically dependent constraint rows
    double presolve_pivot = 1e-7;
    bool parallel_schur = true;
    int order_cap = 10000;  // total realified order limit
};

enum class SolveStatus { Optimal, MaxIterations, NumericalFailure };

struct IterateRecord {
    double primal_objective = 0.0;  // internal minimize sense
    double dual_objective = 0.0;
    double mu = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

/// Solution of a HermitianSdp. Dual data (y, slack, dual objective) is
/// reported for the internal minimize form: for a Maximize problem the
/// internal objective is the negated one, so sum_i y_i A_i + Z = -C.
struct SdpSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    double objective = 0.0;  // in the caller's sense
    std::vector<Matrix> primal;
    std::vector<double> dual;
    std::vector<Matrix> dual_slack;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double rel_gap = 0.0;
    int iterations = 0;
    std::vector<int> dropped_rows;
    std::vector<IterateRecord> history;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Infeasible-start primal-dual path following with Mehrotra
/// predictor-corrector and the HKM direction; dense Schur factorization.
/// Deterministic for identical inputs and settings.
SdpSolution solve(const HermitianSdp& p, const SolverSettings& settings = {});

/// Process-wide tally over all solve() calls, for suite-level soundness
/// checks: the worst relative gap among optimal terminations and the number
/// of non-optimal ones. Thread safe.
double worst_observed_rel_gap();
long nonoptimal_solve_count();
void reset_solve_tracker();

}  // namespace procdisc::sdp
