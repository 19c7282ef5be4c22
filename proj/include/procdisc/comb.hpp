#pragma once

#include <optional>
#include <string>
#include <vector>

#include "procdisc/channel.hpp"

namespace procdisc {

/// Wire dimensions of one process step: the step channel maps
/// W'_{t-1} (x) V_t  ->  W'_t (x) W_t.
struct StepDims {
    int n_v = 1;
    int n_w = 1;
    int n_wp_out = 1;  // memory passed to the next step (1 at the last step)
};

std::string v_label(int t);
std::string w_label(int t);
std::string wp_label(int t);

/// A T-step process: per-step channels with memory wiring, plus the cached
/// composed Choi operator on the canonical signature W_T, V_T, ..., W_1, V_1.
class ProcessComb {
public:
    /// Step t (0-based here, 1-based in labels) has input factors
    /// [Wp{t}, V{t+1}] and output factors [Wp{t+1}, W{t+1}], trivial memory
    /// factors omitted. Kraus matrices are given in that index convention.
    ProcessComb(std::vector<std::vector<Matrix>> step_kraus, std::vector<StepDims> dims,
                double cptp_tol = 1e-8);

    int num_steps() const { return static_cast<int>(steps_.size()); }
    const std::vector<StepDims>& step_dims() const { return dims_; }
    const KrausChannel& step(int t) const { return steps_.at(t); }
    /// Composed Choi on the canonical signature, built on first use (it can
    /// be large; bound computations that never need it should not pay for it).
    const ChoiOperator& choi() const;
    /// Order of the composed Choi, available without composing it.
    long choi_order() const;

    /// Choi of the sub-process formed by steps [t0, t1] (0-based, inclusive),
    /// with boundary memory wires kept as part of the first input / last
    /// output factor groups. Also reports the segment's effective step dims.
    ChoiOperator segment_choi(int t0, int t1, std::vector<StepDims>* seg_dims = nullptr) const;

    bool type_compatible(const ProcessComb& other) const;

private:
    std::vector<KrausChannel> steps_;
    std::vector<StepDims> dims_;
    mutable std::optional<ChoiOperator> choi_;
};

ChoiOperator process_choi(const ProcessComb& p);

struct Ensemble {
    std::vector<ProcessComb> processes;
    std::vector<double> priors;

    Ensemble(std::vector<ProcessComb> procs, std::vector<double> pri);

    int size() const { return static_cast<int>(processes.size()); }
    int num_steps() const { return processes.front().num_steps(); }
    bool equal_priors(double tol = 1e-12) const;
};

struct CombReport {
    bool ok = false;
    double worst_residual = 0.0;
    double positivity_residual = 0.0;
};

/// Checks the recursive comb hierarchy Tr_{W_t} chi_t = I_{V_t} (x) chi_{t-1}
/// on the canonical signature. step_dims holds (n_v, n_w) per step.
CombReport is_comb(const LabeledOperator& x, const std::vector<StepDims>& step_dims, double tol);

/// Checks the dual (tester) hierarchy on the sum of tester elements:
/// cur_t = I_{W_t} (x) Xi_t, cur_{t-1} = Tr_{V_t} Xi_t, cur_0 = 1.
CombReport is_tester_normalized(const LabeledOperator& sum, const std::vector<StepDims>& step_dims,
                                double tol);

/// sum_m p_m Tr(C_{E_m} Theta_m). Throws (with residual) on an invalid tester.
double tester_success_probability(const Ensemble& e, const std::vector<LabeledOperator>& tester,
                                  double tol = 1e-6);

}  // namespace procdisc
