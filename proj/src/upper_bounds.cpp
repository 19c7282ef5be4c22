#include "procdisc/upper_bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace procdisc {

namespace {

bool same_dims(const std::vector<StepDims>& a, const std::vector<StepDims>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].n_v != b[i].n_v || a[i].n_w != b[i].n_w) return false;
    return true;
}

bool same_chois(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].rows() != b[i].rows()) return false;
        if ((a[i] - b[i]).cwiseAbs().maxCoeff() > 1e-13) return false;
    }
    return true;
}

struct SegmentCacheEntry {
    std::vector<StepDims> dims;
    std::vector<Matrix> chois;
    double s_unit;
};

// Scale weights out when uniform so identical segments are solved once.
double segment_scale(const std::vector<Matrix>& chois, const std::vector<StepDims>& dims,
                     const std::vector<double>& weights, const sdp::SolverSettings& settings,
                     std::vector<SegmentCacheEntry>& cache) {
    bool uniform = true;
    for (double w : weights)
        if (std::abs(w - weights[0]) > 1e-14) uniform = false;
    if (uniform) {
        for (const auto& entry : cache)
            if (same_dims(entry.dims, dims) && same_chois(entry.chois, chois))
                return weights[0] * entry.s_unit;
        double s_unit = solve_tester_sdp(chois, dims, settings).value;
        cache.push_back({dims, chois, s_unit});
        return weights[0] * s_unit;
    }
    std::vector<Matrix> weighted;
    for (size_t m = 0; m < chois.size(); ++m) weighted.push_back(weights[m] * chois[m]);
    return solve_tester_sdp(weighted, dims, settings).value;
}

void segment_data(const Ensemble& e, int t0, int t1, std::vector<Matrix>& chois,
                  std::vector<StepDims>& dims) {
    chois.clear();
    for (int m = 0; m < e.size(); ++m) {
        std::vector<StepDims> d;
        ChoiOperator c = e.processes[m].segment_choi(t0, t1, &d);
        if (m == 0)
            dims = d;
        else if (!same_dims(dims, d))
            throw std::invalid_argument("segment dimensions differ across processes");
        chois.push_back(c.op.matrix());
    }
}

}  // namespace

PartitionSpec PartitionSpec::with_default_allocation(std::vector<int> breakpoints,
                                                     const std::vector<double>& priors) {
    PartitionSpec spec;
    spec.breakpoints = std::move(breakpoints);
    const size_t num_segments = spec.breakpoints.size();
    spec.prior_allocation.assign(num_segments, std::vector<double>(priors.size(), 1.0));
    if (num_segments > 0) spec.prior_allocation.back() = priors;
    return spec;
}

void PartitionSpec::validate(int num_steps, const std::vector<double>& priors) const {
    if (breakpoints.empty() || breakpoints.back() != num_steps)
        throw std::invalid_argument("breakpoints must end at the number of steps");
    int prev = 0;
    for (int h : breakpoints) {
        if (h <= prev) throw std::invalid_argument("breakpoints must be strictly increasing");
        prev = h;
    }
    if (prior_allocation.size() != breakpoints.size())
        throw std::invalid_argument("one weight vector per segment required");
    for (size_t m = 0; m < priors.size(); ++m) {
        double prod = 1.0;
        for (const auto& seg : prior_allocation) {
            if (seg.size() != priors.size())
                throw std::invalid_argument("weight vector size must match the ensemble");
            if (seg[m] < 0.0) throw std::invalid_argument("weights must be nonnegative");
            prod *= seg[m];
        }
        if (std::abs(prod - priors[m]) > 1e-12)
            throw std::invalid_argument("allocation product must reproduce the priors");
    }
}

DominatingResult dominating_comb(const std::vector<Matrix>& segment_chois,
                                 const std::vector<StepDims>& dims,
                                 const std::vector<double>& weights,
                                 const sdp::SolverSettings& settings) {
    if (segment_chois.size() != weights.size())
        throw std::invalid_argument("one weight per process required");
    for (double w : weights)
        if (w < 0.0) throw std::invalid_argument("weights must be nonnegative");

    std::vector<Matrix> weighted;
    for (size_t m = 0; m < segment_chois.size(); ++m)
        weighted.push_back(weights[m] * segment_chois[m]);
    TesterSolution ts = solve_tester_sdp(weighted, dims, settings);

    DominatingResult res;
    res.s_star = ts.value;
    res.raw = ts.raw;

    std::vector<std::string> out_labels, in_labels;
    for (int t = static_cast<int>(dims.size()); t >= 1; --t) {
        out_labels.push_back(w_label(t));
        in_labels.push_back(v_label(t));
    }
    res.comb = ChoiOperator{ts.comb, out_labels, in_labels};
    for (size_t m = 0; m < weighted.size(); ++m) {
        LabeledOperator diff(ts.comb.signature(), ts.comb.matrix() - weighted[m]);
        res.domination_residual =
            std::max(res.domination_residual, std::max(0.0, -min_eigenvalue(diff)));
    }
    if (res.s_star > 1e-12) {
        LabeledOperator scaled(ts.comb.signature(), ts.comb.matrix() / res.s_star);
        res.hierarchy_residual = is_comb(scaled, dims, 1e-6).worst_residual;
    }
    return res;
}

DominatingResult dominating_comb(const Ensemble& e, int t0, int t1,
                                 const std::vector<double>& weights,
                                 const sdp::SolverSettings& settings) {
    std::vector<Matrix> chois;
    std::vector<StepDims> dims;
    segment_data(e, t0, t1, chois, dims);
    return dominating_comb(chois, dims, weights, settings);
}

double upper_bound_partition(const Ensemble& e, const PartitionSpec& spec,
                             const sdp::SolverSettings& settings) {
    spec.validate(e.num_steps(), e.priors);
    std::vector<SegmentCacheEntry> cache;
    double prod = 1.0;
    int prev = 0;
    for (size_t l = 0; l < spec.breakpoints.size(); ++l) {
        std::vector<Matrix> chois;
        std::vector<StepDims> dims;
        segment_data(e, prev, spec.breakpoints[l] - 1, chois, dims);
        prod *= segment_scale(chois, dims, spec.prior_allocation[l], settings, cache);
        prev = spec.breakpoints[l];
    }
    return prod;
}

double upper_bound_1(const Ensemble& e, const sdp::SolverSettings& settings) {
    std::vector<int> breakpoints;
    for (int t = 1; t <= e.num_steps(); ++t) breakpoints.push_back(t);
    return upper_bound_partition(e, PartitionSpec::with_default_allocation(breakpoints, e.priors),
                                 settings);
}

double upper_bound_2(const Ensemble& e, const sdp::SolverSettings& settings) {
    std::vector<int> breakpoints;
    for (int h = 2; h <= e.num_steps(); h += 2) breakpoints.push_back(h);
    if (e.num_steps() % 2 == 1) breakpoints.push_back(e.num_steps());
    return upper_bound_partition(e, PartitionSpec::with_default_allocation(breakpoints, e.priors),
                                 settings);
}

double tensor_factor_bound(const Ensemble& e, const std::vector<StepFactorization>& factors,
                           const sdp::SolverSettings& settings) {
    const int num_steps = e.num_steps();
    if (static_cast<int>(factors.size()) != num_steps)
        throw std::invalid_argument("one factorization per step required");

    for (int t = 0; t < num_steps; ++t) {
        const auto& slots = factors[t];
        if (slots.empty()) throw std::invalid_argument("each step needs at least one factor slot");
        for (int m = 0; m < e.size(); ++m) {
            const KrausChannel& step = e.processes[m].step(t);
            if (step.input_signature.num_factors() != 1 || step.output_signature.num_factors() != 1)
                throw std::invalid_argument("tensor factorization requires memoryless steps");
            // Assemble the declared product Choi on [w_1..w_J, v_1..v_J].
            LabeledOperator prod;
            std::vector<std::string> w_order, v_order;
            for (size_t j = 0; j < slots.size(); ++j) {
                if (slots[j].size() != static_cast<size_t>(e.size()))
                    throw std::invalid_argument("one factor channel per process required");
                KrausChannel f = slots[j][m];
                std::string wl = "fw" + std::to_string(j), vl = "fv" + std::to_string(j);
                f.output_signature = SystemSignature::single(wl, f.out_dim());
                f.input_signature = SystemSignature::single(vl, f.in_dim());
                LabeledOperator c = choi_from_kraus(f).op;
                prod = (j == 0) ? c : kron(prod, c);
                w_order.push_back(wl);
                v_order.push_back(vl);
            }
            std::vector<std::string> order = w_order;
            order.insert(order.end(), v_order.begin(), v_order.end());
            Matrix declared = permute_systems(prod, order).matrix();
            Matrix actual = choi_from_kraus(step).op.matrix();
            if (declared.rows() != actual.rows() ||
                (declared - actual).cwiseAbs().maxCoeff() > 1e-10)
                throw std::invalid_argument("declared factorization does not match step channel " +
                                            std::to_string(t + 1) + " of process " +
                                            std::to_string(m + 1));
        }
    }

    std::vector<SegmentCacheEntry> cache;
    double prod = 1.0;
    for (int t = 0; t < num_steps; ++t) {
        for (size_t j = 0; j < factors[t].size(); ++j) {
            std::vector<Matrix> chois;
            std::vector<StepDims> dims;
            for (int m = 0; m < e.size(); ++m) {
                const KrausChannel& f = factors[t][j][m];
                chois.push_back(choi_from_kraus(f).op.matrix());
                if (m == 0) dims = {StepDims{f.in_dim(), f.out_dim(), 1}};
            }
            const bool last = (t == num_steps - 1) && (j == factors[t].size() - 1);
            const std::vector<double> weights =
                last ? e.priors : std::vector<double>(e.size(), 1.0);
            prod *= segment_scale(chois, dims, weights, settings, cache);
        }
    }
    return prod;
}

double ad_analytic_s_star(double q_B, double q_T) {
    if (q_B < 0.0 || q_B > 1.0 || q_T < 0.0 || q_T > 1.0)
        throw std::invalid_argument("damping parameters must lie in [0,1]");
    if (q_B < q_T) std::swap(q_B, q_T);
    if (q_B == q_T) return 1.0;
    const double q_th = 1.0 - 0.25 * (1.0 + q_B - q_T) * (1.0 + q_B - q_T);
    if (q_T < q_th) return 1.0 + q_B - q_T;
    const double rb = std::sqrt(1.0 - q_B), rt = std::sqrt(1.0 - q_T);
    return 1.0 - rb + (q_B - q_T) * (1.0 - rb) / (2.0 * rt + 2.0 * rb - q_B + q_T);
}

double chain_bound(double s_star, int T, int M, std::optional<std::pair<int, double>> known) {
    if (s_star < 1.0 - 1e-9)
        throw std::invalid_argument("s_star below 1 violates the trace bound");
    if (T < 1 || M < 2) throw std::invalid_argument("need T >= 1 and M >= 2");
    int base_steps = 0;
    double base = 1.0 / M;
    if (known) {
        base_steps = known->first;
        base = known->second;
        if (base_steps < 0 || base_steps > T)
            throw std::invalid_argument("known value must be at 0..T uses");
    }
    return std::min(1.0, std::pow(s_star, T - base_steps) * base);
}

}  // namespace procdisc
