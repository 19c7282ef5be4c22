#include "procdisc/comb.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace procdisc {

std::string v_label(int t) { return "V" + std::to_string(t); }
std::string w_label(int t) { return "W" + std::to_string(t); }
std::string wp_label(int t) { return "Wp" + std::to_string(t); }

namespace {

SystemSignature step_in_sig(int t, int n_wp_in, int n_v) {
    std::vector<Factor> f;
    if (n_wp_in > 1) f.push_back({wp_label(t - 1), n_wp_in});
    f.push_back({v_label(t), n_v});
    return SystemSignature(std::move(f));
}

SystemSignature step_out_sig(int t, int n_wp_out, int n_w) {
    std::vector<Factor> f;
    if (n_wp_out > 1) f.push_back({wp_label(t), n_wp_out});
    f.push_back({w_label(t), n_w});
    return SystemSignature(std::move(f));
}

// Relabel a matrix onto a synthetic [W_T, V_T, ..., W_1, V_1] signature so the
// hierarchy checks do not depend on caller label names.
LabeledOperator with_canonical_labels(const Matrix& m, const std::vector<StepDims>& dims) {
    std::vector<Factor> f;
    for (int t = static_cast<int>(dims.size()); t >= 1; --t) {
        f.push_back({"cW" + std::to_string(t), dims[t - 1].n_w});
        f.push_back({"cV" + std::to_string(t), dims[t - 1].n_v});
    }
    SystemSignature sig(std::move(f));
    if (sig.total_dim() != m.rows())
        throw std::invalid_argument("operator order inconsistent with step dims");
    return LabeledOperator(std::move(sig), m);
}

}  // namespace

ProcessComb::ProcessComb(std::vector<std::vector<Matrix>> step_kraus, std::vector<StepDims> dims,
                         double cptp_tol)
    : dims_(std::move(dims)) {
    if (step_kraus.size() != dims_.size() || dims_.empty())
        throw std::invalid_argument("ProcessComb: step count mismatch");
    if (dims_.back().n_wp_out != 1)
        throw std::invalid_argument("ProcessComb: final memory dimension must be 1");
    int n_wp_in = 1;
    for (size_t i = 0; i < dims_.size(); ++i) {
        int t = static_cast<int>(i) + 1;
        KrausChannel ch(std::move(step_kraus[i]), step_in_sig(t, n_wp_in, dims_[i].n_v),
                        step_out_sig(t, dims_[i].n_wp_out, dims_[i].n_w));
        auto rep = is_cptp(ch, cptp_tol);
        if (!rep.ok)
            throw std::invalid_argument("ProcessComb: step " + std::to_string(t) +
                                        " is not CPTP (residual " +
                                        std::to_string(rep.trace_preservation_residual) + ")");
        steps_.push_back(std::move(ch));
        n_wp_in = dims_[i].n_wp_out;
    }
}

const ChoiOperator& ProcessComb::choi() const {
    if (!choi_) choi_ = segment_choi(0, num_steps() - 1);
    return *choi_;
}

long ProcessComb::choi_order() const {
    long order = 1;
    for (const auto& d : dims_) order *= static_cast<long>(d.n_v) * d.n_w;
    return order;
}

ChoiOperator ProcessComb::segment_choi(int t0, int t1, std::vector<StepDims>* seg_dims) const {
    if (t0 < 0 || t1 >= num_steps() || t0 > t1)
        throw std::invalid_argument("segment_choi: bad step range");
    ChoiOperator cur = choi_from_kraus(steps_[t0]);
    for (int i = t0 + 1; i <= t1; ++i) cur = link_product(choi_from_kraus(steps_[i]), cur);

    // Canonical order: per step t from t1 down to t0, output group then input
    // group, with boundary memory factors folded into the outermost groups.
    std::vector<std::string> order;
    std::vector<StepDims> eff;
    for (int i = t1; i >= t0; --i) {
        int t = i + 1;
        StepDims d = dims_[i];
        int n_wp_in = (i == 0) ? 1 : dims_[i - 1].n_wp_out;
        StepDims e;
        e.n_w = d.n_w;
        e.n_v = d.n_v;
        if (i == t1 && d.n_wp_out > 1) {
            order.push_back(wp_label(t));
            e.n_w *= d.n_wp_out;
        }
        order.push_back(w_label(t));
        if (i == t0 && n_wp_in > 1) {
            order.push_back(wp_label(t - 1));
            e.n_v *= n_wp_in;
        }
        order.push_back(v_label(t));
        eff.push_back(e);
    }
    std::reverse(eff.begin(), eff.end());  // ascending in t
    cur.op = permute_systems(cur.op, order);
    if (seg_dims) *seg_dims = eff;
    return cur;
}

bool ProcessComb::type_compatible(const ProcessComb& other) const {
    if (num_steps() != other.num_steps()) return false;
    for (int i = 0; i < num_steps(); ++i) {
        const auto& a = dims_[i];
        const auto& b = other.dims_[i];
        if (a.n_v != b.n_v || a.n_w != b.n_w || a.n_wp_out != b.n_wp_out) return false;
    }
    return true;
}

ChoiOperator process_choi(const ProcessComb& p) { return p.choi(); }

Ensemble::Ensemble(std::vector<ProcessComb> procs, std::vector<double> pri)
    : processes(std::move(procs)), priors(std::move(pri)) {
    if (processes.size() < 2) throw std::invalid_argument("Ensemble: need at least two processes");
    if (priors.size() != processes.size())
        throw std::invalid_argument("Ensemble: priors size mismatch");
    double sum = 0.0;
    for (double p : priors) {
        if (p < 0.0) throw std::invalid_argument("Ensemble: negative prior");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("Ensemble: priors must sum to 1");
    for (const auto& p : processes)
        if (!p.type_compatible(processes.front()))
            throw std::invalid_argument("Ensemble: processes are not type-compatible");
}

bool Ensemble::equal_priors(double tol) const {
    for (double p : priors)
        if (std::abs(p - 1.0 / size()) > tol) return false;
    return true;
}

CombReport is_comb(const LabeledOperator& x, const std::vector<StepDims>& step_dims, double tol) {
    CombReport rep;
    rep.positivity_residual = std::max(0.0, -min_eigenvalue(x));
    LabeledOperator cur = with_canonical_labels(x.matrix(), step_dims);
    for (int t = static_cast<int>(step_dims.size()); t >= 1; --t) {
        std::string lw = "cW" + std::to_string(t), lv = "cV" + std::to_string(t);
        LabeledOperator r = partial_trace(cur, {lw});
        LabeledOperator prev = partial_trace(r, {lv}) * (1.0 / step_dims[t - 1].n_v);
        LabeledOperator expect = kron(LabeledOperator(SystemSignature::single(lv, step_dims[t - 1].n_v),
                                                      Matrix::Identity(step_dims[t - 1].n_v,
                                                                       step_dims[t - 1].n_v)),
                                      prev);
        expect = permute_systems(expect, r.signature().labels());
        rep.worst_residual =
            std::max(rep.worst_residual, (r.matrix() - expect.matrix()).cwiseAbs().maxCoeff());
        cur = prev;
    }
    double scalar = cur.matrix()(0, 0).real();
    rep.worst_residual = std::max(rep.worst_residual, std::abs(scalar - 1.0));
    rep.ok = rep.worst_residual <= tol && rep.positivity_residual <= tol;
    return rep;
}

CombReport is_tester_normalized(const LabeledOperator& sum, const std::vector<StepDims>& step_dims,
                                double tol) {
    CombReport rep;
    LabeledOperator cur = with_canonical_labels(sum.matrix(), step_dims);
    for (int t = static_cast<int>(step_dims.size()); t >= 1; --t) {
        std::string lw = "cW" + std::to_string(t), lv = "cV" + std::to_string(t);
        int nw = step_dims[t - 1].n_w;
        LabeledOperator xi = partial_trace(cur, {lw}) * (1.0 / nw);
        LabeledOperator expect =
            kron(LabeledOperator(SystemSignature::single(lw, nw), Matrix::Identity(nw, nw)), xi);
        expect = permute_systems(expect, cur.signature().labels());
        rep.worst_residual =
            std::max(rep.worst_residual, (cur.matrix() - expect.matrix()).cwiseAbs().maxCoeff());
        cur = partial_trace(xi, {lv});
    }
    rep.worst_residual = std::max(rep.worst_residual, std::abs(cur.matrix()(0, 0).real() - 1.0));
    rep.ok = rep.worst_residual <= tol;
    return rep;
}

double tester_success_probability(const Ensemble& e, const std::vector<LabeledOperator>& tester,
                                  double tol) {
    if (static_cast<int>(tester.size()) != e.size())
        throw std::invalid_argument("tester size must match ensemble size");
    const auto& choi0 = e.processes.front().choi();
    std::vector<LabeledOperator> aligned;
    for (const auto& th : tester) aligned.push_back(permute_systems(th, choi0.op.signature().labels()));

    for (const auto& th : aligned) {
        double neg = -min_eigenvalue(th);
        if (neg > tol)
            throw std::invalid_argument("tester element not PSD, residual " + std::to_string(neg));
    }
    LabeledOperator sum = aligned.front();
    for (size_t i = 1; i < aligned.size(); ++i) sum = sum + aligned[i];
    std::vector<StepDims> dims = e.processes.front().step_dims();
    auto rep = is_tester_normalized(sum, dims, tol);
    if (!rep.ok)
        throw std::invalid_argument("tester normalization violated, residual " +
                                    std::to_string(rep.worst_residual));

    double value = 0.0;
    for (int m = 0; m < e.size(); ++m) {
        const auto& cm = e.processes[m].choi().op;
        value += e.priors[m] * (cm.matrix().cwiseProduct(aligned[m].matrix().transpose())).sum().real();
    }
    return value;
}

}  // namespace procdisc
