#include "procdisc/lower_bounds.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>

namespace procdisc {

namespace {

void check_priors(const std::vector<double>& priors, size_t count) {
    if (priors.size() != count) throw std::invalid_argument("one prior per element required");
    double sum = 0.0;
    for (double p : priors) {
        if (p < 0.0) throw std::invalid_argument("priors must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("priors must sum to 1");
}

}  // namespace

StateEnsemble::StateEnsemble(std::vector<Matrix> s, std::vector<double> p)
    : states(std::move(s)), priors(std::move(p)) {
    if (states.size() < 2) throw std::invalid_argument("need at least two states");
    check_priors(priors, states.size());
    for (const auto& rho : states) {
        if (rho.rows() != states.front().rows() || rho.rows() != rho.cols())
            throw std::invalid_argument("states must share a common space");
        if (hermitian_residual(rho) > kHermitianTol)
            throw std::invalid_argument("states must be Hermitian");
        if (std::abs(rho.trace().real() - 1.0) > 1e-10)
            throw std::invalid_argument("states must have unit trace");
        if (min_eigenvalue(rho) < -1e-10) throw std::invalid_argument("states must be PSD");
    }
}

SingleShotResult single_shot_channels(const std::vector<ChoiOperator>& weighted_maps,
                                      const sdp::SolverSettings& settings) {
    if (weighted_maps.size() < 2) throw std::invalid_argument("need at least two maps");
    const int n_w = weighted_maps.front().output_dim();
    const int n_v = weighted_maps.front().input_dim();
    std::vector<Matrix> chois;
    for (const auto& c : weighted_maps) {
        if (c.output_dim() != n_w || c.input_dim() != n_v)
            throw std::invalid_argument("maps must share input/output dimensions");
        chois.push_back(c.op.matrix());
    }
    TesterSolution ts = solve_tester_sdp(chois, {StepDims{n_v, n_w, 1}}, settings);
    SingleShotResult res;
    res.value = ts.value;
    res.phi = std::move(ts.theta);
    LabeledOperator sum = res.phi[0];
    for (size_t m = 1; m < res.phi.size(); ++m) sum = sum + res.phi[m];
    res.phi_state = partial_trace(sum, {w_label(1)}).matrix() / n_w;
    return res;
}

MinErrorResult min_error_states(const StateEnsemble& e, const sdp::SolverSettings& settings) {
    std::vector<Matrix> weighted;
    for (int m = 0; m < e.size(); ++m) weighted.push_back(e.priors[m] * e.states[m]);
    TesterSolution ts = solve_tester_sdp(
        weighted, {StepDims{1, static_cast<int>(e.states.front().rows()), 1}}, settings);
    MinErrorResult res;
    res.value = ts.value;
    for (auto& th : ts.theta) res.povm.push_back(th.matrix());
    return res;
}

double pgm_success(const StateEnsemble& e) {
    const int d = static_cast<int>(e.states.front().rows());
    Matrix s = Matrix::Zero(d, d);
    for (int m = 0; m < e.size(); ++m) s += e.priors[m] * e.states[m];
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()));
    const double lmax = es.eigenvalues().maxCoeff();
    Matrix inv_sqrt = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        double lam = es.eigenvalues()(i);
        if (lam > 1e-12 * lmax)
            inv_sqrt += (1.0 / std::sqrt(lam)) * es.eigenvectors().col(i) *
                        es.eigenvectors().col(i).adjoint();
    }
    double value = 0.0;
    for (int m = 0; m < e.size(); ++m) {
        Matrix g = inv_sqrt * e.states[m] * inv_sqrt;
        value += e.priors[m] * e.priors[m] * (e.states[m] * g).trace().real();
    }
    return value;
}

double pgm_success_factors(const std::vector<Matrix>& factors, const std::vector<double>& priors) {
    check_priors(priors, factors.size());
    const int d = static_cast<int>(factors.front().rows());
    long total_cols = 0;
    for (const auto& f : factors) {
        if (f.rows() != d) throw std::invalid_argument("factors must share the row space");
        total_cols += f.cols();
    }
    Matrix f_all(d, total_cols);
    long col = 0;
    for (size_t m = 0; m < factors.size(); ++m) {
        f_all.middleCols(col, factors[m].cols()) = std::sqrt(priors[m]) * factors[m];
        col += factors[m].cols();
    }
    // S = F F^dagger; the support decomposition comes from a thin SVD of F.
    Eigen::JacobiSVD<Matrix> svd(f_all, Eigen::ComputeThinU);
    const auto& sing = svd.singularValues();
    const double smax = sing(0);
    int rank = 0;
    while (rank < sing.size() && sing(rank) > 1e-6 * smax) ++rank;
    Matrix u = svd.matrixU().leftCols(rank);
    Eigen::VectorXd inv_s = sing.head(rank).cwiseInverse();

    double value = 0.0;
    for (size_t m = 0; m < factors.size(); ++m) {
        Matrix proj = u.adjoint() * factors[m];                      // rank x r_m
        Matrix g = proj.adjoint() * inv_s.asDiagonal() * proj;       // F^dag S^{-1/2} F
        value += priors[m] * priors[m] * g.squaredNorm();
    }
    return value;
}

namespace {

// rho_tilde (x) identity lifted and aligned with d's signature, then
// Tr_{W,V}[d * lift(phi)] per the Bayesian update rule.
LabeledOperator bayes_update_term(const ChoiOperator& d, const LabeledOperator& phi,
                                  const std::string& mem_label,
                                  const std::vector<std::string>& traced) {
    LabeledOperator lift = phi;
    if (d.op.signature().has_label(mem_label)) {
        int mem_dim = d.op.signature().dim_of(mem_label);
        lift = kron(identity_operator(SystemSignature::single(mem_label, mem_dim)), phi);
    }
    lift = permute_systems(lift, d.op.signature().labels());
    LabeledOperator prod(d.op.signature(), d.op.matrix() * lift.matrix());
    return partial_trace(prod, traced);
}

LabeledOperator trivial_state(double value) {
    Matrix one(1, 1);
    one(0, 0) = value;
    return LabeledOperator(SystemSignature{}, one);
}

}  // namespace

BayesTrace bayes_lower_bound(const Ensemble& e, const sdp::SolverSettings& settings) {
    const int num_steps = e.num_steps();
    const int m_count = e.size();
    BayesTrace trace;

    // rho_tilde[m][k] after the current stage, on the stage's memory wire.
    std::vector<std::vector<LabeledOperator>> rho(m_count);

    for (int t = 0; t < num_steps; ++t) {
        BayesStage stage;
        const std::string mem_out = wp_label(t + 1);
        const std::string mem_in = wp_label(t);
        const std::vector<std::string> traced = {w_label(t + 1), v_label(t + 1)};

        // Step Chois, aligned across processes.
        std::vector<ChoiOperator> step_choi;
        for (int m = 0; m < m_count; ++m) step_choi.push_back(choi_from_kraus(e.processes[m].step(t)));

        const int prev_outcomes = (t == 0) ? 1 : m_count;
        std::vector<std::vector<ChoiOperator>> d(m_count,
                                                 std::vector<ChoiOperator>(prev_outcomes));
        for (int m = 0; m < m_count; ++m) {
            for (int kp = 0; kp < prev_outcomes; ++kp) {
                if (t == 0) {
                    d[m][kp] = step_choi[m];
                    d[m][kp].op = d[m][kp].op * e.priors[m];
                } else if (step_choi[m].op.signature().has_label(mem_in)) {
                    ChoiOperator mem_state{rho[m][kp], {mem_in}, {}};
                    d[m][kp] = link_product(step_choi[m], mem_state);
                } else {
                    d[m][kp] = step_choi[m];
                    d[m][kp].op = d[m][kp].op * rho[m][kp].matrix()(0, 0).real();
                }
            }
        }

        stage.phi.resize(prev_outcomes);
        for (int kp = 0; kp < prev_outcomes; ++kp) {
            std::vector<ChoiOperator> maps;
            for (int m = 0; m < m_count; ++m) {
                LabeledOperator c = d[m][kp].op;
                if (c.signature().has_label(mem_out)) c = partial_trace(c, {mem_out});
                c = permute_systems(c, {w_label(t + 1), v_label(t + 1)});
                maps.push_back(ChoiOperator{c, {w_label(t + 1)}, {v_label(t + 1)}});
            }
            SingleShotResult ss = single_shot_channels(maps, settings);
            // solve_tester_sdp labels the single step W1/V1; relabel to this
            // stage's wires for the update.
            for (auto& phi : ss.phi) {
                SystemSignature sig = SystemSignature::single(w_label(t + 1),
                                                             phi.signature().factors()[0].dim)
                                          .concat(SystemSignature::single(
                                              v_label(t + 1), phi.signature().factors()[1].dim));
                stage.phi[kp].emplace_back(sig, phi.matrix());
            }
        }

        // Update the unnormalized memory operators.
        std::vector<std::vector<LabeledOperator>> next_rho(m_count);
        stage.q.assign(m_count, std::vector<double>(m_count, 0.0));
        double stage_success = 0.0;
        for (int m = 0; m < m_count; ++m) {
            for (int k = 0; k < m_count; ++k) {
                LabeledOperator acc;
                bool first = true;
                for (int kp = 0; kp < prev_outcomes; ++kp) {
                    LabeledOperator term =
                        bayes_update_term(d[m][kp], stage.phi[kp][k], mem_out, traced);
                    acc = first ? term : acc + term;
                    first = false;
                }
                if (acc.signature().num_factors() == 0 && acc.dim() == 1) {
                    // keep scalar form
                } else if (!acc.signature().has_label(mem_out)) {
                    acc = trivial_state(acc.matrix()(0, 0).real());
                }
                next_rho[m].push_back(acc);
                stage.q[m][k] = acc.trace().real();
                if (m == k) stage_success += stage.q[m][k];
            }
        }
        rho = std::move(next_rho);
        stage.rho_tilde = rho;
        stage.stage_success = stage_success;
        trace.stages.push_back(std::move(stage));
    }

    trace.value = trace.stages.back().stage_success;
    return trace;
}

double ultimate_success(const Ensemble& e, const sdp::SolverSettings& settings, int order_cap) {
    const long order = e.processes.front().choi_order();
    if (order > order_cap)
        throw std::invalid_argument(
            "exact computation refused: comb order " + std::to_string(order) + " exceeds cap " +
            std::to_string(order_cap) +
            " (cost grows polynomially in the product of all wire dimensions; see the "
            "complexity table for computing the ultimate success probability)");
    std::vector<StepDims> dims;
    std::vector<Matrix> weighted;
    for (int m = 0; m < e.size(); ++m) {
        std::vector<StepDims> d;
        ChoiOperator c = e.processes[m].segment_choi(0, e.num_steps() - 1, &d);
        if (m == 0) dims = d;
        weighted.push_back(e.priors[m] * c.op.matrix());
    }
    return solve_tester_sdp(weighted, dims, settings).value;
}

double choi_state_lower_bound(const Ensemble& e, const sdp::SolverSettings& settings,
                              int order_cap) {
    const long order = e.processes.front().choi_order();
    if (order > order_cap)
        throw std::invalid_argument("choi-state bound refused: order " + std::to_string(order) +
                                    " exceeds cap " + std::to_string(order_cap));
    std::vector<Matrix> states;
    double n_in = 1.0;
    for (const auto& sd : e.processes.front().step_dims()) n_in *= sd.n_v;
    for (int m = 0; m < e.size(); ++m) states.push_back(e.processes[m].choi().op.matrix() / n_in);
    return min_error_states(StateEnsemble(std::move(states), e.priors), settings).value;
}

double nonadaptive_binary(const KrausChannel& ch1, const KrausChannel& ch2, int T,
                          const sdp::SolverSettings& settings, int order_cap) {
    if (T < 1) throw std::invalid_argument("need T >= 1");
    double order = 1.0;
    for (int t = 0; t < T; ++t) order *= ch1.in_dim() * ch1.out_dim();
    if (order > order_cap)
        throw std::invalid_argument("nonadaptive bound refused: tensor order " +
                                    std::to_string(static_cast<long>(order)) + " exceeds cap " +
                                    std::to_string(order_cap));

    auto tensor_power = [T](const KrausChannel& ch) {
        std::vector<Matrix> kraus = {Matrix::Ones(1, 1)};
        for (int t = 0; t < T; ++t) {
            std::vector<Matrix> next;
            for (const auto& a : kraus)
                for (const auto& k : ch.kraus) {
                    Matrix prod(a.rows() * k.rows(), a.cols() * k.cols());
                    for (int r = 0; r < a.rows(); ++r)
                        for (int c = 0; c < a.cols(); ++c)
                            prod.block(r * k.rows(), c * k.cols(), k.rows(), k.cols()) =
                                a(r, c) * k;
                    next.push_back(std::move(prod));
                }
            kraus = std::move(next);
        }
        int din = 1, dout = 1;
        for (int t = 0; t < T; ++t) {
            din *= ch.in_dim();
            dout *= ch.out_dim();
        }
        return KrausChannel(std::move(kraus), SystemSignature::single("V", din),
                            SystemSignature::single("W", dout));
    };

    std::vector<ChoiOperator> maps = {choi_from_kraus(tensor_power(ch1)),
                                      choi_from_kraus(tensor_power(ch2))};
    for (auto& m : maps) m.op = m.op * 0.5;
    return single_shot_channels(maps, settings).value;
}

}  // namespace procdisc
