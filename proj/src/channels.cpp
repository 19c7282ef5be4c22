#include "procdisc/channels.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace procdisc {

namespace {

double checked_sqrt(double radicand, const char* who) {
    if (radicand < -1e-12)
        throw std::invalid_argument(std::string(who) + " radicand is negative beyond tolerance: " +
                                    std::to_string(radicand));
    return std::sqrt(std::max(radicand, 0.0));
}

SystemSignature qubit_sig(const std::string& label) { return SystemSignature::single(label, 2); }

}  // namespace

double GadParams::omega() const { return std::exp(-(2.0 * n + 1.0) * nu); }

std::vector<Matrix> amplitude_damping_kraus(double q) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("damping parameter q must lie in [0,1]");
    Matrix e0 = Matrix::Zero(2, 2), e1 = Matrix::Zero(2, 2);
    e0(0, 0) = 1.0;
    e0(1, 1) = std::sqrt(1.0 - q);
    e1(0, 1) = std::sqrt(q);
    return {e0, e1};
}

KrausChannel amplitude_damping(double q) {
    return KrausChannel(amplitude_damping_kraus(q), qubit_sig("V"), qubit_sig("W"));
}

std::vector<Matrix> gad_memory_kraus(const GadParams& p) {
    if (p.p_c < 0.0 || p.p_c > 1.0) throw std::invalid_argument("p_c must lie in [0,1]");
    if (p.nu < 0.0) throw std::invalid_argument("nu must be nonnegative");
    if (p.n < 0.0) throw std::invalid_argument("n must be nonnegative");
    const double g = p.gamma();
    const double w = p.omega();

    std::vector<Matrix> single(4, Matrix::Zero(2, 2));
    single[0](0, 0) = std::sqrt(g);
    single[0](1, 1) = std::sqrt(g) * std::sqrt(w);
    single[1](0, 0) = std::sqrt(1.0 - g) * std::sqrt(w);
    single[1](1, 1) = std::sqrt(1.0 - g);
    single[2](0, 1) = std::sqrt(g) * std::sqrt(1.0 - w);
    single[3](1, 0) = std::sqrt(1.0 - g) * std::sqrt(1.0 - w);

    std::vector<Matrix> out;
    const double su = std::sqrt(1.0 - p.p_c);
    if (su > 0.0)
        for (const auto& ej : single)
            for (const auto& ek : single) {
                Matrix m = Matrix::Zero(4, 4);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c)
                            for (int d = 0; d < 2; ++d)
                                m(2 * a + c, 2 * b + d) = ej(a, b) * ek(c, d);
                out.push_back(su * m);
            }

    const double sc = std::sqrt(p.p_c);
    if (sc > 0.0) {
        Matrix b1 = Matrix::Zero(4, 4);
        b1(0, 0) = std::sqrt(std::exp(-(p.n + 1.0) * p.nu));
        b1(1, 1) = 1.0;
        b1(2, 2) = 1.0;
        b1(3, 3) = std::sqrt(std::exp(-p.n * p.nu));
        Matrix b2 = Matrix::Zero(4, 4);
        b2(3, 0) = std::sqrt((1.0 - g) * (1.0 - w));
        Matrix b3 = Matrix::Zero(4, 4);
        b3(0, 3) = std::sqrt(g * (1.0 - w));
        Matrix b4 = Matrix::Zero(4, 4);
        b4(0, 0) = checked_sqrt(g + w - g * w - std::exp(-(p.n + 1.0) * p.nu), "B_4");
        Matrix b5 = Matrix::Zero(4, 4);
        b5(3, 3) = checked_sqrt(1.0 - g + g * w - std::exp(-p.n * p.nu), "B_5");
        for (const auto& b : {b1, b2, b3, b4, b5}) out.push_back(sc * b);
    }
    return out;
}

KrausChannel generalized_ad_memory(const GadParams& p) {
    SystemSignature in = qubit_sig("Wpi").concat(qubit_sig("V"));
    SystemSignature out = qubit_sig("Wpo").concat(qubit_sig("W"));
    return KrausChannel(gad_memory_kraus(p), in, out);
}

Ensemble cpf_ensemble(int M, double q_B, double q_T, int T) {
    if (M < 2) throw std::invalid_argument("cpf_ensemble needs M >= 2");
    if (T < 1) throw std::invalid_argument("cpf_ensemble needs T >= 1");
    const int dim = 1 << M;
    std::vector<ProcessComb> procs;
    for (int m = 0; m < M; ++m) {
        // Tensor product over slots, A_{q_T} in slot m, A_{q_B} elsewhere.
        std::vector<Matrix> kraus = {Matrix::Ones(1, 1)};
        for (int slot = 0; slot < M; ++slot) {
            auto factor = amplitude_damping_kraus(slot == m ? q_T : q_B);
            std::vector<Matrix> next;
            for (const auto& a : kraus)
                for (const auto& f : factor) {
                    Matrix k(a.rows() * 2, a.cols() * 2);
                    for (int r = 0; r < a.rows(); ++r)
                        for (int c = 0; c < a.cols(); ++c) k.block(2 * r, 2 * c, 2, 2) = a(r, c) * f;
                    next.push_back(std::move(k));
                }
            kraus = std::move(next);
        }
        std::vector<std::vector<Matrix>> steps(T, kraus);
        std::vector<StepDims> dims(T, StepDims{dim, dim, 1});
        procs.emplace_back(std::move(steps), std::move(dims));
    }
    return Ensemble(std::move(procs), std::vector<double>(M, 1.0 / M));
}

Ensemble fig4_ensemble(double nu0, double dnu, double p_c, double n) {
    std::vector<std::vector<Matrix>> g(2);
    g[0] = gad_memory_kraus({p_c, nu0, n});
    g[1] = gad_memory_kraus({p_c, nu0 + dnu, n});

    std::vector<ProcessComb> procs;
    for (int m = 1; m <= 3; ++m) {
        std::vector<std::vector<Matrix>> steps(3);
        // Step 1: sigma_ex = |0><0| fed into the memory input.
        for (const auto& k : g[m == 1 ? 1 : 0]) steps[0].push_back(k.leftCols(2));
        // Step 2: the full memory channel.
        steps[1] = g[m == 2 ? 1 : 0];
        // Step 3: memory output traced out.
        for (const auto& k : g[m == 3 ? 1 : 0]) {
            steps[2].push_back(k.topRows(2));
            steps[2].push_back(k.bottomRows(2));
        }
        std::vector<StepDims> dims = {{2, 2, 2}, {2, 2, 2}, {2, 2, 1}};
        procs.emplace_back(std::move(steps), std::move(dims));
    }
    return Ensemble(std::move(procs), {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

KrausChannel identity_channel(int dim) {
    return KrausChannel({Matrix::Identity(dim, dim)}, SystemSignature::single("V", dim),
                        SystemSignature::single("W", dim));
}

KrausChannel replacement_channel(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols()) throw std::invalid_argument("sigma must be square");
    if (hermitian_residual(sigma) > kHermitianTol || std::abs(sigma.trace().real() - 1.0) > 1e-10)
        throw std::invalid_argument("sigma must be a density operator");
    const int d = static_cast<int>(sigma.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.adjoint()));
    if (es.eigenvalues()(0) < -1e-10) throw std::invalid_argument("sigma must be PSD");
    // Kraus K_{i,j} = sqrt(lambda_i) |v_i><j| acting on any input dimension d.
    std::vector<Matrix> kraus;
    for (int i = 0; i < d; ++i) {
        double lam = std::max(es.eigenvalues()(i), 0.0);
        if (lam == 0.0) continue;
        for (int j = 0; j < d; ++j) {
            Matrix k = Matrix::Zero(d, d);
            k.col(j) = std::sqrt(lam) * es.eigenvectors().col(i);
            kraus.push_back(std::move(k));
        }
    }
    return KrausChannel(std::move(kraus), SystemSignature::single("V", d),
                        SystemSignature::single("W", d));
}

KrausChannel random_channel(int in_dim, int out_dim, int env_dim, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    Matrix g(out_dim * env_dim, in_dim);
    for (int r = 0; r < g.rows(); ++r)
        for (int c = 0; c < g.cols(); ++c) g(r, c) = Complex(nd(gen), nd(gen));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(out_dim * env_dim, in_dim);
    std::vector<Matrix> kraus;
    for (int e = 0; e < env_dim; ++e) {
        Matrix k(out_dim, in_dim);
        for (int r = 0; r < out_dim; ++r) k.row(r) = q.row(r * env_dim + e);
        kraus.push_back(std::move(k));
    }
    return KrausChannel(std::move(kraus), SystemSignature::single("V", in_dim),
                        SystemSignature::single("W", out_dim));
}

KrausChannel random_qubit_channel(unsigned seed) { return random_channel(2, 2, 2, seed); }

Ensemble ensemble_from_channels(const std::vector<KrausChannel>& channels,
                                const std::vector<double>& priors, int T) {
    std::vector<ProcessComb> procs;
    for (const auto& ch : channels) {
        std::vector<std::vector<Matrix>> steps(T, ch.kraus);
        std::vector<StepDims> dims(T, StepDims{ch.in_dim(), ch.out_dim(), 1});
        procs.emplace_back(std::move(steps), std::move(dims));
    }
    return Ensemble(std::move(procs), priors);
}

}  // namespace procdisc
