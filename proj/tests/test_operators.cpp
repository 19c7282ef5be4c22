#include "doctest.h"

#include <random>

#include "procdisc/labeled_operator.hpp"

using namespace procdisc;

namespace {

Matrix random_matrix(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = Complex(nd(gen), nd(gen));
    return m;
}

Matrix kron_oracle(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

TEST_CASE("kron matches the dense Kronecker oracle") {
    Matrix a = random_matrix(2, 1), b = random_matrix(3, 2);
    LabeledOperator la(SystemSignature::single("A", 2), a);
    LabeledOperator lb(SystemSignature::single("B", 3), b);
    auto k = kron(la, lb);
    CHECK((k.matrix() - kron_oracle(a, b)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(k.signature().labels() == std::vector<std::string>{"A", "B"});
}

TEST_CASE("kron throws on duplicate labels") {
    LabeledOperator a(SystemSignature::single("A", 2), random_matrix(2, 3));
    CHECK_THROWS(kron(a, a));
}

TEST_CASE("partial trace of a product factorizes") {
    Matrix a = random_matrix(2, 4), b = random_matrix(3, 5);
    auto ab = kron(LabeledOperator(SystemSignature::single("A", 2), a),
                   LabeledOperator(SystemSignature::single("B", 3), b));
    auto ta = partial_trace(ab, {"B"});
    CHECK((ta.matrix() - b.trace() * a).cwiseAbs().maxCoeff() <= 1e-13);
    auto tb = partial_trace(ab, {"A"});
    CHECK((tb.matrix() - a.trace() * b).cwiseAbs().maxCoeff() <= 1e-13);
    auto full = partial_trace(ab, {"A", "B"});
    CHECK(std::abs(full.matrix()(0, 0) - a.trace() * b.trace()) <= 1e-12);
    CHECK(full.signature().num_factors() == 0);
}

TEST_CASE("permute_systems swaps factors and round-trips") {
    Matrix a = random_matrix(2, 6), b = random_matrix(3, 7);
    auto ab = kron(LabeledOperator(SystemSignature::single("A", 2), a),
                   LabeledOperator(SystemSignature::single("B", 3), b));
    auto ba = permute_systems(ab, {"B", "A"});
    auto oracle = kron(LabeledOperator(SystemSignature::single("B", 3), b),
                       LabeledOperator(SystemSignature::single("A", 2), a));
    CHECK((ba.matrix() - oracle.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
    auto back = permute_systems(ba, {"A", "B"});
    CHECK((back.matrix() - ab.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("permute_systems on three factors matches nested oracle") {
    Matrix a = random_matrix(2, 8), b = random_matrix(2, 9), c = random_matrix(3, 10);
    LabeledOperator la(SystemSignature::single("A", 2), a);
    LabeledOperator lb(SystemSignature::single("B", 2), b);
    LabeledOperator lc(SystemSignature::single("C", 3), c);
    auto abc = kron(kron(la, lb), lc);
    auto cab = permute_systems(abc, {"C", "A", "B"});
    auto oracle = kron(kron(lc, la), lb);
    CHECK((cab.matrix() - oracle.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("partial transpose acts on the named factor only") {
    Matrix a = random_matrix(2, 11), b = random_matrix(3, 12);
    auto ab = kron(LabeledOperator(SystemSignature::single("A", 2), a),
                   LabeledOperator(SystemSignature::single("B", 3), b));
    auto pt = partial_transpose(ab, {"B"});
    auto oracle = kron(LabeledOperator(SystemSignature::single("A", 2), a),
                       LabeledOperator(SystemSignature::single("B", 3), b.transpose().eval()));
    CHECK((pt.matrix() - oracle.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
    auto both = partial_transpose(pt, {"A"});
    CHECK((both.matrix() - ab.matrix().transpose()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("min_eigenvalue on a known diagonal") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = -0.5;
    d(2, 2) = 1.0;
    CHECK(min_eigenvalue(d) == doctest::Approx(-0.5));
    CHECK_FALSE(is_psd(d, 1e-9));
    CHECK(is_psd(Matrix::Identity(3, 3).eval(), 0.0));
}

TEST_CASE("min_eigenvalue rejects non-Hermitian input") {
    CHECK_THROWS(min_eigenvalue(random_matrix(3, 13)));
}

TEST_CASE("maximally entangled projector has trace d and is rank one") {
    auto psi = max_entangled_projector(3, "A", "B");
    CHECK(psi.trace().real() == doctest::Approx(3.0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(psi.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(8) == doctest::Approx(3.0));
    CHECK(es.eigenvalues()(7) == doctest::Approx(0.0));
}

TEST_CASE("operator construction validates the order") {
    CHECK_THROWS(LabeledOperator(SystemSignature::single("A", 2), random_matrix(3, 14)));
}

TEST_CASE("signature concat rejects duplicates") {
    auto a = SystemSignature::single("A", 2);
    CHECK_THROWS(a.concat(a));
    auto ab = a.concat(SystemSignature::single("B", 3));
    CHECK(ab.total_dim() == 6);
    CHECK(ab.index_of("B") == 1);
    CHECK(ab.dim_of("B") == 3);
}
