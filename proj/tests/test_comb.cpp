#include "doctest.h"

#include <random>

#include "procdisc/channels.hpp"

using namespace procdisc;

namespace {

// Direct Choi definition: C = sum_{n,n'} L(|n><n'|) (x) |n><n'|.
Matrix choi_oracle(const KrausChannel& ch) {
    const int din = ch.in_dim(), dout = ch.out_dim();
    Matrix c = Matrix::Zero(dout * din, dout * din);
    for (int n = 0; n < din; ++n)
        for (int np = 0; np < din; ++np) {
            Matrix e = Matrix::Zero(din, din);
            e(n, np) = 1.0;
            Matrix l = ch.apply(e);
            for (int a = 0; a < dout; ++a)
                for (int b = 0; b < dout; ++b) c(a * din + n, b * din + np) += l(a, b);
        }
    return c;
}

}  // namespace

TEST_CASE("choi_from_kraus matches the definition and the trace rule") {
    for (unsigned seed : {3u, 4u, 5u}) {
        auto ch = random_channel(2, 3, 2, seed);
        auto c = choi_from_kraus(ch);
        CHECK((c.op.matrix() - choi_oracle(ch)).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK(c.op.trace().real() == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("link product reproduces Kraus composition") {
    for (unsigned seed : {11u, 12u, 13u}) {
        auto b = random_channel(2, 3, 2, seed);        // V -> M
        auto a = random_channel(3, 2, 3, seed + 50);   // M -> W
        b.output_signature = SystemSignature::single("M", 3);
        a.input_signature = SystemSignature::single("M", 3);
        auto linked = link_product(choi_from_kraus(a), choi_from_kraus(b));
        auto composed = compose_channels(a, b);
        auto aligned = permute_systems(linked.op, choi_from_kraus(composed).op.signature().labels());
        CHECK((aligned.matrix() - choi_from_kraus(composed).op.matrix()).cwiseAbs().maxCoeff() <=
              1e-12);
    }
}

TEST_CASE("link product with a state feeds the input") {
    auto ch = random_qubit_channel(21);
    std::mt19937 gen(22);
    std::normal_distribution<double> nd;
    Matrix g(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) g(r, c) = Complex(nd(gen), nd(gen));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();

    ChoiOperator state{LabeledOperator(SystemSignature::single("V", 2), rho), {"V"}, {}};
    auto out = link_product(choi_from_kraus(ch), state);
    CHECK((out.op.matrix() - ch.apply(rho)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("link product is associative") {
    auto c1 = random_channel(2, 2, 2, 31);  // V -> A
    auto c2 = random_channel(2, 3, 2, 32);  // A -> B
    auto c3 = random_channel(3, 2, 2, 33);  // B -> W
    c1.output_signature = SystemSignature::single("A", 2);
    c2.input_signature = SystemSignature::single("A", 2);
    c2.output_signature = SystemSignature::single("B", 3);
    c3.input_signature = SystemSignature::single("B", 3);
    auto x1 = link_product(choi_from_kraus(c3),
                           link_product(choi_from_kraus(c2), choi_from_kraus(c1)));
    auto x2 = link_product(link_product(choi_from_kraus(c3), choi_from_kraus(c2)),
                           choi_from_kraus(c1));
    auto aligned = permute_systems(x2.op, x1.op.signature().labels());
    CHECK((x1.op.matrix() - aligned.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("process Choi passes the comb hierarchy") {
    auto e = fig4_ensemble(0.3, 0.04, 0.2, 1.0);
    for (int m = 0; m < 3; ++m) {
        auto rep = is_comb(e.processes[m].choi().op, e.processes[m].step_dims(), 1e-8);
        CHECK(rep.ok);
        CHECK(rep.worst_residual <= 1e-8);
    }
    auto c = cpf_ensemble(2, 0.5, 0.2, 2);
    auto rep = is_comb(c.processes[0].choi().op, c.processes[0].step_dims(), 1e-8);
    CHECK(rep.ok);
}

TEST_CASE("single channel Choi is a one-step comb; trace-decreasing maps fail") {
    auto ch = random_qubit_channel(41);
    auto rep = is_comb(choi_from_kraus(ch).op, {StepDims{2, 2, 1}}, 1e-8);
    CHECK(rep.ok);

    KrausChannel bad({std::sqrt(0.5) * Matrix::Identity(2, 2)}, SystemSignature::single("V", 2),
                     SystemSignature::single("W", 2));
    CHECK_FALSE(is_cptp(bad).ok);
    CHECK_FALSE(is_comb(choi_from_kraus(bad).op, {StepDims{2, 2, 1}}, 1e-8).ok);
}

TEST_CASE("composed memory process equals the linked single steps") {
    // Two-step process with a qubit memory wire, composed by hand.
    auto mk = [](unsigned seed) {
        auto step1 = random_channel(2, 4, 2, seed);      // V1 -> Wp1 (x) W1
        auto step2 = random_channel(4, 2, 3, seed + 1);  // Wp1 (x) V2 -> W2
        return ProcessComb({step1.kraus, step2.kraus}, {StepDims{2, 2, 2}, StepDims{2, 2, 1}});
    };
    auto p = mk(51);
    CHECK(is_comb(p.choi().op, p.step_dims(), 1e-8).ok);
    CHECK(p.choi().op.trace().real() == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(p.choi().op.signature().labels() ==
          std::vector<std::string>{"W2", "V2", "W1", "V1"});
}

TEST_CASE("tester success probability for trivial testers") {
    auto e = ensemble_from_channels({random_qubit_channel(61), random_qubit_channel(62)},
                                    {0.3, 0.7});
    SystemSignature sig = e.processes[0].choi().op.signature();

    // Deterministic guess m0: the full normalization element on one slot.
    Matrix zero_in = Matrix::Zero(4, 4);
    zero_in(0, 0) = 1.0;  // I_W (x) |0><0|_V has support entries (0,0) and (2,2)
    zero_in(2, 2) = 1.0;
    std::vector<LabeledOperator> guess0 = {LabeledOperator(sig, zero_in),
                                           LabeledOperator(sig, Matrix::Zero(4, 4))};
    CHECK(tester_success_probability(e, guess0) == doctest::Approx(0.3).epsilon(1e-10));
    std::vector<LabeledOperator> guess1 = {LabeledOperator(sig, Matrix::Zero(4, 4)),
                                           LabeledOperator(sig, zero_in)};
    CHECK(tester_success_probability(e, guess1) == doctest::Approx(0.7).epsilon(1e-10));

    // Uniform random guess at equal priors.
    auto eq = ensemble_from_channels({random_qubit_channel(61), random_qubit_channel(62)},
                                     {0.5, 0.5});
    std::vector<LabeledOperator> uniform = {LabeledOperator(sig, 0.5 * zero_in),
                                            LabeledOperator(sig, 0.5 * zero_in)};
    CHECK(tester_success_probability(eq, uniform) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("tester success probability is linear in priors and tester") {
    auto e1 = ensemble_from_channels({random_qubit_channel(71), random_qubit_channel(72)},
                                     {0.2, 0.8});
    auto e2 = ensemble_from_channels({random_qubit_channel(71), random_qubit_channel(72)},
                                     {0.6, 0.4});
    auto emix = ensemble_from_channels({random_qubit_channel(71), random_qubit_channel(72)},
                                       {0.5 * 0.2 + 0.5 * 0.6, 0.5 * 0.8 + 0.5 * 0.4});
    SystemSignature sig = e1.processes[0].choi().op.signature();
    // A valid tester: sums to I_W (x) I_V / 2, a unit-trace input marginal.
    Matrix m0 = Matrix::Zero(4, 4), m1 = Matrix::Zero(4, 4);
    m0(0, 0) = 1.0;
    m0(2, 2) = 1.0;
    m1(1, 1) = 1.0;
    m1(3, 3) = 1.0;
    std::vector<LabeledOperator> ta = {LabeledOperator(sig, 0.5 * (0.3 * m0 + 0.2 * m1)),
                                       LabeledOperator(sig, 0.5 * (0.7 * m0 + 0.8 * m1))};
    double v1 = tester_success_probability(e1, ta);
    double v2 = tester_success_probability(e2, ta);
    double vm = tester_success_probability(emix, ta);
    CHECK(vm == doctest::Approx(0.5 * v1 + 0.5 * v2).epsilon(1e-10));
}

TEST_CASE("invalid testers are rejected with a residual") {
    auto e = ensemble_from_channels({random_qubit_channel(81), random_qubit_channel(82)},
                                    {0.5, 0.5});
    SystemSignature sig = e.processes[0].choi().op.signature();
    std::vector<LabeledOperator> bad = {identity_operator(sig), identity_operator(sig)};
    CHECK_THROWS(tester_success_probability(e, bad));  // normalization violated
    Matrix neg = -Matrix::Identity(4, 4);
    std::vector<LabeledOperator> notpsd = {LabeledOperator(sig, neg), identity_operator(sig)};
    CHECK_THROWS(tester_success_probability(e, notpsd));
}
