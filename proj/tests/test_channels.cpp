#include "doctest.h"

#include <cmath>
#include <random>

#include "procdisc/channels.hpp"

using namespace procdisc;

namespace {

Matrix ad_choi_reference(double q) {
    Matrix c = Matrix::Zero(4, 4);
    c(0, 0) = 1.0;
    c(0, 3) = std::sqrt(1.0 - q);
    c(3, 0) = std::sqrt(1.0 - q);
    c(1, 1) = q;
    c(3, 3) = 1.0 - q;
    return c;
}

}  // namespace

TEST_CASE("amplitude damping Choi matches the closed form") {
    for (double q : {0.0, 0.3, 0.7, 1.0}) {
        auto c = choi_from_kraus(amplitude_damping(q));
        CHECK((c.op.matrix() - ad_choi_reference(q)).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("amplitude damping endpoints") {
    auto id = choi_from_kraus(amplitude_damping(0.0));
    auto psi = max_entangled_projector(2, "W", "V");
    CHECK((id.op.matrix() - psi.matrix()).cwiseAbs().maxCoeff() <= 1e-14);

    // q = 1 maps everything to |0><0|: Choi = |0><0| (x) I.
    auto full = choi_from_kraus(amplitude_damping(1.0));
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = 1.0;
    expect(1, 1) = 1.0;
    CHECK((full.op.matrix() - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("amplitude damping composition law") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double q1 = u(gen), q2 = u(gen);
        auto composed = compose_channels(amplitude_damping(q2), amplitude_damping(q1));
        auto direct = amplitude_damping(1.0 - (1.0 - q1) * (1.0 - q2));
        CHECK((choi_from_kraus(composed).op.matrix() - choi_from_kraus(direct).op.matrix())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
}

TEST_CASE("amplitude damping and GAD memory are CPTP over random parameters") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto ad = is_cptp(amplitude_damping(u(gen)), 1e-10);
        CHECK(ad.ok);
        CHECK(ad.trace_preservation_residual <= 1e-10);
        GadParams p{u(gen), 2.0 * u(gen), 3.0 * u(gen)};
        auto gad = is_cptp(generalized_ad_memory(p), 1e-10);
        CHECK(gad.ok);
        CHECK(gad.trace_preservation_residual <= 1e-10);
    }
}

TEST_CASE("GAD memory at nu = 0 is the two-qubit identity") {
    auto g = choi_from_kraus(generalized_ad_memory({0.2, 0.0, 1.0}));
    auto psi = max_entangled_projector(4, "O", "I");
    CHECK((g.op.matrix() - psi.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("GAD memory Choi is affine in p_c") {
    GadParams base{0.0, 0.35, 0.8};
    auto c0 = choi_from_kraus(generalized_ad_memory({0.0, base.nu, base.n})).op.matrix();
    auto c1 = choi_from_kraus(generalized_ad_memory({1.0, base.nu, base.n})).op.matrix();
    for (double pc : {0.2, 0.5, 0.9}) {
        auto c = choi_from_kraus(generalized_ad_memory({pc, base.nu, base.n})).op.matrix();
        CHECK((c - ((1.0 - pc) * c0 + pc * c1)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("uncorrelated GAD part is the tensor square of the single-use factors") {
    GadParams p{0.0, 0.25, 1.3};
    auto joint = choi_from_kraus(generalized_ad_memory(p)).op;

    // Single-use generalized AD channel from the same E_j set.
    const double g = p.gamma(), w = p.omega();
    std::vector<Matrix> e(4, Matrix::Zero(2, 2));
    e[0](0, 0) = std::sqrt(g);
    e[0](1, 1) = std::sqrt(g * w);
    e[1](0, 0) = std::sqrt((1 - g) * w);
    e[1](1, 1) = std::sqrt(1 - g);
    e[2](0, 1) = std::sqrt(g * (1 - w));
    e[3](1, 0) = std::sqrt((1 - g) * (1 - w));
    KrausChannel first(e, SystemSignature::single("V1", 2), SystemSignature::single("W1", 2));
    KrausChannel second(e, SystemSignature::single("V2", 2), SystemSignature::single("W2", 2));
    auto prod = kron(choi_from_kraus(first).op, choi_from_kraus(second).op);
    auto aligned = permute_systems(prod, {"W1", "W2", "V1", "V2"});
    CHECK((joint.matrix() - aligned.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("CPF ensemble layout for M = 2") {
    auto e = cpf_ensemble(2, 0.9, 0.1);
    REQUIRE(e.size() == 2);
    CHECK(e.processes[0].step(0).in_dim() == 4);

    auto a_t = amplitude_damping(0.1), a_b = amplitude_damping(0.9);
    auto rename = [](KrausChannel ch, const std::string& suffix) {
        ch.input_signature = SystemSignature::single("V" + suffix, 2);
        ch.output_signature = SystemSignature::single("W" + suffix, 2);
        return ch;
    };
    auto c1 = kron(choi_from_kraus(rename(a_t, "a")).op, choi_from_kraus(rename(a_b, "b")).op);
    auto aligned = permute_systems(c1, {"Wa", "Wb", "Va", "Vb"});
    CHECK((choi_from_kraus(e.processes[0].step(0)).op.matrix() - aligned.matrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-13);

    auto c2 = kron(choi_from_kraus(rename(a_b, "a")).op, choi_from_kraus(rename(a_t, "b")).op);
    auto aligned2 = permute_systems(c2, {"Wa", "Wb", "Va", "Vb"});
    CHECK((choi_from_kraus(e.processes[1].step(0)).op.matrix() - aligned2.matrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-13);
}

TEST_CASE("memory-channel ensemble wires are qubits and steps are CPTP") {
    auto e = fig4_ensemble(0.3, 0.04, 0.2, 1.0);
    REQUIRE(e.size() == 3);
    for (int m = 0; m < 3; ++m) {
        REQUIRE(e.processes[m].num_steps() == 3);
        for (int t = 0; t < 3; ++t) {
            CHECK(e.processes[m].step_dims()[t].n_v == 2);
            CHECK(e.processes[m].step_dims()[t].n_w == 2);
            CHECK(is_cptp(e.processes[m].step(t), 1e-10).ok);
        }
    }
    // Identical parameters collapse the three processes to the same Choi.
    auto same = fig4_ensemble(0.3, 0.0, 0.2, 1.0);
    for (int m = 1; m < 3; ++m)
        CHECK((same.processes[m].choi().op.matrix() - same.processes[0].choi().op.matrix())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
}

TEST_CASE("replacement and identity helpers") {
    Matrix zero_state = Matrix::Zero(2, 2);
    zero_state(0, 0) = 1.0;
    auto rep = choi_from_kraus(replacement_channel(zero_state));
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = 1.0;
    expect(1, 1) = 1.0;
    CHECK((rep.op.matrix() - expect).cwiseAbs().maxCoeff() <= 1e-12);

    auto id = choi_from_kraus(identity_channel(3));
    auto psi = max_entangled_projector(3, "W", "V");
    CHECK((id.op.matrix() - psi.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("random channels are CPTP and reproducible") {
    auto a = random_qubit_channel(7);
    auto b = random_qubit_channel(7);
    auto c = random_qubit_channel(8);
    CHECK(is_cptp(a, 1e-12).ok);
    bool identical = true;
    for (size_t k = 0; k < a.kraus.size(); ++k)
        if ((a.kraus[k] - b.kraus[k]).cwiseAbs().maxCoeff() != 0.0) identical = false;
    CHECK(identical);
    CHECK((a.kraus[0] - c.kraus[0]).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("GAD parameter validation") {
    CHECK_THROWS(amplitude_damping(-0.1));
    CHECK_THROWS(amplitude_damping(1.1));
    CHECK_THROWS(gad_memory_kraus({-0.1, 0.1, 1.0}));
    CHECK_THROWS(gad_memory_kraus({0.2, -0.1, 1.0}));
}
