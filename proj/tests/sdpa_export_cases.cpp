// Exports three canonical problems in SDPA sparse format together with the
// optima found by the built-in solver, for cross-validation against an
// external solver. Usage: sdpa_export_cases <output-dir>
#include <cstdio>
#include <random>
#include <string>

#include "procdisc/channels.hpp"
#include "procdisc/sdp/sdpa.hpp"
#include "procdisc/sdp/solver.hpp"
#include "procdisc/tester.hpp"

using namespace procdisc;
using namespace procdisc::sdp;

namespace {

HermitianSdp lambda_max_problem(const Matrix& a) {
    HermitianSdp p;
    p.set_sense(Sense::Maximize);
    int b = p.add_block("X", static_cast<int>(a.rows()));
    p.add_objective_matrix(b, a);
    int c = p.add_constraint(1.0);
    for (int r = 0; r < a.rows(); ++r) p.add_coefficient(c, b, r, r, 1.0);
    return p;
}

HermitianSdp helstrom_problem(const Matrix& rho0, const Matrix& rho1) {
    HermitianSdp p;
    p.set_sense(Sense::Maximize);
    const int n = static_cast<int>(rho0.rows());
    int b0 = p.add_block("P0", n);
    int b1 = p.add_block("P1", n);
    p.add_objective_matrix(b0, 0.5 * rho0);
    p.add_objective_matrix(b1, 0.5 * rho1);
    for (int r = 0; r < n; ++r) {
        int c = p.add_constraint(1.0);
        p.add_coefficient(c, b0, r, r, 1.0);
        p.add_coefficient(c, b1, r, r, 1.0);
        for (int s = r + 1; s < n; ++s) {
            int cre = p.add_constraint(0.0);
            p.add_coefficient(cre, b0, r, s, 1.0);
            p.add_coefficient(cre, b1, r, s, 1.0);
            int cim = p.add_constraint(0.0);
            p.add_coefficient(cim, b0, r, s, Complex(0.0, 1.0));
            p.add_coefficient(cim, b1, r, s, Complex(0.0, 1.0));
        }
    }
    return p;
}

void emit(const std::string& dir, const std::string& name, const HermitianSdp& p, std::FILE* values) {
    auto sol = solve(p);
    if (!sol.optimal()) throw std::runtime_error("solve failed for " + name);
    export_sdpa_file(p, dir + "/" + name + ".dat-s");
    std::fprintf(values, "%s %.12e %.3e\n", name.c_str(), sol.objective, sol.rel_gap);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: sdpa_export_cases <output-dir>\n");
        return 1;
    }
    const std::string dir = argv[1];
    std::FILE* values = std::fopen((dir + "/values.txt").c_str(), "w");
    if (!values) {
        std::fprintf(stderr, "cannot write to %s\n", dir.c_str());
        return 1;
    }

    std::mt19937 gen(42);
    std::normal_distribution<double> nd;
    Matrix a(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = Complex(nd(gen), nd(gen));
    a = Matrix(0.5 * (a + a.adjoint()));
    emit(dir, "lambda_max", lambda_max_problem(a), values);

    Eigen::Vector2cd psi(1.0, 0.0), phi(0.6, 0.8);
    emit(dir, "helstrom", helstrom_problem(psi * psi.adjoint(), phi * phi.adjoint()), values);

    // Comb-constrained instance: dominating comb of a weighted binary
    // amplitude-damping pair, one step.
    auto e = ensemble_from_channels({amplitude_damping(0.1), amplitude_damping(0.5)}, {0.5, 0.5}, 1);
    std::vector<StepDims> dims;
    std::vector<Matrix> weighted;
    for (int m = 0; m < e.size(); ++m) {
        std::vector<StepDims> d;
        auto c = e.processes[m].segment_choi(0, 0, &d);
        if (m == 0) dims = d;
        weighted.push_back(e.priors[m] * c.op.matrix());
    }
    emit(dir, "comb", build_tester_sdp(weighted, dims), values);

    std::fclose(values);
    return 0;
}
