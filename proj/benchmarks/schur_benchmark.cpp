#include <chrono>
#include <cstdio>
#include <random>

#include "procdisc/channels.hpp"
#include "procdisc/sdp/schur.hpp"
#include "procdisc/tester.hpp"

using namespace procdisc;
using namespace procdisc::sdp;

namespace {

double time_assembly(const std::vector<ExpandedConstraint>& cons, const std::vector<Matrix>& zinv,
                     const std::vector<Matrix>& x, SchurMode mode, int reps,
                     Eigen::MatrixXd& out) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        assemble_schur(cons, zinv, x, out, mode);
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    // Representative workload: the tester-form SDP of the three-process
    // memory ensemble (three blocks of order 64, a few thousand rows).
    auto e = fig4_ensemble(0.3, 0.04, 0.2, 1.0);
    std::vector<StepDims> dims;
    std::vector<Matrix> chois;
    for (int m = 0; m < e.size(); ++m) {
        std::vector<StepDims> d;
        ChoiOperator c = e.processes[m].segment_choi(0, e.num_steps() - 1, &d);
        if (m == 0) dims = d;
        chois.push_back(e.priors[m] * c.op.matrix());
    }
    auto p = build_tester_sdp(chois, dims);
    auto cons = expand_constraints(p);

    std::mt19937 gen(1);
    std::normal_distribution<double> nd;
    std::vector<Matrix> zinv, x;
    for (int b = 0; b < p.num_blocks(); ++b) {
        const int n = p.block(b).order;
        Matrix g(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) g(r, c) = Complex(nd(gen), nd(gen));
        x.push_back(g * g.adjoint() + Matrix::Identity(n, n));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) g(r, c) = Complex(nd(gen), nd(gen));
        zinv.push_back(g * g.adjoint() + Matrix::Identity(n, n));
    }

    std::printf("Schur assembly: %d rows, %d blocks\n", p.num_constraints(), p.num_blocks());
    Eigen::MatrixXd m_serial, m_parallel;
    const int reps = 3;
    double ts = time_assembly(cons, zinv, x, SchurMode::Serial, reps, m_serial);
    double tp = time_assembly(cons, zinv, x, SchurMode::Parallel, reps, m_parallel);
    double dev = (m_serial - m_parallel).cwiseAbs().maxCoeff();
    std::printf("serial   %.3f s\n", ts);
    std::printf("parallel %.3f s  (speedup %.2fx)\n", tp, ts / tp);
    std::printf("max |serial - parallel| = %.3e\n", dev);
    return dev <= 1e-9 ? 0 : 1;
}
