#include "procdisc/sdp/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "procdisc/sdp/schur.hpp"

namespace procdisc::sdp {

namespace {

std::atomic<double> g_worst_rel_gap{0.0};
std::atomic<long> g_nonoptimal{0};

void record_outcome(const SdpSolution& sol) {
    if (sol.status != SolveStatus::Optimal) {
        g_nonoptimal.fetch_add(1, std::memory_order_relaxed);
        return;
    }
    double cur = g_worst_rel_gap.load(std::memory_order_relaxed);
    while (sol.rel_gap > cur &&
           !g_worst_rel_gap.compare_exchange_weak(cur, sol.rel_gap, std::memory_order_relaxed)) {
    }
}

struct Workspace {
    std::vector<int> orders;
    int n_total = 0;
    std::vector<Matrix> c;                  // internal minimize objective
    std::vector<ExpandedConstraint> cons;   // kept rows
    Eigen::VectorXd b;
    std::vector<int> kept;                  // original row indices
};

// Incremental Cholesky of the constraint Gram matrix; rows whose residual
// norm after projection falls below pivot_tol * row norm are dependent.
void presolve_rows(const std::vector<ExpandedConstraint>& all, const Eigen::VectorXd& rhs,
                   double pivot_tol, std::vector<int>& kept, std::vector<int>& dropped,
                   bool& inconsistent) {
    const int m = static_cast<int>(all.size());
    std::vector<Matrix> eye;  // Gram = Schur with identity scaling matrices
    int max_block = 0;
    for (const auto& c : all)
        for (const auto& eb : c.blocks) max_block = std::max(max_block, eb.block + 1);
    // block orders are implicit; infer from entry indices
    std::vector<int> orders(max_block, 1);
    for (const auto& c : all)
        for (const auto& eb : c.blocks)
            for (int k = 0; k < eb.nnz(); ++k)
                orders[eb.block] = std::max(orders[eb.block], std::max(eb.row[k], eb.col[k]) + 1);
    for (int b = 0; b < max_block; ++b) eye.push_back(Matrix::Identity(orders[b], orders[b]));

    Eigen::MatrixXd gram;
    assemble_schur(all, eye, eye, gram, SchurMode::Parallel);

    Eigen::MatrixXd lfac = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd bkept(m);
    inconsistent = false;
    for (int i = 0; i < m; ++i) {
        int k = static_cast<int>(kept.size());
        Eigen::VectorXd g(k);
        for (int j = 0; j < k; ++j) g(j) = gram(i, kept[j]);
        Eigen::VectorXd l(k);
        if (k > 0)
            l = lfac.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(g);
        double d = gram(i, i) - l.squaredNorm();
        double row_norm = std::sqrt(std::max(gram(i, i), 0.0));
        if (std::sqrt(std::max(d, 0.0)) <= pivot_tol * std::max(1.0, row_norm)) {
            dropped.push_back(i);
            // rhs consistency of the dependent row
            Eigen::VectorXd coef = Eigen::VectorXd::Zero(k);
            if (k > 0)
                coef = lfac.topLeftCorner(k, k)
                           .triangularView<Eigen::Lower>()
                           .transpose()
                           .solve(l);
            double implied = 0.0;
            for (int j = 0; j < k; ++j) implied += coef(j) * bkept(j);
            if (std::abs(implied - rhs(i)) > 1e-6 * (1.0 + std::abs(rhs(i)))) inconsistent = true;
        } else {
            lfac.row(k).head(k) = l.transpose();
            lfac(k, k) = std::sqrt(d);
            bkept(k) = rhs(i);
            kept.push_back(i);
        }
    }
}

// In-place Hermitian part. The temporary matters: assigning an expression
// containing m.adjoint() back into m aliases the coefficients being read.
void symmetrize(Matrix& m) { m = Matrix(0.5 * (m + m.adjoint())); }

double step_to_boundary(const Matrix& m, const Matrix& dm) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return 0.0;
    Matrix l = llt.matrixL();
    Matrix s = l.triangularView<Eigen::Lower>().solve(dm);
    Matrix g = l.triangularView<Eigen::Lower>().solve(s.adjoint()).adjoint();
    symmetrize(g);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues()(0);
    if (lmin >= -1e-14) return 1e30;
    return -1.0 / lmin;
}

}  // namespace

SdpSolution solve(const HermitianSdp& p, const SolverSettings& settings) {
    const int nb = p.num_blocks();
    Workspace w;
    w.n_total = 0;
    int realified = 0;
    for (int b = 0; b < nb; ++b) {
        w.orders.push_back(p.block(b).order);
        w.n_total += p.block(b).order;
        realified += 2 * p.block(b).order;
    }
    if (realified > settings.order_cap)
        throw std::invalid_argument("problem order " + std::to_string(realified) +
                                    " exceeds solver cap " + std::to_string(settings.order_cap));

    const double obj_sign = (p.sense() == Sense::Maximize) ? -1.0 : 1.0;
    for (int b = 0; b < nb; ++b) w.c.push_back(obj_sign * p.objective_dense(b));

    auto all_cons = expand_constraints(p);
    Eigen::VectorXd all_rhs(p.num_constraints());
    for (int i = 0; i < p.num_constraints(); ++i) all_rhs(i) = p.rhs(i);

    SdpSolution sol;
    std::vector<int> kept;
    if (settings.presolve && p.num_constraints() > 0) {
        bool inconsistent = false;
        presolve_rows(all_cons, all_rhs, settings.presolve_pivot, kept, sol.dropped_rows,
                      inconsistent);
        if (inconsistent) {
            sol.status = SolveStatus::NumericalFailure;
            record_outcome(sol);
            return sol;
        }
    } else {
        for (int i = 0; i < p.num_constraints(); ++i) kept.push_back(i);
    }
    const int m = static_cast<int>(kept.size());
    w.b.resize(m);
    for (int i = 0; i < m; ++i) {
        w.cons.push_back(all_cons[kept[i]]);
        w.b(i) = all_rhs(kept[i]);
    }

    // Initial iterate: scaled identities.
    double max_anorm = 1.0, max_cnorm = 1.0, max_b = 0.0;
    for (const auto& c : w.cons) max_anorm = std::max(max_anorm, c.frob_norm);
    for (const auto& cb : w.c) max_cnorm = std::max(max_cnorm, cb.norm());
    for (int i = 0; i < m; ++i) max_b = std::max(max_b, std::abs(w.b(i)));
    double xi = std::max({10.0, std::sqrt((double)w.n_total), w.n_total * max_b / max_anorm});
    double eta = std::max({10.0, std::sqrt((double)w.n_total), max_cnorm, max_anorm});

    std::vector<Matrix> x, z;
    for (int b = 0; b < nb; ++b) {
        x.push_back(xi * Matrix::Identity(w.orders[b], w.orders[b]));
        z.push_back(eta * Matrix::Identity(w.orders[b], w.orders[b]));
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    const double norm_b = 1.0 + w.b.norm();
    double norm_c2 = 0.0;
    for (const auto& cb : w.c) norm_c2 += cb.squaredNorm();
    const double norm_c = 1.0 + std::sqrt(norm_c2);
    const SchurMode mode = settings.parallel_schur ? SchurMode::Parallel : SchurMode::Serial;

    auto finish = [&](SolveStatus st, int iters, double relp, double reld, double relgap,
                      double pobj) {
        sol.status = st;
        sol.objective = obj_sign * pobj;
        sol.primal = x;
        sol.dual.assign(p.num_constraints(), 0.0);
        for (int i = 0; i < m; ++i) sol.dual[kept[i]] = y(i);
        sol.dual_slack = z;
        sol.primal_residual = relp;
        sol.dual_residual = reld;
        sol.rel_gap = relgap;
        sol.iterations = iters;
        record_outcome(sol);
        return sol;
    };

    Eigen::MatrixXd schur;
    std::vector<Matrix> zinv(nb), rd(nb), rc(nb), dz(nb), dx(nb), tmat(nb);
    double relp = 0.0, reld = 0.0, relgap = 0.0, pobj = 0.0;

    for (int iter = 0; iter <= settings.max_iter; ++iter) {
        // Residuals.
        Eigen::VectorXd rp = w.b;
        for (int i = 0; i < m; ++i) rp(i) -= dot_blocks(w.cons[i], x);
        std::vector<Matrix> asty(nb);
        for (int b = 0; b < nb; ++b) asty[b] = Matrix::Zero(w.orders[b], w.orders[b]);
        for (int i = 0; i < m; ++i) add_scaled(w.cons[i], y(i), asty);
        double rd2 = 0.0;
        pobj = 0.0;
        double mu = 0.0;
        for (int b = 0; b < nb; ++b) {
            symmetrize(asty[b]);
            rd[b] = w.c[b] - z[b] - asty[b];
            rd2 += rd[b].squaredNorm();
            pobj += (w.c[b].cwiseProduct(x[b].transpose())).sum().real();
            mu += (x[b].cwiseProduct(z[b].transpose())).sum().real();
        }
        mu /= w.n_total;
        double dobj = w.b.dot(y);
        relp = rp.norm() / norm_b;
        reld = std::sqrt(rd2) / norm_c;
        relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        sol.history.push_back({pobj, dobj, mu, relp, reld});

        if (relp <= settings.tol && reld <= settings.tol && relgap <= settings.tol)
            return finish(SolveStatus::Optimal, iter, relp, reld, relgap, pobj);
        if (iter == settings.max_iter)
            return finish(SolveStatus::MaxIterations, iter, relp, reld, relgap, pobj);
        if (!std::isfinite(mu) || mu > 1e60 || relp > 1e60)
            return finish(SolveStatus::NumericalFailure, iter, relp, reld, relgap, pobj);

        // Factor Z and assemble the Schur complement.
        bool fail = false;
        for (int b = 0; b < nb; ++b) {
            Eigen::LLT<Matrix> llt(z[b]);
            if (llt.info() != Eigen::Success) {
                fail = true;
                break;
            }
            zinv[b] = llt.solve(Matrix::Identity(w.orders[b], w.orders[b]));
            symmetrize(zinv[b]);
        }
        if (fail) return finish(SolveStatus::NumericalFailure, iter, relp, reld, relgap, pobj);

        assemble_schur(w.cons, zinv, x, schur, mode);
        Eigen::LLT<Eigen::MatrixXd> mf;
        double reg = 0.0;
        double scale = schur.size() ? schur.diagonal().maxCoeff() : 1.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            Eigen::MatrixXd msys = schur;
            if (reg > 0.0) msys.diagonal().array() += reg;
            mf.compute(msys);
            if (mf.info() == Eigen::Success) break;
            reg = (reg == 0.0) ? 1e-13 * std::max(scale, 1.0) : reg * 100.0;
        }
        if (mf.info() != Eigen::Success)
            return finish(SolveStatus::NumericalFailure, iter, relp, reld, relgap, pobj);

        auto solve_direction = [&](Eigen::VectorXd& dy) {
            Eigen::VectorXd rhs(m);
            for (int b = 0; b < nb; ++b) {
                tmat[b] = zinv[b] * (rd[b] * x[b] - rc[b]);
            }
            for (int i = 0; i < m; ++i) rhs(i) = rp(i) + dot_dense(w.cons[i], tmat);
            dy = mf.solve(rhs);
            for (int b = 0; b < nb; ++b) dz[b] = rd[b];
            std::vector<Matrix> astdy(nb);
            for (int b = 0; b < nb; ++b) astdy[b] = Matrix::Zero(w.orders[b], w.orders[b]);
            for (int i = 0; i < m; ++i) add_scaled(w.cons[i], dy(i), astdy);
            for (int b = 0; b < nb; ++b) {
                symmetrize(astdy[b]);
                dz[b] -= astdy[b];
                dx[b] = zinv[b] * (rc[b] - dz[b] * x[b]);
                symmetrize(dx[b]);
            }
        };

        // Predictor (affine-scaling) direction.
        for (int b = 0; b < nb; ++b) rc[b] = -z[b] * x[b];
        Eigen::VectorXd dy;
        solve_direction(dy);

        double ap = 1e30, ad = 1e30;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, step_to_boundary(x[b], dx[b]));
            ad = std::min(ad, step_to_boundary(z[b], dz[b]));
        }
        double ap_aff = std::min(1.0, settings.step_fraction * ap);
        double ad_aff = std::min(1.0, settings.step_fraction * ad);
        double mu_aff = 0.0;
        for (int b = 0; b < nb; ++b)
            mu_aff += ((x[b] + ap_aff * dx[b]).cwiseProduct((z[b] + ad_aff * dz[b]).transpose()))
                          .sum()
                          .real();
        mu_aff /= w.n_total;
        double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-10, 1.0);

        // Corrector.
        std::vector<Matrix> dz_aff = dz, dx_aff = dx;
        for (int b = 0; b < nb; ++b)
            rc[b] = sigma * mu * Matrix::Identity(w.orders[b], w.orders[b]) - z[b] * x[b] -
                    dz_aff[b] * dx_aff[b];
        solve_direction(dy);

        ap = 1e30;
        ad = 1e30;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, step_to_boundary(x[b], dx[b]));
            ad = std::min(ad, step_to_boundary(z[b], dz[b]));
        }
        ap = std::min(1.0, settings.step_fraction * ap);
        ad = std::min(1.0, settings.step_fraction * ad);
        if (ap < 1e-10 && ad < 1e-10)
            return finish(SolveStatus::NumericalFailure, iter, relp, reld, relgap, pobj);

        for (int b = 0; b < nb; ++b) {
            x[b] += ap * dx[b];
            z[b] += ad * dz[b];
            symmetrize(x[b]);
            symmetrize(z[b]);
        }
        y += ad * dy;
    }
    return finish(SolveStatus::MaxIterations, settings.max_iter, relp, reld, relgap, pobj);
}

double worst_observed_rel_gap() { return g_worst_rel_gap.load(); }

long nonoptimal_solve_count() { return g_nonoptimal.load(); }

void reset_solve_tracker() {
    g_worst_rel_gap.store(0.0);
    g_nonoptimal.store(0);
}

}  // namespace procdisc::sdp
