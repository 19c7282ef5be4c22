#include "procdisc/sdp/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace procdisc::sdp {

int HermitianSdp::add_block(const std::string& name, int order) {
    if (order < 1) throw std::invalid_argument("block order must be positive");
    blocks_.push_back({name, order});
    objective_.emplace_back();
    return num_blocks() - 1;
}

int HermitianSdp::total_order() const {
    int n = 0;
    for (const auto& b : blocks_) n += b.order;
    return n;
}

void HermitianSdp::push_entry(std::vector<Entry>& list, int order, int row, int col, Complex v) {
    if (row < 0 || col < 0 || row >= order || col >= order)
        throw std::invalid_argument("entry index out of range");
    if (row > col) {
        std::swap(row, col);
        v = std::conj(v);
    }
    if (row == col) {
        if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
            throw std::invalid_argument("diagonal entry must be real");
        v = Complex(v.real(), 0.0);
    }
    list.push_back({row, col, v});
}

void HermitianSdp::push_matrix(std::vector<Entry>& list, int order, const Matrix& m,
                               double drop_tol) {
    if (m.rows() != order || m.cols() != order)
        throw std::invalid_argument("coefficient matrix order mismatch");
    if (hermitian_residual(m) > kHermitianTol)
        throw std::invalid_argument("coefficient matrix not Hermitian within tolerance");
    for (int r = 0; r < order; ++r) {
        double d = m(r, r).real();
        if (std::abs(d) > drop_tol) list.push_back({r, r, Complex(d, 0.0)});
        for (int c = r + 1; c < order; ++c) {
            Complex v = 0.5 * (m(r, c) + std::conj(m(c, r)));
            if (std::abs(v) > drop_tol) list.push_back({r, c, v});
        }
    }
}

void HermitianSdp::add_objective(int block, int row, int col, Complex v) {
    push_entry(objective_.at(block), blocks_.at(block).order, row, col, v);
}

void HermitianSdp::add_objective_matrix(int block, const Matrix& m, double drop_tol) {
    push_matrix(objective_.at(block), blocks_.at(block).order, m, drop_tol);
}

int HermitianSdp::add_constraint(double rhs) {
    constraints_.push_back({rhs, {}});
    return num_constraints() - 1;
}

std::vector<Entry>& HermitianSdp::coeff_list(int constraint, int block) {
    if (block < 0 || block >= num_blocks()) throw std::invalid_argument("bad block index");
    auto& coeffs = constraints_.at(constraint).coeffs;
    for (auto& [b, list] : coeffs)
        if (b == block) return list;
    coeffs.emplace_back(block, std::vector<Entry>{});
    return coeffs.back().second;
}

void HermitianSdp::add_coefficient(int constraint, int block, int row, int col, Complex v) {
    push_entry(coeff_list(constraint, block), blocks_.at(block).order, row, col, v);
}

void HermitianSdp::add_coefficient_matrix(int constraint, int block, const Matrix& m,
                                          double drop_tol) {
    push_matrix(coeff_list(constraint, block), blocks_.at(block).order, m, drop_tol);
}

Matrix HermitianSdp::to_dense(const std::vector<Entry>& list, int order) {
    Matrix m = Matrix::Zero(order, order);
    for (const auto& e : list) {
        m(e.row, e.col) += e.value;
        if (e.row != e.col) m(e.col, e.row) += std::conj(e.value);
    }
    return m;
}

Matrix HermitianSdp::objective_dense(int block) const {
    return to_dense(objective_.at(block), blocks_.at(block).order);
}

Matrix HermitianSdp::constraint_dense(int constraint, int block) const {
    for (const auto& [b, list] : constraints_.at(constraint).coeffs)
        if (b == block) return to_dense(list, blocks_.at(block).order);
    return Matrix::Zero(blocks_.at(block).order, blocks_.at(block).order);
}

}  // namespace procdisc::sdp
