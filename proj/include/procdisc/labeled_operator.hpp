#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "procdisc/signature.hpp"

namespace procdisc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;

/// A complex square matrix on a labeled tensor-product space.
/// Row-major composite index, leftmost signature factor most significant.
class LabeledOperator {
public:
    LabeledOperator() : mat_(Matrix::Zero(1, 1)) {}
    LabeledOperator(SystemSignature sig, Matrix mat);

    const SystemSignature& signature() const { return sig_; }
    const Matrix& matrix() const { return mat_; }
    Matrix& matrix() { return mat_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

    Complex trace() const { return mat_.trace(); }

    LabeledOperator operator+(const LabeledOperator& other) const;
    LabeledOperator operator-(const LabeledOperator& other) const;
    LabeledOperator operator*(double scale) const;

private:
    SystemSignature sig_;
    Matrix mat_;
};

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b);

LabeledOperator partial_trace(const LabeledOperator& a, const std::vector<std::string>& labels);

LabeledOperator permute_systems(const LabeledOperator& a, const std::vector<std::string>& new_order);

/// Transpose only the factors named in `labels`.
LabeledOperator partial_transpose(const LabeledOperator& a, const std::vector<std::string>& labels);

/// Max-entry magnitude of A - A^dagger.
double hermitian_residual(const Matrix& m);
double hermitian_residual(const LabeledOperator& a);

/// Smallest eigenvalue. Symmetrizes within kHermitianTol, errors beyond.
double min_eigenvalue(const LabeledOperator& a);
double min_eigenvalue(const Matrix& m);

bool is_psd(const LabeledOperator& a, double tol);
bool is_psd(const Matrix& m, double tol);

/// Unnormalized maximally entangled projector sum_{n,n'} |n><n'| (x) |n><n'|
/// on two factors of equal dimension.
LabeledOperator max_entangled_projector(int dim, const std::string& label_a,
                                        const std::string& label_b);

LabeledOperator identity_operator(const SystemSignature& sig);

}  // namespace procdisc
