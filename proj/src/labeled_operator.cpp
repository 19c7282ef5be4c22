#include "procdisc/labeled_operator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <set>
#include <stdexcept>

namespace procdisc {

namespace {

std::vector<int> strides_of(const SystemSignature& sig) {
    int n = sig.num_factors();
    std::vector<int> s(n, 1);
    for (int i = n - 2; i >= 0; --i) s[i] = s[i + 1] * sig.factors()[i + 1].dim;
    return s;
}

// Composite indices of the sub-signature formed by the factor positions in
// `positions`, enumerated in that order, mapped to offsets in the full space.
std::vector<long> sub_offsets(const SystemSignature& sig, const std::vector<int>& positions) {
    auto strides = strides_of(sig);
    long count = 1;
    for (int p : positions) count *= sig.factors()[p].dim;
    std::vector<long> offsets(count, 0);
    long repeat = 1;
    for (int p : positions) {
        int d = sig.factors()[p].dim;
        long block = count / (repeat * d);
        long idx = 0;
        for (long r = 0; r < repeat; ++r)
            for (int k = 0; k < d; ++k)
                for (long b = 0; b < block; ++b) offsets[idx++] += (long)k * strides[p];
        // offsets accumulated in row-major order over `positions`
        repeat *= d;
    }
    return offsets;
}

}  // namespace

LabeledOperator::LabeledOperator(SystemSignature sig, Matrix mat)
    : sig_(std::move(sig)), mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() != sig_.total_dim())
        throw std::invalid_argument("matrix order does not match signature dimension");
}

LabeledOperator LabeledOperator::operator+(const LabeledOperator& other) const {
    if (!(sig_ == other.sig_)) throw std::invalid_argument("signature mismatch in operator+");
    return LabeledOperator(sig_, mat_ + other.mat_);
}

LabeledOperator LabeledOperator::operator-(const LabeledOperator& other) const {
    if (!(sig_ == other.sig_)) throw std::invalid_argument("signature mismatch in operator-");
    return LabeledOperator(sig_, mat_ - other.mat_);
}

LabeledOperator LabeledOperator::operator*(double scale) const {
    return LabeledOperator(sig_, mat_ * scale);
}

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b) {
    SystemSignature sig = a.signature().concat(b.signature());  // throws on duplicates
    Matrix out(sig.total_dim(), sig.total_dim());
    int nb = b.dim();
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
    return LabeledOperator(std::move(sig), std::move(out));
}

LabeledOperator partial_trace(const LabeledOperator& a, const std::vector<std::string>& labels) {
    const auto& sig = a.signature();
    std::set<std::string> traced(labels.begin(), labels.end());
    for (const auto& l : labels)
        if (!sig.has_label(l)) throw std::invalid_argument("partial_trace: unknown label " + l);

    std::vector<int> keep_pos, trace_pos;
    std::vector<Factor> keep_factors;
    for (int p = 0; p < sig.num_factors(); ++p) {
        if (traced.count(sig.factors()[p].label))
            trace_pos.push_back(p);
        else {
            keep_pos.push_back(p);
            keep_factors.push_back(sig.factors()[p]);
        }
    }
    auto keep_off = sub_offsets(sig, keep_pos);
    auto tr_off = sub_offsets(sig, trace_pos);

    long nk = (long)keep_off.size();
    Matrix out = Matrix::Zero(nk, nk);
    for (long i = 0; i < nk; ++i)
        for (long j = 0; j < nk; ++j) {
            Complex acc = 0.0;
            for (long s : tr_off) acc += a.matrix()(keep_off[i] + s, keep_off[j] + s);
            out(i, j) = acc;
        }
    return LabeledOperator(SystemSignature(std::move(keep_factors)), std::move(out));
}

LabeledOperator permute_systems(const LabeledOperator& a, const std::vector<std::string>& new_order) {
    const auto& sig = a.signature();
    if ((int)new_order.size() != sig.num_factors())
        throw std::invalid_argument("permute_systems: new_order is not a permutation");
    std::vector<int> positions;
    std::set<int> used;
    std::vector<Factor> new_factors;
    for (const auto& l : new_order) {
        int p = sig.index_of(l);
        if (p < 0 || !used.insert(p).second)
            throw std::invalid_argument("permute_systems: new_order is not a permutation");
        positions.push_back(p);
        new_factors.push_back(sig.factors()[p]);
    }
    auto off = sub_offsets(sig, positions);  // new composite index -> old offset
    long n = sig.total_dim();
    Matrix out(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) out(i, j) = a.matrix()(off[i], off[j]);
    return LabeledOperator(SystemSignature(std::move(new_factors)), std::move(out));
}

LabeledOperator partial_transpose(const LabeledOperator& a, const std::vector<std::string>& labels) {
    const auto& sig = a.signature();
    std::set<std::string> tset(labels.begin(), labels.end());
    std::vector<int> t_pos, k_pos;
    for (int p = 0; p < sig.num_factors(); ++p) {
        if (tset.count(sig.factors()[p].label))
            t_pos.push_back(p);
        else
            k_pos.push_back(p);
    }
    if (t_pos.size() != tset.size()) throw std::invalid_argument("partial_transpose: unknown label");
    auto t_off = sub_offsets(sig, t_pos);
    auto k_off = sub_offsets(sig, k_pos);
    long n = sig.total_dim();
    Matrix out(n, n);
    for (long ik = 0; ik < (long)k_off.size(); ++ik)
        for (long it = 0; it < (long)t_off.size(); ++it)
            for (long jk = 0; jk < (long)k_off.size(); ++jk)
                for (long jt = 0; jt < (long)t_off.size(); ++jt)
                    out(k_off[ik] + t_off[jt], k_off[jk] + t_off[it]) =
                        a.matrix()(k_off[ik] + t_off[it], k_off[jk] + t_off[jt]);
    return LabeledOperator(sig, std::move(out));
}

double hermitian_residual(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double hermitian_residual(const LabeledOperator& a) { return hermitian_residual(a.matrix()); }

double min_eigenvalue(const Matrix& m) {
    if (hermitian_residual(m) > kHermitianTol)
        throw std::invalid_argument("min_eigenvalue: operator is not Hermitian within tolerance");
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double min_eigenvalue(const LabeledOperator& a) { return min_eigenvalue(a.matrix()); }

bool is_psd(const Matrix& m, double tol) { return min_eigenvalue(m) >= -tol; }
bool is_psd(const LabeledOperator& a, double tol) { return is_psd(a.matrix(), tol); }

LabeledOperator max_entangled_projector(int dim, const std::string& label_a,
                                        const std::string& label_b) {
    if (dim < 1) throw std::invalid_argument("max_entangled_projector: dim must be positive");
    SystemSignature sig({{label_a, dim}, {label_b, dim}});
    Vector psi = Vector::Zero(dim * dim);
    for (int n = 0; n < dim; ++n) psi(n * dim + n) = 1.0;
    return LabeledOperator(std::move(sig), psi * psi.adjoint());
}

LabeledOperator identity_operator(const SystemSignature& sig) {
    return LabeledOperator(sig, Matrix::Identity(sig.total_dim(), sig.total_dim()));
}

}  // namespace procdisc
