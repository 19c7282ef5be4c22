#include "procdisc/channel.hpp"

#include <set>
#include <stdexcept>

namespace procdisc {

KrausChannel::KrausChannel(std::vector<Matrix> k, SystemSignature in_sig, SystemSignature out_sig)
    : kraus(std::move(k)), input_signature(std::move(in_sig)), output_signature(std::move(out_sig)) {
    if (kraus.empty()) throw std::invalid_argument("KrausChannel: empty Kraus list");
    for (const auto& m : kraus)
        if (m.rows() != out_dim() || m.cols() != in_dim())
            throw std::invalid_argument("KrausChannel: Kraus shape inconsistent with signatures");
}

Matrix KrausChannel::apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(out_dim(), out_dim());
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
}

int ChoiOperator::input_dim() const {
    int d = 1;
    for (const auto& l : input_labels) d *= op.signature().dim_of(l);
    return d;
}

int ChoiOperator::output_dim() const {
    int d = 1;
    for (const auto& l : output_labels) d *= op.signature().dim_of(l);
    return d;
}

ChoiOperator choi_from_kraus(const KrausChannel& ch) {
    // C = sum_i v_i v_i^dag with v_i the row-major vectorization of K_i;
    // component (w, n) of v_i is K_i(w, n), matching output (x) input ordering.
    int din = ch.in_dim(), dout = ch.out_dim();
    Matrix c = Matrix::Zero(dout * din, dout * din);
    for (const auto& k : ch.kraus) {
        Vector v(dout * din);
        for (int w = 0; w < dout; ++w)
            for (int n = 0; n < din; ++n) v(w * din + n) = k(w, n);
        c += v * v.adjoint();
    }
    SystemSignature sig = ch.output_signature.concat(ch.input_signature);
    return ChoiOperator{LabeledOperator(std::move(sig), std::move(c)),
                        ch.output_signature.labels(), ch.input_signature.labels()};
}

CptpReport is_cptp(const KrausChannel& ch, double tol) {
    Matrix acc = Matrix::Zero(ch.in_dim(), ch.in_dim());
    for (const auto& k : ch.kraus) acc += k.adjoint() * k;
    CptpReport r;
    r.trace_preservation_residual =
        (acc - Matrix::Identity(ch.in_dim(), ch.in_dim())).cwiseAbs().maxCoeff();
    r.positivity_residual = 0.0;  // Kraus form is CP by construction
    r.ok = r.trace_preservation_residual <= tol;
    return r;
}

CptpReport is_cptp(const ChoiOperator& choi, double tol) {
    CptpReport r;
    r.positivity_residual = std::max(0.0, -min_eigenvalue(choi.op));
    LabeledOperator marg = partial_trace(choi.op, choi.output_labels);
    r.trace_preservation_residual =
        (marg.matrix() - Matrix::Identity(marg.dim(), marg.dim())).cwiseAbs().maxCoeff();
    r.ok = r.positivity_residual <= tol && r.trace_preservation_residual <= tol;
    return r;
}

ChoiOperator link_product(const ChoiOperator& a, const ChoiOperator& b) {
    std::set<std::string> a_in(a.input_labels.begin(), a.input_labels.end());
    std::set<std::string> b_out(b.output_labels.begin(), b.output_labels.end());
    std::vector<std::string> shared;
    for (const auto& l : a.op.signature().labels())
        if (b.op.signature().has_label(l)) shared.push_back(l);
    for (const auto& l : shared) {
        if (!a_in.count(l) || !b_out.count(l))
            throw std::invalid_argument("link_product: shared label " + l +
                                        " is not an input of a that is an output of b");
        if (a.op.signature().dim_of(l) != b.op.signature().dim_of(l))
            throw std::invalid_argument("link_product: dimension mismatch on label " + l);
    }

    std::set<std::string> shared_set(shared.begin(), shared.end());
    std::vector<Factor> a_only_factors, b_only_factors;
    for (const auto& f : b.op.signature().factors())
        if (!shared_set.count(f.label)) b_only_factors.push_back(f);
    for (const auto& f : a.op.signature().factors())
        if (!shared_set.count(f.label)) a_only_factors.push_back(f);

    LabeledOperator ext_a = b_only_factors.empty()
                                ? a.op
                                : kron(a.op, identity_operator(SystemSignature(b_only_factors)));
    LabeledOperator bt = partial_transpose(b.op, shared);
    LabeledOperator ext_b =
        a_only_factors.empty() ? bt : kron(identity_operator(SystemSignature(a_only_factors)), bt);
    ext_b = permute_systems(ext_b, ext_a.signature().labels());

    LabeledOperator prod(ext_a.signature(), ext_a.matrix() * ext_b.matrix());
    LabeledOperator result = shared.empty() ? prod : partial_trace(prod, shared);

    ChoiOperator out;
    out.op = std::move(result);
    for (const auto& l : a.output_labels) out.output_labels.push_back(l);
    for (const auto& l : b.output_labels)
        if (!shared_set.count(l)) out.output_labels.push_back(l);
    for (const auto& l : b.input_labels) out.input_labels.push_back(l);
    for (const auto& l : a.input_labels)
        if (!shared_set.count(l)) out.input_labels.push_back(l);
    return out;
}

KrausChannel kron_channels(const KrausChannel& a, const KrausChannel& b) {
    std::vector<Matrix> ks;
    ks.reserve(a.kraus.size() * b.kraus.size());
    for (const auto& ka : a.kraus)
        for (const auto& kb : b.kraus) {
            Matrix k(ka.rows() * kb.rows(), ka.cols() * kb.cols());
            for (int i = 0; i < ka.rows(); ++i)
                for (int j = 0; j < ka.cols(); ++j)
                    k.block(i * kb.rows(), j * kb.cols(), kb.rows(), kb.cols()) = ka(i, j) * kb;
            ks.push_back(std::move(k));
        }
    return KrausChannel(std::move(ks), a.input_signature.concat(b.input_signature),
                        a.output_signature.concat(b.output_signature));
}

KrausChannel compose_channels(const KrausChannel& a, const KrausChannel& b) {
    if (a.in_dim() != b.out_dim())
        throw std::invalid_argument("compose_channels: dimension mismatch");
    std::vector<Matrix> ks;
    ks.reserve(a.kraus.size() * b.kraus.size());
    for (const auto& ka : a.kraus)
        for (const auto& kb : b.kraus) ks.push_back(ka * kb);
    return KrausChannel(std::move(ks), b.input_signature, a.output_signature);
}

}  // namespace procdisc
