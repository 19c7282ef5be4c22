#pragma once

#include <vector>

#include "procdisc/labeled_operator.hpp"

namespace procdisc {

/// A completely positive map given by Kraus operators (out_dim x in_dim each)
/// together with labeled input/output signatures.
struct KrausChannel {
    std::vector<Matrix> kraus;
    SystemSignature input_signature;
    SystemSignature output_signature;

    KrausChannel() = default;
    KrausChannel(std::vector<Matrix> k, SystemSignature in_sig, SystemSignature out_sig);

    int in_dim() const { return input_signature.total_dim(); }
    int out_dim() const { return output_signature.total_dim(); }

    Matrix apply(const Matrix& rho) const;
};

/// Choi operator with a partition of its signature into output and input labels.
/// Signature order is outputs first, then inputs.
struct ChoiOperator {
    LabeledOperator op;
    std::vector<std::string> output_labels;
    std::vector<std::string> input_labels;

    int input_dim() const;
    int output_dim() const;
};

ChoiOperator choi_from_kraus(const KrausChannel& ch);

struct CptpReport {
    bool ok = false;
    double trace_preservation_residual = 0.0;  // max |sum K^dag K - I|
    double positivity_residual = 0.0;          // max(0, -min eigenvalue of Choi)
};

CptpReport is_cptp(const KrausChannel& ch, double tol = 1e-8);
CptpReport is_cptp(const ChoiOperator& choi, double tol = 1e-8);

/// Link product a * b for sequential wiring: the shared labels are exactly
/// a's inputs that are b's outputs. b may be a state (no inputs).
ChoiOperator link_product(const ChoiOperator& a, const ChoiOperator& b);

/// Tensor-compose two Kraus channels (factor order: a then b).
KrausChannel kron_channels(const KrausChannel& a, const KrausChannel& b);

/// Sequential Kraus composition b-then-a (a applied after b).
KrausChannel compose_channels(const KrausChannel& a, const KrausChannel& b);

}  // namespace procdisc
