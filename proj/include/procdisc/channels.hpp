#pragma once

#include <vector>

#include "procdisc/comb.hpp"

namespace procdisc {

struct GadParams {
    double p_c = 0.0;  // degree of memory
    double nu = 0.0;   // dissipation-rate parameter
    double n = 0.0;    // thermal-photon parameter

    double gamma() const { return n / (2.0 * n + 1.0); }
    double omega() const;
};

/// Amplitude damping qubit channel with Kraus operators
/// E_0 = |0><0| + sqrt(1-q) |1><1|,  E_1 = sqrt(q) |0><1|.
std::vector<Matrix> amplitude_damping_kraus(double q);
KrausChannel amplitude_damping(double q);

/// Memory channel of two consecutive generalized AD uses with correlated
/// noise: mixture of the uncorrelated Kraus set {sqrt(1-p_c) E_j (x) E_k}
/// and the correlated set {sqrt(p_c) B_j}. Two-qubit; the first tensor
/// factor is the memory wire in comb wiring. Radicands of B_4/B_5 in
/// [-1e-12, 0) are clamped to zero; anything more negative is an error.
std::vector<Matrix> gad_memory_kraus(const GadParams& p);
KrausChannel generalized_ad_memory(const GadParams& p);

/// Channel position finding: M channels on M qubits, channel m placing
/// A_{q_T} in slot m and A_{q_B} elsewhere; equal priors; each process
/// repeats its channel for T memoryless steps.
Ensemble cpf_ensemble(int M, double q_B, double q_T, int T = 1);

/// The three 3-step memory-channel processes
///   E_m = (Tr_{W'} G_{d(m,3)}) * G_{d(m,2)} * (G_{d(m,1)} o sigma_ex)
/// with sigma_ex = |0><0| on W', G_0 at nu0 and G_1 at nu0 + dnu; equal
/// priors; all wires are qubits.
Ensemble fig4_ensemble(double nu0, double dnu, double p_c, double n);

KrausChannel identity_channel(int dim);

/// rho -> Tr(rho) sigma for a fixed density operator sigma.
KrausChannel replacement_channel(const Matrix& sigma);

/// CPTP by construction via a seeded Haar-ish random isometry dilation
/// (QR of a Gaussian matrix), environment dimension env_dim.
KrausChannel random_channel(int in_dim, int out_dim, int env_dim, unsigned seed);
KrausChannel random_qubit_channel(unsigned seed);

/// One-step (or T memoryless steps) processes from single channels.
Ensemble ensemble_from_channels(const std::vector<KrausChannel>& channels,
                                const std::vector<double>& priors, int T = 1);

}  // namespace procdisc
