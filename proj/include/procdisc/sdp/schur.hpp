#pragma once

#include <vector>

#include "procdisc/sdp/problem.hpp"

namespace procdisc::sdp {

/// Fully expanded (both triangles) coefficient entries of one constraint on
/// one block: A = sum_k w_k E_{row_k, col_k}.
struct ExpandedBlock {
    int block = 0;
    std::vector<int> row, col;
    std::vector<Complex> w;
    int nnz() const { return static_cast<int>(row.size()); }
};

struct ExpandedConstraint {
    std::vector<ExpandedBlock> blocks;
    double frob_norm = 0.0;
};

std::vector<ExpandedConstraint> expand_constraints(const HermitianSdp& p);

ExpandedConstraint expand_entries(const std::vector<std::pair<int, std::vector<Entry>>>& coeffs);

/// Re Tr(A_i Q_b) summed over touched blocks, Q dense per block.
double dot_dense(const ExpandedConstraint& a, const std::vector<Matrix>& q);

/// Re sum_b Tr(X_b A_{i,b}) for the inner product with a PSD iterate.
double dot_blocks(const ExpandedConstraint& a, const std::vector<Matrix>& x);

/// Accumulate y_i * A_i into dense per-block storage.
void add_scaled(const ExpandedConstraint& a, double y, std::vector<Matrix>& out);

enum class SchurMode { Serial, Parallel };

/// Schur complement of the HKM direction:
///   M_ij = Re sum_b Tr(A_{i,b} Zinv_b A_{j,b} X_b).
/// Constraints with many nonzeros on a block take a dense product path;
/// sparse pairs use entrywise contraction against Zinv and X.
void assemble_schur(const std::vector<ExpandedConstraint>& cons, const std::vector<Matrix>& zinv,
                    const std::vector<Matrix>& x, Eigen::MatrixXd& out, SchurMode mode);

}  // namespace procdisc::sdp
