#pragma once

#include <string>
#include <vector>

#include "procdisc/labeled_operator.hpp"

namespace procdisc::sdp {

enum class Sense { Minimize, Maximize };

/// One Hermitian coefficient entry. Stored in the upper triangle (row <= col);
/// a diagonal entry must be real. An entry (r, c, v) with r < c stands for
/// v E_rc + conj(v) E_cr.
struct Entry {
    int row = 0;
    int col = 0;
    Complex value;
};

struct BlockSpec {
    std::string name;
    int order = 1;
};

/// Block Hermitian SDP with real linear equality constraints:
///   optimize  sum_b Re Tr(C_b X_b)
///   s.t.      sum_b Re Tr(A_{i,b} X_b) = rhs_i,   X_b >= 0.
class HermitianSdp {
public:
    int add_block(const std::string& name, int order);

    void set_sense(Sense s) { sense_ = s; }
    Sense sense() const { return sense_; }

    void add_objective(int block, int row, int col, Complex v);
    void add_objective_matrix(int block, const Matrix& m, double drop_tol = 1e-14);

    int add_constraint(double rhs);
    void add_coefficient(int constraint, int block, int row, int col, Complex v);
    void add_coefficient_matrix(int constraint, int block, const Matrix& m,
                                double drop_tol = 1e-14);

    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const BlockSpec& block(int b) const { return blocks_.at(b); }
    int total_order() const;

    double rhs(int i) const { return constraints_.at(i).rhs; }
    const std::vector<std::pair<int, std::vector<Entry>>>& constraint_coeffs(int i) const {
        return constraints_.at(i).coeffs;
    }
    const std::vector<std::vector<Entry>>& objective_entries() const { return objective_; }

    Matrix objective_dense(int block) const;
    Matrix constraint_dense(int constraint, int block) const;

private:
    struct Constraint {
        double rhs = 0.0;
        std::vector<std::pair<int, std::vector<Entry>>> coeffs;  // (block, entries)
    };

    std::vector<Entry>& coeff_list(int constraint, int block);
    static void push_entry(std::vector<Entry>& list, int order, int row, int col, Complex v);
    static void push_matrix(std::vector<Entry>& list, int order, const Matrix& m, double drop_tol);
    static Matrix to_dense(const std::vector<Entry>& list, int order);

    Sense sense_ = Sense::Minimize;
    std::vector<BlockSpec> blocks_;
    std::vector<std::vector<Entry>> objective_;  // per block
    std::vector<Constraint> constraints_;
};

}  // namespace procdisc::sdp
