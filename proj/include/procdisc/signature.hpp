#pragma once

#include <string>
#include <vector>

namespace procdisc {

struct Factor {
    std::string label;
    int dim = 1;
};

/// Ordered list of named tensor factors. The leftmost factor is the most
/// significant one in the row-major index convention used throughout.
class SystemSignature {
public:
    SystemSignature() = default;
    explicit SystemSignature(std::vector<Factor> factors);

    static SystemSignature single(const std::string& label, int dim);

    const std::vector<Factor>& factors() const { return factors_; }
    int num_factors() const { return static_cast<int>(factors_.size()); }
    int total_dim() const { return total_dim_; }

    bool has_label(const std::string& label) const;
    int index_of(const std::string& label) const;  // -1 if absent
    int dim_of(const std::string& label) const;

    std::vector<std::string> labels() const;

    /// Concatenation (this first). Throws on duplicate labels.
    SystemSignature concat(const SystemSignature& other) const;

    bool operator==(const SystemSignature& other) const;

private:
    std::vector<Factor> factors_;
    int total_dim_ = 1;
};

}  // namespace procdisc
