#include "procdisc/signature.hpp"

#include <set>
#include <stdexcept>

namespace procdisc {

SystemSignature::SystemSignature(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    for (const auto& f : factors_) {
        if (f.dim < 1) throw std::invalid_argument("factor dimension must be positive: " + f.label);
        if (!seen.insert(f.label).second)
            throw std::invalid_argument("duplicate factor label: " + f.label);
        total_dim_ *= f.dim;
    }
}

SystemSignature SystemSignature::single(const std::string& label, int dim) {
    return SystemSignature({{label, dim}});
}

bool SystemSignature::has_label(const std::string& label) const { return index_of(label) >= 0; }

int SystemSignature::index_of(const std::string& label) const {
    for (int i = 0; i < num_factors(); ++i)
        if (factors_[i].label == label) return i;
    return -1;
}

int SystemSignature::dim_of(const std::string& label) const {
    int i = index_of(label);
    if (i < 0) throw std::invalid_argument("unknown factor label: " + label);
    return factors_[i].dim;
}

std::vector<std::string> SystemSignature::labels() const {
    std::vector<std::string> out;
    out.reserve(factors_.size());
    for (const auto& f : factors_) out.push_back(f.label);
    return out;
}

SystemSignature SystemSignature::concat(const SystemSignature& other) const {
    std::vector<Factor> all = factors_;
    all.insert(all.end(), other.factors_.begin(), other.factors_.end());
    return SystemSignature(std::move(all));
}

bool SystemSignature::operator==(const SystemSignature& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label != other.factors_[i].label || factors_[i].dim != other.factors_[i].dim)
            return false;
    return true;
}

}  // namespace procdisc
