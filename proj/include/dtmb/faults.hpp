#pragma once

#include <cstdint>
#include <vector>

#include "dtmb/layout.hpp"

namespace dtmb {

/// (master, trial_index) fully determines one trial's fault map; trials are
/// independent substreams, so maps can be generated in any order.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t trial_index = 0;
};

/// Faulty subset of one layout's cells, tied to that layout by hash.
class FaultMap {
public:
    FaultMap(const ArrayLayout& layout, std::vector<std::uint32_t> faulty_indices);

    std::uint64_t layout_hash() const { return layout_hash_; }
    std::size_t count() const { return faulty_indices_.size(); }
    bool is_faulty(std::size_t cell_index) const { return faulty_bits_[cell_index]; }

    /// Faulty cell indices in stable order.
    const std::vector<std::uint32_t>& faulty_indices() const { return faulty_indices_; }

    friend bool operator==(const FaultMap& a, const FaultMap& b) {
        return a.layout_hash_ == b.layout_hash_ && a.faulty_indices_ == b.faulty_indices_;
    }

private:
    std::uint64_t layout_hash_ = 0;
    std::vector<std::uint32_t> faulty_indices_;
    std::vector<bool> faulty_bits_;
};

/// Every cell, primary and spare alike, fails independently with probability
/// 1 - survival_prob. One draw per cell in stable order.
FaultMap inject_bernoulli(const ArrayLayout& layout, double survival_prob, const Seed& seed);

/// Exactly m faulty cells, uniform over all m-subsets (partial Fisher-Yates
/// over the stable cell order). The m-fault set is a prefix of the
/// (m+1)-fault set for the same seed, which makes m-sweeps under a common
/// seed monotone trial by trial.
FaultMap inject_exact(const ArrayLayout& layout, std::size_t m, const Seed& seed);

} // namespace dtmb
