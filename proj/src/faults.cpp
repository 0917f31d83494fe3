#include "dtmb/faults.hpp"

#include <algorithm>
#include <numeric>

#include "dtmb/error.hpp"
#include "dtmb/rng.hpp"

namespace dtmb {

FaultMap::FaultMap(const ArrayLayout& layout, std::vector<std::uint32_t> faulty_indices)
    : layout_hash_(layout.hash()), faulty_indices_(std::move(faulty_indices)) {
    std::sort(faulty_indices_.begin(), faulty_indices_.end());
    faulty_indices_.erase(std::unique(faulty_indices_.begin(), faulty_indices_.end()),
                          faulty_indices_.end());
    faulty_bits_.assign(layout.size(), false);
    for (std::uint32_t i : faulty_indices_) {
        if (i >= layout.size())
            throw Error(ErrorCode::Schema, "fault index outside layout");
        faulty_bits_[i] = true;
    }
}

FaultMap inject_bernoulli(const ArrayLayout& layout, double survival_prob, const Seed& seed) {
    if (!(survival_prob >= 0.0 && survival_prob <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "survival probability must be in [0,1]");
    const double fail_prob = 1.0 - survival_prob;
    SplitMix64 rng(substream_seed(seed.master, seed.trial_index));
    std::vector<std::uint32_t> faulty;
    for (std::uint32_t i = 0; i < layout.size(); ++i)
        if (rng.next_unit() < fail_prob) faulty.push_back(i);
    return FaultMap(layout, std::move(faulty));
}

FaultMap inject_exact(const ArrayLayout& layout, std::size_t m, const Seed& seed) {
    const std::size_t n = layout.size();
    if (m > n)
        throw Error(ErrorCode::InvalidArgument,
                    "m = " + std::to_string(m) + " exceeds cell count " + std::to_string(n));
    SplitMix64 rng(substream_seed(seed.master, seed.trial_index));
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.next_below(n - i);
        std::swap(order[i], order[j]);
    }
    order.resize(m);
    return FaultMap(layout, std::move(order));
}

} // namespace dtmb
