#pragma once

#include <cstdint>
#include <span>

#include "dtmb/layout.hpp"
#include "dtmb/yield.hpp"

namespace dtmb {

/// Target cell counts of the multiplexed in-vitro diagnostics chip.
struct CaseStudySpec {
    static constexpr std::size_t kPrimaries = 252;
    static constexpr std::size_t kSpares = 91;
    static constexpr std::size_t kUsedPrimaries = 108;
    static constexpr std::size_t kTotalCells = kPrimaries + kSpares;
};

/// Reconstructs the diagnostics chip as a DTMB(2,6)-patterned open layout:
/// a 19x19 region trimmed along the boundary in stable order until exactly
/// 252 primaries and 91 spares remain, with a 108-primary serpentine
/// transport route marked used (a connected path of interior primaries,
/// modeling the assay's droplet paths). Bit-deterministic.
ArrayLayout build_invitro_layout();

/// Yield of the original spare-less chip, where any fault among the 108
/// assay cells is fatal: p^108.
YieldEstimate casestudy_baseline(double survival_prob);

/// mfault_yield on the reconstructed layout at each m in the grid, with
/// common random numbers across m (see mfault_curve).
Curve casestudy_mfault_curve(std::span<const int> m_grid, std::uint64_t runs,
                             std::uint64_t master_seed, Scope scope = Scope::AllPrimaries,
                             unsigned jobs = 1);

} // namespace dtmb
