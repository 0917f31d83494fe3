#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtmb/layout.hpp"
#include "dtmb/rational.hpp"
#include "dtmb/reconfig.hpp"

namespace dtmb {

enum class YieldMethod : std::uint8_t { Analytic, Exact, MonteCarlo };

std::string method_name(YieldMethod m);

struct YieldEstimate {
    double value = 0.0;
    YieldMethod method = YieldMethod::Analytic;
    std::uint64_t runs = 0;      // Monte Carlo only
    std::uint64_t successes = 0; // Monte Carlo only; value == successes/runs exactly
    double std_error = 0.0;      // Monte Carlo only: sqrt(v(1-v)/runs)
};

/// Yield with every one of the n cells required to survive: p^n.
YieldEstimate analytic_yield_no_redundancy(double survival_prob, std::uint64_t n_primary);

/// Closed form for the one-spare-per-primary design: the array splits into
/// independent 7-cell clusters (a spare and its six primaries), a cluster
/// survives iff at most one of its cells fails, and n primaries make n/6
/// clusters: (p^7 + 7 p^6 (1-p))^(n/6). Real exponent for any n.
YieldEstimate analytic_yield_dtmb16(double survival_prob, std::uint64_t n_primary);

/// Exhaustive yield: sums P(pattern) over all 2^N fault patterns that are
/// repairable. Capped at N <= 24 cells; beyond that use mc_yield. Uses its
/// own bitmask matcher, so it is an independent check on the repair path.
YieldEstimate exact_yield(const ArrayLayout& layout, double survival_prob,
                          Scope scope = Scope::AllPrimaries);

/// Monte Carlo yield: fraction of `runs` Bernoulli fault maps that are
/// repairable. Trial t draws its fault map from substream (master_seed, t),
/// so the result is independent of evaluation order and of `jobs`.
YieldEstimate mc_yield(const ArrayLayout& layout, double survival_prob, std::uint64_t runs,
                       std::uint64_t master_seed, Scope scope = Scope::AllPrimaries,
                       unsigned jobs = 1);

/// Monte Carlo yield under exactly m faults per trial.
YieldEstimate mfault_yield(const ArrayLayout& layout, std::size_t m, std::uint64_t runs,
                           std::uint64_t master_seed, Scope scope = Scope::AllPrimaries,
                           unsigned jobs = 1);

struct EffectiveYield {
    double value = 0.0;    // Y * n / N, equivalently Y / (1 + RR)
    double yield_input = 0.0;
    Rational rr_input{0, 1};
};

/// Yield discounted by the area spent on spares.
EffectiveYield effective_yield(const YieldEstimate& y, const ArrayLayout& layout);

struct CurvePoint {
    double x = 0.0; // survival probability or fault count m
    YieldEstimate est;
};
using Curve = std::vector<CurvePoint>;

/// One mc_yield per grid point; point i uses substream (master_seed, i).
Curve yield_sweep_mc(const ArrayLayout& layout, std::span<const double> p_grid,
                     std::uint64_t runs, std::uint64_t master_seed,
                     Scope scope = Scope::AllPrimaries, unsigned jobs = 1);

Curve yield_sweep_dtmb16(std::span<const double> p_grid, std::uint64_t n_primary);
Curve yield_sweep_no_redundancy(std::span<const double> p_grid, std::uint64_t n_primary);

/// One mfault_yield per m. All points share master_seed (common random
/// numbers), so every trial's fault set grows with m and the curve is
/// monotone nonincreasing by construction, not just in expectation.
Curve mfault_curve(const ArrayLayout& layout, std::span<const int> m_grid, std::uint64_t runs,
                   std::uint64_t master_seed, Scope scope = Scope::AllPrimaries,
                   unsigned jobs = 1);

} // namespace dtmb
