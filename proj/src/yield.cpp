#include "dtmb/yield.hpp"

#include <bit>
#include <cmath>
#include <thread>

#include "dtmb/error.hpp"
#include "dtmb/rng.hpp"

namespace dtmb {
namespace {

void check_prob(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "survival probability must be in [0,1]");
}

YieldEstimate analytic(double value) {
    YieldEstimate e;
    e.value = value;
    e.method = YieldMethod::Analytic;
    return e;
}

// Kuhn's augmenting-path matching on <=24-cell bitmasks. `b_match[v]` holds
// the a-cell currently using spare v, 0xff if free.
bool augment_mask(std::uint32_t a, const std::uint32_t* adj_spares, std::uint8_t* b_match,
                  std::uint32_t b_avail, std::uint32_t& visited) {
    std::uint32_t cand = adj_spares[a] & b_avail & ~visited;
    while (cand != 0) {
        const int v = std::countr_zero(cand);
        cand &= cand - 1;
        visited |= (1u << v);
        if (b_match[v] == 0xff ||
            augment_mask(b_match[v], adj_spares, b_match, b_avail, visited)) {
            b_match[v] = static_cast<std::uint8_t>(a);
            return true;
        }
    }
    return false;
}

// Counts Monte-Carlo successes for trials [lo, hi) of one experiment.
template <typename TrialFn>
std::uint64_t count_successes(std::uint64_t lo, std::uint64_t hi, const TrialFn& trial) {
    std::uint64_t successes = 0;
    for (std::uint64_t t = lo; t < hi; ++t)
        if (trial(t)) ++successes;
    return successes;
}

template <typename TrialFn>
YieldEstimate run_trials(std::uint64_t runs, unsigned jobs, const TrialFn& trial) {
    if (runs < 1) throw Error(ErrorCode::InvalidArgument, "runs must be >= 1");
    if (jobs < 1) jobs = 1;
    jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, runs));

    std::uint64_t successes = 0;
    if (jobs == 1) {
        successes = count_successes(0, runs, trial);
    } else {
        // Contiguous chunks; per-trial substreams make the split irrelevant
        // to the result.
        std::vector<std::uint64_t> partial(jobs, 0);
        std::vector<std::thread> threads;
        threads.reserve(jobs);
        const std::uint64_t chunk = (runs + jobs - 1) / jobs;
        for (unsigned j = 0; j < jobs; ++j) {
            const std::uint64_t lo = std::min<std::uint64_t>(j * chunk, runs);
            const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, runs);
            threads.emplace_back(
                [&, j, lo, hi] { partial[j] = count_successes(lo, hi, trial); });
        }
        for (auto& th : threads) th.join();
        for (std::uint64_t s : partial) successes += s;
    }

    YieldEstimate e;
    e.method = YieldMethod::MonteCarlo;
    e.runs = runs;
    e.successes = successes;
    e.value = static_cast<double>(successes) / static_cast<double>(runs);
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(runs));
    return e;
}

} // namespace

std::string method_name(YieldMethod m) {
    switch (m) {
        case YieldMethod::Analytic: return "analytic";
        case YieldMethod::Exact: return "exact";
        case YieldMethod::MonteCarlo: return "monte-carlo";
    }
    return "?";
}

YieldEstimate analytic_yield_no_redundancy(double survival_prob, std::uint64_t n_primary) {
    check_prob(survival_prob);
    if (n_primary < 1) throw Error(ErrorCode::InvalidArgument, "cell count must be >= 1");
    return analytic(std::pow(survival_prob, static_cast<double>(n_primary)));
}

YieldEstimate analytic_yield_dtmb16(double survival_prob, std::uint64_t n_primary) {
    check_prob(survival_prob);
    if (n_primary < 1) throw Error(ErrorCode::InvalidArgument, "cell count must be >= 1");
    const double p = survival_prob;
    const double cluster = std::pow(p, 7) + 7.0 * std::pow(p, 6) * (1.0 - p);
    return analytic(std::pow(cluster, static_cast<double>(n_primary) / 6.0));
}

YieldEstimate exact_yield(const ArrayLayout& layout, double survival_prob, Scope scope) {
    check_prob(survival_prob);
    const std::size_t n = layout.size();
    if (n > 24)
        throw Error(ErrorCode::BoundExceeded,
                    "exact enumeration capped at 24 cells (layout has " + std::to_string(n) +
                        "); use Monte Carlo");

    std::uint32_t scope_primaries = 0, spares = 0;
    std::uint32_t adj_spares[24] = {};
    for (std::uint32_t i = 0; i < n; ++i) {
        const Cell& cell = layout.cell(i);
        if (cell.kind == Kind::Spare) {
            spares |= (1u << i);
            continue;
        }
        if (scope == Scope::UsedOnly && !cell.used) continue;
        scope_primaries |= (1u << i);
        for (std::uint32_t j : layout.neighbor_indices(i))
            if (layout.cell(j).kind == Kind::Spare) adj_spares[i] |= (1u << j);
    }

    const double p = survival_prob, q = 1.0 - survival_prob;
    double pow_p[25], pow_q[25];
    pow_p[0] = pow_q[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        pow_p[k] = pow_p[k - 1] * p;
        pow_q[k] = pow_q[k - 1] * q;
    }

    double sum = 0.0, comp = 0.0; // Kahan
    std::uint8_t b_match[24];
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t pattern = 0; pattern < total; ++pattern) {
        const auto faulty = static_cast<std::uint32_t>(pattern);
        const std::uint32_t a_set = faulty & scope_primaries;
        const std::uint32_t b_avail = spares & ~faulty;

        bool ok = true;
        if (a_set != 0) {
            for (std::uint32_t rest = spares; rest != 0; rest &= rest - 1)
                b_match[std::countr_zero(rest)] = 0xff;
            for (std::uint32_t rest = a_set; rest != 0 && ok; rest &= rest - 1) {
                const auto a = static_cast<std::uint32_t>(std::countr_zero(rest));
                if ((adj_spares[a] & b_avail) == 0) {
                    ok = false;
                    break;
                }
                std::uint32_t visited = 0;
                ok = augment_mask(a, adj_spares, b_match, b_avail, visited);
            }
        }
        if (ok) {
            const int k = std::popcount(faulty);
            const double term = pow_q[k] * pow_p[n - static_cast<std::size_t>(k)] - comp;
            const double next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
    }

    YieldEstimate e;
    e.value = sum;
    e.method = YieldMethod::Exact;
    return e;
}

YieldEstimate mc_yield(const ArrayLayout& layout, double survival_prob, std::uint64_t runs,
                       std::uint64_t master_seed, Scope scope, unsigned jobs) {
    check_prob(survival_prob);
    return run_trials(runs, jobs, [&](std::uint64_t t) {
        return repairable(layout, inject_bernoulli(layout, survival_prob, {master_seed, t}),
                          scope);
    });
}

YieldEstimate mfault_yield(const ArrayLayout& layout, std::size_t m, std::uint64_t runs,
                           std::uint64_t master_seed, Scope scope, unsigned jobs) {
    if (m > layout.size())
        throw Error(ErrorCode::InvalidArgument,
                    "m = " + std::to_string(m) + " exceeds cell count " +
                        std::to_string(layout.size()));
    return run_trials(runs, jobs, [&](std::uint64_t t) {
        return repairable(layout, inject_exact(layout, m, {master_seed, t}), scope);
    });
}

EffectiveYield effective_yield(const YieldEstimate& y, const ArrayLayout& layout) {
    EffectiveYield ey;
    ey.yield_input = y.value;
    ey.rr_input = redundancy_ratio(layout);
    ey.value = y.value * static_cast<double>(layout.n_primary()) /
               static_cast<double>(layout.size());
    return ey;
}

Curve yield_sweep_mc(const ArrayLayout& layout, std::span<const double> p_grid,
                     std::uint64_t runs, std::uint64_t master_seed, Scope scope,
                     unsigned jobs) {
    Curve curve;
    curve.reserve(p_grid.size());
    for (std::size_t i = 0; i < p_grid.size(); ++i)
        curve.push_back({p_grid[i], mc_yield(layout, p_grid[i], runs,
                                             substream_seed(master_seed, i), scope, jobs)});
    return curve;
}

Curve yield_sweep_dtmb16(std::span<const double> p_grid, std::uint64_t n_primary) {
    Curve curve;
    curve.reserve(p_grid.size());
    for (double p : p_grid) curve.push_back({p, analytic_yield_dtmb16(p, n_primary)});
    return curve;
}

Curve yield_sweep_no_redundancy(std::span<const double> p_grid, std::uint64_t n_primary) {
    Curve curve;
    curve.reserve(p_grid.size());
    for (double p : p_grid) curve.push_back({p, analytic_yield_no_redundancy(p, n_primary)});
    return curve;
}

Curve mfault_curve(const ArrayLayout& layout, std::span<const int> m_grid, std::uint64_t runs,
                   std::uint64_t master_seed, Scope scope, unsigned jobs) {
    Curve curve;
    curve.reserve(m_grid.size());
    for (int m : m_grid) {
        if (m < 0) throw Error(ErrorCode::InvalidArgument, "fault count must be >= 0");
        curve.push_back({static_cast<double>(m),
                         mfault_yield(layout, static_cast<std::size_t>(m), runs, master_seed,
                                      scope, jobs)});
    }
    return curve;
}

} // namespace dtmb
