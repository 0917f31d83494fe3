#include "dtmb/casestudy.hpp"

#include <algorithm>
#include <unordered_set>

#include "dtmb/error.hpp"

namespace dtmb {
namespace {

// Removes boundary cells of surplus kind, scanning in stable order, until
// the primary/spare counts hit their targets.
std::vector<Cell> trim_to_counts(const ArrayLayout& start, std::size_t want_primary,
                                 std::size_t want_spare) {
    std::vector<Cell> cells(start.cells().begin(), start.cells().end());
    std::size_t primaries = start.n_primary();
    std::size_t spares = start.n_spare();
    if (primaries < want_primary || spares < want_spare)
        throw Error(ErrorCode::InvalidArgument, "region too small for requested counts");

    std::unordered_set<HexCoord, HexCoordHash> present;
    for (const Cell& c : cells) present.insert(c.coord);

    const auto is_boundary = [&](const HexCoord& c) {
        int degree = 0;
        for (const HexCoord& off : kHexOffsets)
            if (present.count({c.q + off.q, c.r + off.r})) ++degree;
        return degree < 6;
    };

    while (primaries > want_primary || spares > want_spare) {
        bool removed_any = false;
        for (auto it = cells.begin(); it != cells.end();) {
            const bool surplus = it->kind == Kind::Primary ? primaries > want_primary
                                                           : spares > want_spare;
            if (surplus && is_boundary(it->coord)) {
                (it->kind == Kind::Primary ? primaries : spares) -= 1;
                present.erase(it->coord);
                it = cells.erase(it);
                removed_any = true;
                if (primaries == want_primary && spares == want_spare) return cells;
            } else {
                ++it;
            }
        }
        if (!removed_any)
            throw Error(ErrorCode::InvalidArgument, "cannot trim region to requested counts");
    }
    return cells;
}

} // namespace

ArrayLayout build_invitro_layout() {
    const ArrayLayout grid = generate_layout(
        DTMBVariant::dtmb26(), RegionSpec::parallelogram(19, 19, Boundary::Open));
    ArrayLayout chip = ArrayLayout::from_cells(
        trim_to_counts(grid, CaseStudySpec::kPrimaries, CaseStudySpec::kSpares),
        Boundary::Open, 0, 0, DTMBVariant::dtmb26());

    // Assay cells: a serpentine transport route. The fabricated chip's used
    // cells are dominated by droplet paths between reservoirs, mixers and
    // detectors — long thin runs, not a solid block. The route snakes along
    // odd rows (fully primary under the (2,6) pattern) joined by single-cell
    // connectors, keeping every used cell interior with both of its spare
    // neighbors present and spare contention close to the minimum a
    // connected set can have.
    std::vector<HexCoord> used;
    const auto add = [&used](int q, int r) {
        if (used.size() < CaseStudySpec::kUsedPrimaries) used.push_back({q, r});
    };
    const auto run_row = [&add](int row, int q_from, int q_to) {
        const int step = q_from <= q_to ? 1 : -1;
        for (int q = q_from; q != q_to + step; q += step) add(q, row);
    };
    run_row(3, 2, 16);
    bool at_right = true;
    for (int r = 3; used.size() < CaseStudySpec::kUsedPrimaries; r += 2) {
        if (at_right) {
            add(15, r + 1); // connector below the right end
            run_row(r + 2, 15, 2);
        } else {
            add(1, r + 1); // connector below the left end
            run_row(r + 2, 1, 16);
        }
        at_right = !at_right;
    }
    return chip.with_used(used);
}

YieldEstimate casestudy_baseline(double survival_prob) {
    return analytic_yield_no_redundancy(survival_prob, CaseStudySpec::kUsedPrimaries);
}

Curve casestudy_mfault_curve(std::span<const int> m_grid, std::uint64_t runs,
                             std::uint64_t master_seed, Scope scope, unsigned jobs) {
    const ArrayLayout chip = build_invitro_layout();
    return mfault_curve(chip, m_grid, runs, master_seed, scope, jobs);
}

} // namespace dtmb
