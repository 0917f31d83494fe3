#pragma once

#include <cstdint>
#include <vector>

#include "dtmb/faults.hpp"
#include "dtmb/layout.hpp"

namespace dtmb {

/// Which primaries must be repaired: every faulty primary, or only the ones
/// carrying assay cells (used == true).
enum class Scope : std::uint8_t { AllPrimaries, UsedOnly };

/// Bipartite repair graph: side A holds the faulty primary cells needing
/// replacement, side B every fault-free spare. An edge means physical
/// adjacency. Both sides are in stable cell order.
struct RepairGraph {
    std::vector<HexCoord> a; // faulty primaries (within scope)
    std::vector<HexCoord> b; // fault-free spares
    std::vector<std::vector<std::uint32_t>> adj; // adj[i] = indices into b, ascending
    std::size_t edge_count = 0;
};

/// pair_a[i] = matched b-index or kUnmatched; pair_b mirrors it.
struct Matching {
    static constexpr std::uint32_t kUnmatched = 0xffffffffu;
    std::vector<std::uint32_t> pair_a;
    std::vector<std::uint32_t> pair_b;
    std::size_t size = 0;
};

enum class Verdict : std::uint8_t { Repairable, Unrepairable };

struct RepairPlan {
    Verdict verdict = Verdict::Repairable;
    /// Injective faulty-primary -> spare assignment, sorted by source cell.
    /// Covers all of A iff repairable; otherwise it is the partial matching.
    std::vector<std::pair<HexCoord, HexCoord>> assignment;
    /// On unrepairable: a set S of faulty primaries whose combined spare
    /// neighborhood is smaller than S (Hall violator). Empty otherwise.
    std::vector<HexCoord> witness;
};

/// Throws if `faults` was generated for a different layout.
RepairGraph build_repair_graph(const ArrayLayout& layout, const FaultMap& faults,
                               Scope scope = Scope::AllPrimaries);

/// Maximum-cardinality matching (Hopcroft-Karp). A merely maximal matching
/// would wrongly call some repairable instances unrepairable, so the full
/// maximum is computed. Deterministic: vertices and adjacency are processed
/// in stable order.
Matching max_matching(const RepairGraph& g);

/// Repairable iff a maximum matching saturates every faulty primary. On
/// failure the witness is the set of A-vertices reachable from an unmatched
/// A-vertex by alternating paths.
RepairPlan plan_repair(const ArrayLayout& layout, const FaultMap& faults,
                       Scope scope = Scope::AllPrimaries);

/// True iff every faulty in-scope primary can be assigned an adjacent
/// fault-free spare. Same decision plan_repair makes, minus the plan.
bool repairable(const ArrayLayout& layout, const FaultMap& faults,
                Scope scope = Scope::AllPrimaries);

} // namespace dtmb
