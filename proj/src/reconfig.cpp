#include "dtmb/reconfig.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "dtmb/error.hpp"

namespace dtmb {

RepairGraph build_repair_graph(const ArrayLayout& layout, const FaultMap& faults, Scope scope) {
    if (faults.layout_hash() != layout.hash())
        throw Error(ErrorCode::Schema, "fault map does not belong to this layout");

    RepairGraph g;
    std::vector<std::uint32_t> b_index_of_cell(layout.size(), Matching::kUnmatched);
    for (std::uint32_t i = 0; i < layout.size(); ++i) {
        const Cell& cell = layout.cell(i);
        if (cell.kind == Kind::Spare && !faults.is_faulty(i)) {
            b_index_of_cell[i] = static_cast<std::uint32_t>(g.b.size());
            g.b.push_back(cell.coord);
        }
    }
    for (std::uint32_t i = 0; i < layout.size(); ++i) {
        const Cell& cell = layout.cell(i);
        if (cell.kind != Kind::Primary || !faults.is_faulty(i)) continue;
        if (scope == Scope::UsedOnly && !cell.used) continue;
        g.a.push_back(cell.coord);
        std::vector<std::uint32_t> edges;
        for (std::uint32_t j : layout.neighbor_indices(i))
            if (b_index_of_cell[j] != Matching::kUnmatched) edges.push_back(b_index_of_cell[j]);
        g.edge_count += edges.size();
        g.adj.push_back(std::move(edges));
    }
    return g;
}

namespace {

// One Hopcroft-Karp BFS phase: layer the free A-vertices and return true if
// some augmenting path exists.
bool hk_bfs(const RepairGraph& g, const Matching& m, std::vector<std::uint32_t>& level) {
    constexpr std::uint32_t inf = std::numeric_limits<std::uint32_t>::max();
    std::queue<std::uint32_t> queue;
    std::uint32_t reached_free = inf;
    for (std::uint32_t u = 0; u < g.a.size(); ++u) {
        if (m.pair_a[u] == Matching::kUnmatched) {
            level[u] = 0;
            queue.push(u);
        } else {
            level[u] = inf;
        }
    }
    while (!queue.empty()) {
        const std::uint32_t u = queue.front();
        queue.pop();
        if (level[u] >= reached_free) continue;
        for (std::uint32_t v : g.adj[u]) {
            const std::uint32_t w = m.pair_b[v];
            if (w == Matching::kUnmatched) {
                reached_free = std::min(reached_free, level[u] + 1);
            } else if (level[w] == inf) {
                level[w] = level[u] + 1;
                queue.push(w);
            }
        }
    }
    return reached_free != inf;
}

bool hk_dfs(const RepairGraph& g, Matching& m, std::vector<std::uint32_t>& level,
            std::uint32_t u) {
    for (std::uint32_t v : g.adj[u]) {
        const std::uint32_t w = m.pair_b[v];
        if (w == Matching::kUnmatched ||
            (level[w] == level[u] + 1 && hk_dfs(g, m, level, w))) {
            m.pair_a[u] = v;
            m.pair_b[v] = u;
            return true;
        }
    }
    level[u] = std::numeric_limits<std::uint32_t>::max();
    return false;
}

} // namespace

Matching max_matching(const RepairGraph& g) {
    Matching m;
    m.pair_a.assign(g.a.size(), Matching::kUnmatched);
    m.pair_b.assign(g.b.size(), Matching::kUnmatched);
    std::vector<std::uint32_t> level(g.a.size());
    while (hk_bfs(g, m, level)) {
        for (std::uint32_t u = 0; u < g.a.size(); ++u)
            if (m.pair_a[u] == Matching::kUnmatched && hk_dfs(g, m, level, u)) ++m.size;
    }
    return m;
}

RepairPlan plan_repair(const ArrayLayout& layout, const FaultMap& faults, Scope scope) {
    const RepairGraph g = build_repair_graph(layout, faults, scope);
    const Matching m = max_matching(g);

    RepairPlan plan;
    for (std::uint32_t u = 0; u < g.a.size(); ++u)
        if (m.pair_a[u] != Matching::kUnmatched)
            plan.assignment.emplace_back(g.a[u], g.b[m.pair_a[u]]);

    if (m.size == g.a.size()) {
        plan.verdict = Verdict::Repairable;
        return plan;
    }

    plan.verdict = Verdict::Unrepairable;
    // Alternating reachability from the unmatched A-vertices: A -> B along any
    // edge, B -> A along matching edges. The reachable A-set S has
    // N(S) = reachable B-set, and |N(S)| = |S| - #unmatched < |S|.
    std::vector<bool> seen_a(g.a.size(), false), seen_b(g.b.size(), false);
    std::queue<std::uint32_t> queue;
    for (std::uint32_t u = 0; u < g.a.size(); ++u)
        if (m.pair_a[u] == Matching::kUnmatched) {
            seen_a[u] = true;
            queue.push(u);
        }
    while (!queue.empty()) {
        const std::uint32_t u = queue.front();
        queue.pop();
        for (std::uint32_t v : g.adj[u]) {
            if (seen_b[v]) continue;
            seen_b[v] = true;
            const std::uint32_t w = m.pair_b[v];
            if (w != Matching::kUnmatched && !seen_a[w]) {
                seen_a[w] = true;
                queue.push(w);
            }
        }
    }
    for (std::uint32_t u = 0; u < g.a.size(); ++u)
        if (seen_a[u]) plan.witness.push_back(g.a[u]);
    return plan;
}

bool repairable(const ArrayLayout& layout, const FaultMap& faults, Scope scope) {
    return plan_repair(layout, faults, scope).verdict == Verdict::Repairable;
}

} // namespace dtmb
