#pragma once

// Connectivity queries over the in-service branch multigraph.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "gridswitch/network.hpp"

namespace gridswitch {

/// Adjacency view of the active (in-service, unmasked) branches. Parallel
/// branches are distinct edges; isolated-type buses are not graph nodes.
class BranchGraph {
public:
    struct Edge {
        std::size_t to;
        std::size_t branch_pos;
    };

    BranchGraph(const NetworkCase& c, const TopologyMask& mask)
        : node_active_(c.bus_count()), adjacency_(c.bus_count()) {
        for (std::size_t i = 0; i < c.bus_count(); ++i)
            node_active_[i] = c.buses()[i].type != BusType::Isolated;
        for (std::size_t k = 0; k < c.branch_count(); ++k) {
            if (!branch_active(c, mask, k)) continue;
            auto [f, t] = c.branch_ends(k);
            if (!node_active_[f] || !node_active_[t]) continue;
            adjacency_[f].push_back({t, k});
            adjacency_[t].push_back({f, k});
        }
    }

    [[nodiscard]] std::size_t node_count() const noexcept { return adjacency_.size(); }
    [[nodiscard]] bool active(std::size_t node) const noexcept { return node_active_[node]; }
    [[nodiscard]] const std::vector<Edge>& edges(std::size_t node) const { return adjacency_[node]; }

    /// Component label per node (-1 for inactive nodes); labels ordered by
    /// lowest member index.
    [[nodiscard]] std::vector<int> component_labels() const {
        std::vector<int> label(node_count(), -1);
        std::vector<std::size_t> stack;
        int next = 0;
        for (std::size_t s = 0; s < node_count(); ++s) {
            if (!node_active_[s] || label[s] >= 0) continue;
            label[s] = next;
            stack.push_back(s);
            while (!stack.empty()) {
                std::size_t v = stack.back();
                stack.pop_back();
                for (const Edge& e : adjacency_[v]) {
                    if (label[e.to] < 0) {
                        label[e.to] = next;
                        stack.push_back(e.to);
                    }
                }
            }
            ++next;
        }
        return label;
    }

    /// Branch positions whose removal increases the number of components.
    /// Iterative lowlink search keyed on the entering edge, so a parallel
    /// twin never counts as the tree edge back to the parent.
    [[nodiscard]] std::vector<std::size_t> bridges() const {
        constexpr std::size_t none = static_cast<std::size_t>(-1);
        const std::size_t n = node_count();
        std::vector<std::size_t> disc(n, none), low(n, 0);
        std::vector<std::size_t> out;
        struct Frame {
            std::size_t node;
            std::size_t parent_branch;
            std::size_t next_edge;
        };
        std::vector<Frame> stack;
        std::size_t time = 0;
        for (std::size_t root = 0; root < n; ++root) {
            if (!node_active_[root] || disc[root] != none) continue;
            disc[root] = low[root] = time++;
            stack.push_back({root, none, 0});
            while (!stack.empty()) {
                Frame& fr = stack.back();
                const auto& adj = adjacency_[fr.node];
                if (fr.next_edge < adj.size()) {
                    const Edge e = adj[fr.next_edge++];
                    if (e.branch_pos == fr.parent_branch) continue;
                    if (disc[e.to] == none) {
                        disc[e.to] = low[e.to] = time++;
                        stack.push_back({e.to, e.branch_pos, 0});
                    } else {
                        low[fr.node] = std::min(low[fr.node], disc[e.to]);
                    }
                } else {
                    const Frame done = fr;
                    stack.pop_back();
                    if (!stack.empty()) {
                        Frame& parent = stack.back();
                        low[parent.node] = std::min(low[parent.node], low[done.node]);
                        if (low[done.node] > disc[parent.node]) out.push_back(done.parent_branch);
                    }
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<char> node_active_;
    std::vector<std::vector<Edge>> adjacency_;
};

/// True iff every non-isolated bus is reachable over active branches.
[[nodiscard]] inline bool is_connected(const NetworkCase& c, const TopologyMask& mask = {}) {
    const auto label = BranchGraph(c, mask).component_labels();
    return std::all_of(label.begin(), label.end(), [](int l) { return l <= 0; });
}

/// Buses grouped by connected component, each group ascending by internal index.
[[nodiscard]] inline std::vector<std::vector<BusId>> connected_components(
    const NetworkCase& c, const TopologyMask& mask = {}) {
    const auto label = BranchGraph(c, mask).component_labels();
    int count = 0;
    for (int l : label) count = std::max(count, l + 1);
    std::vector<std::vector<BusId>> groups(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < label.size(); ++i)
        if (label[i] >= 0) groups[static_cast<std::size_t>(label[i])].push_back(c.buses()[i].id);
    return groups;
}

/// In-service branches whose single removal splits the network (bridges).
[[nodiscard]] inline std::vector<BranchId> radial_branches(const NetworkCase& c,
                                                           const TopologyMask& mask = {}) {
    std::vector<BranchId> out;
    for (std::size_t pos : BranchGraph(c, mask).bridges()) out.push_back(c.branches()[pos].id);
    return out;
}

struct SwitchingOptions {
    bool allow_transformers = true;
};

/// Active branches k for which case minus (mask + k) stays connected,
/// ascending by id. Precondition: case minus mask is connected.
[[nodiscard]] inline std::vector<BranchId> switchable_branches(const NetworkCase& c,
                                                               const TopologyMask& mask = {},
                                                               SwitchingOptions opts = {}) {
    const BranchGraph g(c, mask);
    const auto bridges = g.bridges();
    std::vector<BranchId> out;
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        if (!branch_active(c, mask, k)) continue;
        if (std::binary_search(bridges.begin(), bridges.end(), k)) continue;
        if (!opts.allow_transformers && c.branches()[k].transformer) continue;
        out.push_back(c.branches()[k].id);
    }
    return out;
}

}  // namespace gridswitch
