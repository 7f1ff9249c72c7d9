#ifndef BLOCKINFER_TEST_HELPERS_HPP
#define BLOCKINFER_TEST_HELPERS_HPP

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "blockinfer/graph.hpp"

namespace test_helpers {

// 3x3 grid minus the 1-2 edge; shared fixture across the suites.
inline blockinfer::UndirectedGraph partial_grid() {
    return blockinfer::UndirectedGraph(
        9, {{2, 3}, {3, 6}, {6, 9}, {9, 8}, {8, 7}, {7, 4}, {4, 1}, {4, 5},
            {5, 6}, {2, 5}, {5, 8}});
}

// Random connected graph: a random spanning tree plus `extra` random edges.
inline blockinfer::UndirectedGraph random_connected_graph(int n, int extra,
                                                          std::mt19937_64& rng) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i + 1;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        edges.push_back({perm[pick(rng)], perm[i]});
    }
    std::uniform_int_distribution<int> node(1, n);
    std::set<std::pair<int, int>> have;
    for (auto [u, v] : edges) {
        have.insert({std::min(u, v), std::max(u, v)});
    }
    int added = 0, attempts = 0;
    while (added < extra && attempts++ < 20 * (extra + 1)) {
        int u = node(rng), v = node(rng);
        if (u == v) continue;
        auto e = std::make_pair(std::min(u, v), std::max(u, v));
        if (have.insert(e).second) {
            edges.push_back(e);
            ++added;
        }
    }
    return blockinfer::UndirectedGraph(n, edges);
}

// Clusters as an order-insensitive set of node sets.
inline std::set<blockinfer::NodeSet> cluster_set(
    const std::vector<blockinfer::NodeSet>& clusters) {
    return {clusters.begin(), clusters.end()};
}

// Cluster-level edges by content rather than index.
inline std::set<std::pair<blockinfer::NodeSet, blockinfer::NodeSet>> edge_set(
    const std::vector<blockinfer::NodeSet>& clusters,
    const std::vector<std::pair<int, int>>& edges) {
    std::set<std::pair<blockinfer::NodeSet, blockinfer::NodeSet>> out;
    for (auto [i, j] : edges) {
        auto a = clusters[i], b = clusters[j];
        if (b < a) std::swap(a, b);
        out.insert({a, b});
    }
    return out;
}

} // namespace test_helpers

#endif
