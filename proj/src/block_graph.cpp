#include "blockinfer/block_graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

#include <json.hpp>

#include "blockinfer/decomposition.hpp"
#include "blockinfer/errors.hpp"

namespace blockinfer {

namespace {

int min_member(const NodeSet& s) { return s.front(); }

void sort_by_min(std::vector<NodeSet>& clusters) {
    std::sort(clusters.begin(), clusters.end(),
              [](const NodeSet& a, const NodeSet& b) { return min_member(a) < min_member(b); });
}

// Per-layer cluster lists from BFS plus induced components; layer 1 is the
// components of the root set.
std::vector<std::vector<NodeSet>> layered_components(const UndirectedGraph& g,
                                                     const NodeSet& root) {
    auto node_layers = bfs_layers(g, root);
    std::vector<std::vector<NodeSet>> layers(node_layers.size());
    for (std::size_t k = 0; k < node_layers.size(); ++k) {
        layers[k] = connected_components(g, node_layers[k]);
    }
    return layers;
}

// BFS order of a connected component from its lowest-id node, cut into
// consecutive chunks of size <= m so each chunk stays attached to the last.
std::vector<NodeSet> split_component_bfs(const UndirectedGraph& g,
                                         const NodeSet& comp, int m) {
    std::vector<char> in_comp(g.node_count() + 1, 0), visited(g.node_count() + 1, 0);
    for (int v : comp) in_comp[v] = 1;
    std::vector<int> order;
    std::deque<int> queue{comp.front()};
    visited[comp.front()] = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        order.push_back(u);
        for (int v : g.neighbors(u)) {
            if (in_comp[v] && !visited[v]) {
                visited[v] = 1;
                queue.push_back(v);
            }
        }
    }
    std::vector<NodeSet> chunks;
    for (std::size_t i = 0; i < order.size(); i += m) {
        NodeSet chunk(order.begin() + i,
                      order.begin() + std::min(order.size(), i + m));
        std::sort(chunk.begin(), chunk.end());
        chunks.push_back(std::move(chunk));
    }
    sort_by_min(chunks);
    return chunks;
}

std::vector<NodeSet> split_component_random(const NodeSet& comp, int m,
                                            std::mt19937_64& rng) {
    NodeSet shuffled = comp;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<NodeSet> chunks;
    for (std::size_t i = 0; i < shuffled.size(); i += m) {
        NodeSet chunk(shuffled.begin() + i,
                      shuffled.begin() + std::min(shuffled.size(), i + m));
        std::sort(chunk.begin(), chunk.end());
        chunks.push_back(std::move(chunk));
    }
    sort_by_min(chunks);
    return chunks;
}

// Cluster indices (into next_layer) adjacent to `cluster`.
std::set<int> next_layer_neighbors(const UndirectedGraph& g, const NodeSet& cluster,
                                   const std::vector<NodeSet>& next_layer,
                                   std::vector<int>& scratch_cluster_of) {
    std::set<int> result;
    for (int u : cluster) {
        for (int v : g.neighbors(u)) {
            int c = scratch_cluster_of[v];
            if (c >= 0) result.insert(c);
        }
    }
    (void)next_layer;
    return result;
}

BlockGraph finalize(const UndirectedGraph& g,
                    std::vector<std::vector<NodeSet>>& layers, int m) {
    BlockGraph bg;
    bg.max_cluster_size = m;
    for (auto& layer : layers) {
        for (auto& c : layer) bg.clusters.push_back(std::move(c));
    }
    sort_by_min(bg.clusters);
    bg.edges = induced_cluster_edges(g, bg.clusters);
    return bg;
}

} // namespace

BlockGraph build_block_graph(const UndirectedGraph& g, const NodeSet& root, int m) {
    if (m < 1) {
        throw ArgumentError("max cluster size m must be >= 1");
    }
    if (root.empty()) {
        throw ArgumentError("build_block_graph: empty root");
    }
    auto layers = layered_components(g, root);
    const int r = static_cast<int>(layers.size());

    // Step 2: split oversized components of the last layer.
    {
        std::vector<NodeSet> rebuilt;
        for (const auto& c : layers[r - 1]) {
            if (static_cast<int>(c.size()) > m) {
                for (auto& chunk : split_component_bfs(g, c, m)) {
                    rebuilt.push_back(std::move(chunk));
                }
            } else {
                rebuilt.push_back(c);
            }
        }
        sort_by_min(rebuilt);
        layers[r - 1] = std::move(rebuilt);
    }

    // Steps 3 and 4, top layer towards the root.
    for (int k = r - 2; k >= 0; --k) {
        std::vector<NodeSet> small, pieces;
        for (const auto& c : layers[k]) {
            if (static_cast<int>(c.size()) > m) {
                for (auto& chunk : split_component_bfs(g, c, m)) {
                    pieces.push_back(std::move(chunk));
                }
            } else {
                small.push_back(c);
            }
        }
        sort_by_min(small);

        // Step 4: greedily merge small clusters that share a neighbor in the
        // (already final) next layer, while the merged size stays within m.
        std::vector<int> next_cluster_of(g.node_count() + 1, -1);
        for (std::size_t c = 0; c < layers[k + 1].size(); ++c) {
            for (int v : layers[k + 1][c]) next_cluster_of[v] = static_cast<int>(c);
        }
        std::vector<std::set<int>> nbrs;
        nbrs.reserve(small.size());
        for (const auto& c : small) {
            nbrs.push_back(next_layer_neighbors(g, c, layers[k + 1], next_cluster_of));
        }
        bool merged = true;
        while (merged) {
            merged = false;
            for (std::size_t i = 0; i < small.size() && !merged; ++i) {
                for (std::size_t j = i + 1; j < small.size() && !merged; ++j) {
                    if (static_cast<int>(small[i].size() + small[j].size()) > m) continue;
                    std::vector<int> common;
                    std::set_intersection(nbrs[i].begin(), nbrs[i].end(),
                                          nbrs[j].begin(), nbrs[j].end(),
                                          std::back_inserter(common));
                    if (common.empty()) continue;
                    small[i].insert(small[i].end(), small[j].begin(), small[j].end());
                    std::sort(small[i].begin(), small[i].end());
                    nbrs[i].insert(nbrs[j].begin(), nbrs[j].end());
                    small.erase(small.begin() + j);
                    nbrs.erase(nbrs.begin() + j);
                    sort_by_min(small); // keep the (min-id, min-id) scan order
                    // nbrs must follow the re-sort; rebuild alongside
                    std::vector<std::set<int>> rebuilt;
                    rebuilt.reserve(small.size());
                    for (const auto& c : small) {
                        rebuilt.push_back(next_layer_neighbors(g, c, layers[k + 1],
                                                               next_cluster_of));
                    }
                    nbrs = std::move(rebuilt);
                    merged = true;
                }
            }
        }
        small.insert(small.end(), pieces.begin(), pieces.end());
        sort_by_min(small);
        layers[k] = std::move(small);
    }
    return finalize(g, layers, m);
}

BlockGraph build_block_graph_random(const UndirectedGraph& g, const NodeSet& root,
                                    int m, std::mt19937_64& rng) {
    if (m < 1) {
        throw ArgumentError("max cluster size m must be >= 1");
    }
    if (root.empty()) {
        throw ArgumentError("build_block_graph_random: empty root");
    }
    // baseline: random splits of oversized block-tree clusters, no merging
    auto bt = build_block_tree(g, root);
    BlockGraph bg;
    bg.max_cluster_size = m;
    for (const auto& c : bt.clusters) {
        if (static_cast<int>(c.size()) > m) {
            for (auto& chunk : split_component_random(c, m, rng)) {
                bg.clusters.push_back(std::move(chunk));
            }
        } else {
            bg.clusters.push_back(c);
        }
    }
    sort_by_min(bg.clusters);
    bg.edges = induced_cluster_edges(g, bg.clusters);
    return bg;
}

int girth_proxy(const BlockGraph& bg) {
    const int n = static_cast<int>(bg.clusters.size());
    std::vector<std::vector<int>> adj(n);
    for (auto [i, j] : bg.edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    int best = std::numeric_limits<int>::max();
    // For each edge, shortest alternative path between its endpoints.
    for (auto [s, t] : bg.edges) {
        std::vector<int> dist(n, -1);
        std::deque<int> queue{s};
        dist[s] = 0;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : adj[u]) {
                if (u == s && v == t) continue; // skip the edge itself
                if (dist[v] == -1) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if (dist[t] > 0) best = std::min(best, dist[t] + 1);
    }
    return best == std::numeric_limits<int>::max() ? 0 : best;
}

std::string block_graph_to_json(const BlockGraph& bg) {
    nlohmann::json j;
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : bg.clusters) clusters.push_back(c);
    j["clusters"] = clusters;
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : bg.edges) edges.push_back(nlohmann::json::array({a, b}));
    j["edges"] = edges;
    j["m"] = bg.max_cluster_size;
    return j.dump(2);
}

} // namespace blockinfer
