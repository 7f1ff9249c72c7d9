#include "blockinfer/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "blockinfer/errors.hpp"

namespace blockinfer {

UndirectedGraph::UndirectedGraph(int node_count,
                                 const std::vector<std::pair<int, int>>& edges)
    : node_count_(node_count) {
    if (node_count < 1) {
        throw ArgumentError("graph needs at least one node");
    }
    std::set<std::pair<int, int>> unique;
    for (auto [u, v] : edges) {
        if (u < 1 || u > node_count || v < 1 || v > node_count) {
            throw ArgumentError("edge endpoint out of range: (" + std::to_string(u) +
                                "," + std::to_string(v) + ")");
        }
        if (u == v) {
            throw ArgumentError("self-loop at node " + std::to_string(u));
        }
        unique.insert({std::min(u, v), std::max(u, v)});
    }
    edges_.assign(unique.begin(), unique.end());
    adjacency_.assign(node_count + 1, {});
    for (auto [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
    }
}

const NodeSet& UndirectedGraph::neighbors(int id) const {
    check_node(id);
    return adjacency_[id];
}

bool UndirectedGraph::has_edge(int u, int v) const {
    check_node(u);
    check_node(v);
    const auto& nbrs = adjacency_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

void UndirectedGraph::check_node(int id) const {
    if (id < 1 || id > node_count_) {
        throw ArgumentError("node id out of range: " + std::to_string(id));
    }
}

NodeSet neighbors_of_set(const UndirectedGraph& g, const NodeSet& s) {
    if (s.empty()) {
        throw ArgumentError("neighbors_of_set: empty set");
    }
    std::vector<char> in_s(g.node_count() + 1, 0), seen(g.node_count() + 1, 0);
    for (int id : s) {
        g.check_node(id);
        in_s[id] = 1;
    }
    NodeSet out;
    for (int id : s) {
        for (int v : g.neighbors(id)) {
            if (!in_s[v] && !seen[v]) {
                seen[v] = 1;
                out.push_back(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeSet> bfs_layers(const UndirectedGraph& g, const NodeSet& root) {
    if (root.empty()) {
        throw ArgumentError("bfs_layers: empty root");
    }
    std::vector<char> visited(g.node_count() + 1, 0);
    std::vector<NodeSet> layers;
    NodeSet layer = root;
    std::sort(layer.begin(), layer.end());
    for (int id : layer) {
        g.check_node(id);
        visited[id] = 1;
    }
    while (!layer.empty()) {
        layers.push_back(layer);
        NodeSet next;
        for (int id : layer) {
            for (int v : g.neighbors(id)) {
                if (!visited[v]) {
                    visited[v] = 1;
                    next.push_back(v);
                }
            }
        }
        std::sort(next.begin(), next.end());
        layer = std::move(next);
    }
    for (int id = 1; id <= g.node_count(); ++id) {
        if (!visited[id]) {
            throw DecompositionError("graph is disconnected: node " +
                                     std::to_string(id) + " unreachable from root");
        }
    }
    return layers;
}

std::vector<NodeSet> connected_components(const UndirectedGraph& g,
                                          const NodeSet& subset) {
    std::vector<char> in_sub(g.node_count() + 1, 0), visited(g.node_count() + 1, 0);
    for (int id : subset) {
        g.check_node(id);
        in_sub[id] = 1;
    }
    NodeSet sorted = subset;
    std::sort(sorted.begin(), sorted.end());
    std::vector<NodeSet> components;
    for (int start : sorted) {
        if (visited[start]) continue;
        NodeSet comp;
        std::deque<int> queue{start};
        visited[start] = 1;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            comp.push_back(u);
            for (int v : g.neighbors(u)) {
                if (in_sub[v] && !visited[v]) {
                    visited[v] = 1;
                    queue.push_back(v);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    return components;
}

bool is_connected(const UndirectedGraph& g) {
    auto comps = connected_components(g, [&] {
        NodeSet all(g.node_count());
        std::iota(all.begin(), all.end(), 1);
        return all;
    }());
    return comps.size() == 1;
}

UndirectedGraph gen_grid(int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw ArgumentError("grid dimensions must be positive");
    }
    std::vector<std::pair<int, int>> edges;
    auto id = [cols](int r, int c) { return r * cols + c + 1; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c)});
        }
    }
    return UndirectedGraph(rows * cols, edges);
}

UndirectedGraph gen_random_regular(int n, int degree, std::mt19937_64& rng,
                                   int max_retries) {
    if (degree >= n || degree < 0) {
        throw ArgumentError("degree must satisfy 0 <= degree < n");
    }
    if ((static_cast<long long>(n) * degree) % 2 != 0) {
        throw ArgumentError("n * degree must be even");
    }
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * degree);
        for (int v = 1; v <= n; ++v) {
            for (int d = 0; d < degree; ++d) stubs.push_back(v);
        }
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::set<std::pair<int, int>> edge_set;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) { ok = false; break; }
            auto e = std::make_pair(std::min(u, v), std::max(u, v));
            if (!edge_set.insert(e).second) { ok = false; break; }
        }
        if (!ok) continue;
        UndirectedGraph g(n, {edge_set.begin(), edge_set.end()});
        if (is_connected(g)) return g;
    }
    throw GenerationError("random regular generation: retry budget exhausted");
}

std::vector<std::pair<int, int>> induced_cluster_edges(
    const UndirectedGraph& g, const std::vector<NodeSet>& clusters) {
    std::vector<int> cluster_of(g.node_count() + 1, -1);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (int v : clusters[c]) cluster_of[v] = static_cast<int>(c);
    }
    for (int v = 1; v <= g.node_count(); ++v) {
        if (cluster_of[v] == -1) {
            throw ArgumentError("clusters do not cover node " + std::to_string(v));
        }
    }
    std::set<std::pair<int, int>> edge_set;
    for (auto [u, v] : g.edges()) {
        int a = cluster_of[u], b = cluster_of[v];
        if (a != b) {
            edge_set.insert({std::min(a, b), std::max(a, b)});
        }
    }
    return {edge_set.begin(), edge_set.end()};
}

UndirectedGraph read_edge_list(std::istream& in) {
    std::vector<std::pair<int, int>> edges;
    int declared = 0, max_id = 0;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "p") {
            if (!(ls >> declared) || declared < 1) {
                throw ArgumentError("edge list: bad header line");
            }
            continue;
        }
        int u = 0, v = 0;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw ArgumentError("edge list: bad token '" + first + "'");
        }
        if (!(ls >> v)) {
            throw ArgumentError("edge list: missing second endpoint");
        }
        edges.push_back({u, v});
        max_id = std::max({max_id, u, v});
    }
    int n = declared > 0 ? declared : max_id;
    if (n < 1) {
        throw ArgumentError("edge list: no nodes");
    }
    return UndirectedGraph(n, edges);
}

UndirectedGraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open graph file: " + path);
    }
    return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const UndirectedGraph& g) {
    out << "p " << g.node_count() << "\n";
    for (auto [u, v] : g.edges()) {
        out << u << " " << v << "\n";
    }
}

} // namespace blockinfer
