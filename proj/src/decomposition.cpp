#include "blockinfer/decomposition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include <json.hpp>

#include "blockinfer/errors.hpp"

namespace blockinfer {

namespace {

// Union-find over node ids; clusters are the disjoint sets.
struct NodeDsu {
    std::vector<int> parent;
    explicit NodeDsu(int n) : parent(n + 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

BlockTree build_block_tree(const UndirectedGraph& g, const NodeSet& root) {
    if (root.empty()) {
        throw ArgumentError("build_block_tree: empty root");
    }
    auto node_layers = bfs_layers(g, root);
    const int r = static_cast<int>(node_layers.size());
    std::vector<int> layer_of_node(g.node_count() + 1, 0);
    for (int k = 0; k < r; ++k) {
        for (int v : node_layers[k]) layer_of_node[v] = k + 1;
    }

    // Forward: clusters seeded with the per-layer induced components (the
    // root is one cluster by definition).
    NodeDsu dsu(g.node_count());
    for (int v : node_layers[0]) dsu.unite(v, node_layers[0].front());
    for (int k = 1; k < r; ++k) {
        for (const auto& comp : connected_components(g, node_layers[k])) {
            for (int v : comp) dsu.unite(v, comp.front());
        }
    }

    // Backwards: every cluster of layer i glues together all layer-(i-1)
    // clusters it touches, leaving it a unique parent.
    for (int i = r; i >= 3; --i) {
        std::map<int, int> anchor; // layer-i cluster rep -> a layer-(i-1) node
        for (int u : node_layers[i - 1]) {
            int rep = dsu.find(u);
            for (int v : g.neighbors(u)) {
                if (layer_of_node[v] != i - 1) continue;
                auto [it, fresh] = anchor.try_emplace(rep, v);
                if (!fresh) dsu.unite(v, it->second);
            }
        }
    }

    // Collect clusters ordered by (layer, smallest member).
    std::vector<int> rep_to_cluster(g.node_count() + 1, -1);
    BlockTree bt;
    for (int k = 0; k < r; ++k) {
        std::vector<std::pair<int, int>> reps; // (min member, rep)
        std::vector<char> seen(g.node_count() + 1, 0);
        for (int v : node_layers[k]) {
            int rep = dsu.find(v);
            if (!seen[rep]) {
                seen[rep] = 1;
                reps.push_back({v, rep}); // node_layers sorted, v is the min
            }
        }
        std::sort(reps.begin(), reps.end());
        for (auto [mn, rep] : reps) {
            rep_to_cluster[rep] = static_cast<int>(bt.clusters.size());
            bt.clusters.emplace_back();
            bt.layer_of.push_back(k + 1);
        }
        for (int v : node_layers[k]) {
            bt.clusters[rep_to_cluster[dsu.find(v)]].push_back(v);
        }
    }
    for (auto& c : bt.clusters) std::sort(c.begin(), c.end());
    bt.root_cluster_index = 0;
    bt.edges = induced_cluster_edges(g, bt.clusters);

    if (bt.edges.size() + 1 != bt.clusters.size()) {
        throw DecompositionError("block-tree construction produced a non-tree");
    }
    return bt;
}

int block_tree_width(const BlockTree& bt) {
    if (bt.clusters.size() == 1) {
        return static_cast<int>(bt.clusters[0].size());
    }
    int width = 0;
    for (auto [i, j] : bt.edges) {
        width = std::max(width, static_cast<int>(bt.clusters[i].size() +
                                                 bt.clusters[j].size()));
    }
    return width;
}

int JunctionTree::width() const {
    int w = 0;
    for (const auto& c : cliques) w = std::max(w, static_cast<int>(c.size()));
    return w - 1;
}

JunctionTree to_junction_tree(const BlockTree& bt) {
    JunctionTree jt;
    const int n = static_cast<int>(bt.clusters.size());
    if (n == 1) {
        jt.cliques.push_back(bt.clusters[0]);
        return jt;
    }

    // Root the tree; one clique per (parent, child) edge.
    std::vector<std::vector<int>> adj(n);
    for (auto [i, j] : bt.edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    std::vector<int> parent(n, -1);
    std::vector<int> order;
    std::queue<int> queue;
    queue.push(bt.root_cluster_index);
    parent[bt.root_cluster_index] = bt.root_cluster_index;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop();
        order.push_back(u);
        for (int v : adj[u]) {
            if (parent[v] == -1) {
                parent[v] = u;
                queue.push(v);
            }
        }
    }

    std::vector<int> clique_of(n, -1); // per child cluster
    for (int u : order) {
        if (u == bt.root_cluster_index) continue;
        NodeSet clique = bt.clusters[parent[u]];
        clique.insert(clique.end(), bt.clusters[u].begin(), bt.clusters[u].end());
        std::sort(clique.begin(), clique.end());
        clique_of[u] = static_cast<int>(jt.cliques.size());
        jt.cliques.push_back(std::move(clique));
    }

    // A child clique joins its parent's clique; the root's children (which all
    // share the root cluster) are chained off the first one.
    int first_root_child = -1;
    for (int u : order) {
        if (u == bt.root_cluster_index) continue;
        int p = parent[u];
        if (p == bt.root_cluster_index) {
            if (first_root_child == -1) {
                first_root_child = u;
            } else {
                jt.edges.push_back({std::min(clique_of[first_root_child], clique_of[u]),
                                    std::max(clique_of[first_root_child], clique_of[u])});
            }
        } else {
            jt.edges.push_back({std::min(clique_of[p], clique_of[u]),
                                std::max(clique_of[p], clique_of[u])});
        }
    }
    std::sort(jt.edges.begin(), jt.edges.end());
    for (auto [a, b] : jt.edges) {
        NodeSet sep;
        std::set_intersection(jt.cliques[a].begin(), jt.cliques[a].end(),
                              jt.cliques[b].begin(), jt.cliques[b].end(),
                              std::back_inserter(sep));
        jt.separators.push_back(std::move(sep));
    }
    return jt;
}

TriangulationResult triangulate(const UndirectedGraph& g,
                                const EliminationOrder& order) {
    const int n = g.node_count();
    {
        std::vector<char> seen(n + 1, 0);
        if (static_cast<int>(order.size()) != n) {
            throw ArgumentError("elimination order has wrong length");
        }
        for (int v : order) {
            g.check_node(v);
            if (seen[v]) throw ArgumentError("elimination order repeats a node");
            seen[v] = 1;
        }
    }

    std::vector<std::set<int>> adj(n + 1);
    for (auto [u, v] : g.edges()) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    std::vector<char> eliminated(n + 1, 0);
    TriangulationResult result;
    std::vector<NodeSet> elim_cliques;
    for (int v : order) {
        NodeSet nbrs;
        for (int u : adj[v]) {
            if (!eliminated[u]) nbrs.push_back(u);
        }
        for (std::size_t a = 0; a < nbrs.size(); ++a) {
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                int x = nbrs[a], y = nbrs[b];
                if (adj[x].insert(y).second) {
                    adj[y].insert(x);
                    result.fill_edges.push_back({std::min(x, y), std::max(x, y)});
                }
            }
        }
        NodeSet clique = nbrs;
        clique.push_back(v);
        std::sort(clique.begin(), clique.end());
        elim_cliques.push_back(std::move(clique));
        eliminated[v] = 1;
    }
    std::sort(result.fill_edges.begin(), result.fill_edges.end());

    // Subset-filter to maximal cliques.
    std::sort(elim_cliques.begin(), elim_cliques.end(),
              [](const NodeSet& a, const NodeSet& b) { return a.size() > b.size(); });
    for (const auto& c : elim_cliques) {
        bool maximal = true;
        for (const auto& kept : result.cliques) {
            if (std::includes(kept.begin(), kept.end(), c.begin(), c.end())) {
                maximal = false;
                break;
            }
        }
        if (maximal) result.cliques.push_back(c);
    }
    std::sort(result.cliques.begin(), result.cliques.end());
    return result;
}

EliminationOrder greedy_degree_order(const UndirectedGraph& g) {
    EliminationOrder order(g.node_count());
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return g.degree(a) < g.degree(b);
    });
    return order;
}

EliminationOrder greedy_fillin_order(const UndirectedGraph& g) {
    const int n = g.node_count();
    std::vector<std::set<int>> adj(n + 1);
    for (auto [u, v] : g.edges()) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    std::vector<char> eliminated(n + 1, 0);
    EliminationOrder order;
    order.reserve(n);
    auto fill_count = [&](int v) {
        NodeSet nbrs(adj[v].begin(), adj[v].end());
        int fills = 0;
        for (std::size_t a = 0; a < nbrs.size(); ++a) {
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                if (!adj[nbrs[a]].count(nbrs[b])) ++fills;
            }
        }
        return fills;
    };
    for (int step = 0; step < n; ++step) {
        int best = -1, best_fill = -1;
        for (int v = 1; v <= n; ++v) {
            if (eliminated[v]) continue;
            int f = fill_count(v);
            if (best == -1 || f < best_fill) {
                best = v;
                best_fill = f;
            }
        }
        NodeSet nbrs(adj[best].begin(), adj[best].end());
        for (std::size_t a = 0; a < nbrs.size(); ++a) {
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                adj[nbrs[a]].insert(nbrs[b]);
                adj[nbrs[b]].insert(nbrs[a]);
            }
        }
        for (int u : nbrs) adj[u].erase(best);
        adj[best].clear();
        eliminated[best] = 1;
        order.push_back(best);
    }
    return order;
}

RootHeuristic parse_root_heuristic(const std::string& name) {
    if (name == "min-degree") return RootHeuristic::MinDegree;
    if (name == "greedy-degree") return RootHeuristic::GreedyDegree;
    if (name == "greedy-fillin") return RootHeuristic::GreedyFillin;
    throw ArgumentError("unknown root heuristic: " + name);
}

NodeSet select_root(const UndirectedGraph& g, RootHeuristic heuristic,
                    int candidate_budget) {
    if (candidate_budget < 1) {
        throw ArgumentError("candidate_budget must be >= 1");
    }
    if (heuristic == RootHeuristic::MinDegree) {
        int best = 1;
        for (int v = 2; v <= g.node_count(); ++v) {
            if (g.degree(v) < g.degree(best)) best = v;
        }
        return {best};
    }
    EliminationOrder order = heuristic == RootHeuristic::GreedyDegree
                                 ? greedy_degree_order(g)
                                 : greedy_fillin_order(g);
    auto tri = triangulate(g, order);
    auto candidates = tri.cliques;
    std::sort(candidates.begin(), candidates.end(),
              [](const NodeSet& a, const NodeSet& b) {
                  if (a.size() != b.size()) return a.size() > b.size();
                  return a < b;
              });
    if (static_cast<int>(candidates.size()) > candidate_budget) {
        candidates.resize(candidate_budget);
    }
    // the min-degree singleton costs one extra evaluation and wins whenever
    // large-clique roots are counterproductive (paths, sparse graphs)
    candidates.push_back(select_root(g, RootHeuristic::MinDegree));

    std::vector<int> widths(candidates.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
        widths[i] = block_tree_width(build_block_tree(g, candidates[i]));
    }
    int best = 0;
    for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
        if (widths[i] < widths[best] ||
            (widths[i] == widths[best] && candidates[i] < candidates[best])) {
            best = i;
        }
    }
    return candidates[best];
}

UndirectedGraph synth_block_structured(int n, int k, double removal_fraction,
                                       std::mt19937_64& rng) {
    if (k < 1 || k > n) {
        throw ArgumentError("need 1 <= k <= n");
    }
    if (removal_fraction < 0.0 || removal_fraction >= 1.0) {
        throw ArgumentError("removal_fraction must be in [0, 1)");
    }
    const int c = (n + k - 1) / k;
    std::vector<NodeSet> clusters(c);
    for (int v = 1; v <= n; ++v) {
        clusters[(v - 1) / k].push_back(v);
    }

    // Uniform random tree over clusters via a random Pruefer sequence.
    std::vector<std::pair<int, int>> tree_edges;
    if (c == 2) {
        tree_edges.push_back({0, 1});
    } else if (c > 2) {
        std::uniform_int_distribution<int> pick(0, c - 1);
        std::vector<int> pruefer(c - 2);
        for (auto& x : pruefer) x = pick(rng);
        std::vector<int> deg(c, 1);
        for (int x : pruefer) ++deg[x];
        std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
        for (int v = 0; v < c; ++v) {
            if (deg[v] == 1) leaves.push(v);
        }
        for (int x : pruefer) {
            int leaf = leaves.top();
            leaves.pop();
            tree_edges.push_back({std::min(leaf, x), std::max(leaf, x)});
            if (--deg[x] == 1) leaves.push(x);
        }
        int a = leaves.top();
        leaves.pop();
        int b = leaves.top();
        tree_edges.push_back({std::min(a, b), std::max(a, b)});
    }

    std::set<std::pair<int, int>> edge_set;
    auto add = [&](int u, int v) { edge_set.insert({std::min(u, v), std::max(u, v)}); };
    for (const auto& cluster : clusters) {
        for (std::size_t a = 0; a < cluster.size(); ++a) {
            for (std::size_t b = a + 1; b < cluster.size(); ++b) {
                add(cluster[a], cluster[b]);
            }
        }
    }
    for (auto [a, b] : tree_edges) {
        for (int u : clusters[a]) {
            for (int v : clusters[b]) add(u, v);
        }
    }

    std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
    int target = static_cast<int>(removal_fraction * edges.size());
    std::shuffle(edges.begin(), edges.end(), rng);
    std::vector<char> removed(edges.size(), 0);
    int done = 0;
    for (std::size_t i = 0; i < edges.size() && done < target; ++i) {
        removed[i] = 1;
        std::vector<std::pair<int, int>> remaining;
        for (std::size_t j = 0; j < edges.size(); ++j) {
            if (!removed[j]) remaining.push_back(edges[j]);
        }
        if (is_connected(UndirectedGraph(n, remaining))) {
            ++done;
        } else {
            removed[i] = 0; // this removal would disconnect; skip it
        }
    }
    std::vector<std::pair<int, int>> remaining;
    for (std::size_t j = 0; j < edges.size(); ++j) {
        if (!removed[j]) remaining.push_back(edges[j]);
    }
    return UndirectedGraph(n, remaining);
}

namespace {

nlohmann::json clusters_to_json(const std::vector<NodeSet>& clusters) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : clusters) arr.push_back(c);
    return arr;
}

nlohmann::json edges_to_json(const std::vector<std::pair<int, int>>& edges) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto [i, j] : edges) arr.push_back(nlohmann::json::array({i, j}));
    return arr;
}

} // namespace

std::string block_tree_to_json(const BlockTree& bt) {
    nlohmann::json j;
    j["clusters"] = clusters_to_json(bt.clusters);
    j["edges"] = edges_to_json(bt.edges);
    j["root"] = bt.root_cluster_index;
    j["layers"] = bt.layer_of;
    return j.dump(2);
}

std::string junction_tree_to_json(const JunctionTree& jt) {
    nlohmann::json j;
    j["clusters"] = clusters_to_json(jt.cliques);
    j["edges"] = edges_to_json(jt.edges);
    j["separators"] = clusters_to_json(jt.separators);
    return j.dump(2);
}

} // namespace blockinfer
