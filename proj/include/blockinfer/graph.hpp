#ifndef BLOCKINFER_GRAPH_HPP
#define BLOCKINFER_GRAPH_HPP

#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace blockinfer {

// Sorted list of distinct 1-based node ids.
using NodeSet = std::vector<int>;

// Simple undirected graph with contiguous 1-based node ids.
// Immutable after construction; no self-loops, no parallel edges.
class UndirectedGraph {
public:
    UndirectedGraph(int node_count, const std::vector<std::pair<int, int>>& edges);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    // Neighbor list of node id, sorted ascending.
    const NodeSet& neighbors(int id) const;

    // Edges as (u, v) with u < v, sorted lexicographically.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    bool has_edge(int u, int v) const;
    int degree(int id) const { return static_cast<int>(neighbors(id).size()); }

    void check_node(int id) const;

private:
    int node_count_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<NodeSet> adjacency_; // index 0 unused
};

// { v not in s : some u in s with (u,v) in E }, sorted.
NodeSet neighbors_of_set(const UndirectedGraph& g, const NodeSet& s);

// BFS layering from a root set: L1 = root, L_{k+1} = N(L_k) \ (L_{k-1} u L_k).
// Layers partition V; throws DecompositionError naming an unreached node if g
// is disconnected from the root.
std::vector<NodeSet> bfs_layers(const UndirectedGraph& g, const NodeSet& root);

// Connected components of the subgraph induced by `subset`, each sorted,
// ordered by smallest member id.
std::vector<NodeSet> connected_components(const UndirectedGraph& g, const NodeSet& subset);

bool is_connected(const UndirectedGraph& g);

// 4-neighbor lattice with row-major 1-based ids.
UndirectedGraph gen_grid(int rows, int cols);

// Random simple connected regular graph via the pairing model with rejection.
UndirectedGraph gen_random_regular(int n, int degree, std::mt19937_64& rng,
                                   int max_retries = 1000);

// Cluster-index pairs (i, j) with i < j, sorted, for every pair of clusters
// joined by at least one crossing edge of g.  Clusters must partition V.
std::vector<std::pair<int, int>> induced_cluster_edges(
    const UndirectedGraph& g, const std::vector<NodeSet>& clusters);

// Edge-list text format: optional "p <node_count>" header, one "u v" per
// line, '#' starts a comment.
UndirectedGraph read_edge_list(std::istream& in);
UndirectedGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const UndirectedGraph& g);

} // namespace blockinfer

#endif
