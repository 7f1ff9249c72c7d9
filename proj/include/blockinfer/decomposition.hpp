#ifndef BLOCKINFER_DECOMPOSITION_HPP
#define BLOCKINFER_DECOMPOSITION_HPP

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "blockinfer/graph.hpp"

namespace blockinfer {

// Tree over non-overlapping clusters covering all of V.  Cluster indices are
// 0-based positions into `clusters`; clusters are sorted node sets ordered by
// smallest member.
struct BlockTree {
    std::vector<NodeSet> clusters;
    std::vector<std::pair<int, int>> edges; // (i, j) with i < j, sorted
    std::vector<int> layer_of;              // layer number (1-based) per cluster
    int root_cluster_index = 0;
};

struct JunctionTree {
    std::vector<NodeSet> cliques;
    std::vector<std::pair<int, int>> edges;
    std::vector<NodeSet> separators; // parallel to edges

    int width() const; // max clique size - 1
};

using EliminationOrder = std::vector<int>; // permutation of 1..node_count

enum class RootHeuristic { MinDegree, GreedyDegree, GreedyFillin };

RootHeuristic parse_root_heuristic(const std::string& name);

// BFS layering from the root cluster followed by the backwards merge pass:
// for each layer-i component, the layer-(i-1) clusters it touches are merged
// into one, so every cluster has a unique parent.
BlockTree build_block_tree(const UndirectedGraph& g, const NodeSet& root);

// max over tree edges of |V_i| + |V_j| (single cluster: its size).
int block_tree_width(const BlockTree& bt);

// One clique per block-tree edge (union of its two clusters), wired so the
// running intersection property holds.  Width is block_tree_width - 1.
JunctionTree to_junction_tree(const BlockTree& bt);

struct TriangulationResult {
    std::vector<std::pair<int, int>> fill_edges;
    std::vector<NodeSet> cliques; // maximal cliques of the chordal fill-in
};

// Simulated elimination along `order`: neighbors of each eliminated node get
// pairwise connected; elimination cliques are subset-filtered to maximal.
TriangulationResult triangulate(const UndirectedGraph& g, const EliminationOrder& order);

// Static sort by increasing initial degree (ties by id).
EliminationOrder greedy_degree_order(const UndirectedGraph& g);

// Dynamic min-fill: each step eliminates the node adding fewest fill edges.
EliminationOrder greedy_fillin_order(const UndirectedGraph& g);

// Root cluster per heuristic.  MinDegree returns a singleton; the elimination
// based heuristics rank triangulation cliques by size, build a block tree per
// candidate (up to candidate_budget) and keep the one with smallest width.
NodeSet select_root(const UndirectedGraph& g, RootHeuristic heuristic,
                    int candidate_budget = 10);

// Graphs with a known block structure: consecutive clusters of size k, a
// uniform random tree over clusters, cliques within and across tree-adjacent
// clusters, then a fraction of edges removed while keeping the graph
// connected.
UndirectedGraph synth_block_structured(int n, int k, double removal_fraction,
                                       std::mt19937_64& rng);

std::string block_tree_to_json(const BlockTree& bt);
std::string junction_tree_to_json(const JunctionTree& jt);

} // namespace blockinfer

#endif
