#ifndef BLOCKINFER_BLOCK_GRAPH_HPP
#define BLOCKINFER_BLOCK_GRAPH_HPP

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "blockinfer/graph.hpp"

namespace blockinfer {

// Partition of V into clusters of size <= m; cluster adjacency induced by
// crossing edges of the original graph.  Clusters ordered by smallest member.
struct BlockGraph {
    std::vector<NodeSet> clusters;
    std::vector<std::pair<int, int>> edges; // (i, j), i < j, sorted
    int max_cluster_size = 0;
};

// BFS layering, split oversized layer components into connected chunks of
// size <= m, then merge small same-layer clusters that share a next-layer
// neighbor (the long-cycle rule), never past size m.
BlockGraph build_block_graph(const UndirectedGraph& g, const NodeSet& root, int m);

// Baseline: oversized clusters split uniformly at random, no merging.
BlockGraph build_block_graph_random(const UndirectedGraph& g, const NodeSet& root,
                                    int m, std::mt19937_64& rng);

// Shortest cycle length of the cluster graph; 0 for forests.
int girth_proxy(const BlockGraph& bg);

std::string block_graph_to_json(const BlockGraph& bg);

} // namespace blockinfer

#endif
