#ifndef BLOCKINFER_LIFT_HPP
#define BLOCKINFER_LIFT_HPP

#include <cstdint>
#include <vector>

#include "blockinfer/block_graph.hpp"
#include "blockinfer/model.hpp"

namespace blockinfer {

// Model over cluster-variables (variable c+1 for cluster index c) together
// with the coordinate maps needed to decode cluster states back to node
// states.  A cluster state index is mixed-radix over the members ascending,
// last member fastest-varying.
struct LiftedModel {
    FactorModel base;
    std::vector<NodeSet> members;                // per cluster, ascending
    std::vector<std::vector<int>> member_cards;  // per cluster, parallel
    std::vector<int> cluster_of;                 // node id -> cluster index
    std::vector<int> position_of;                // node id -> index in its cluster
    std::vector<std::vector<int>> provenance;    // lifted factor -> original factor ids
};

inline constexpr std::size_t kDefaultLiftedTableCap = std::size_t{1} << 24;

// Folds every original factor into the single lifted factor whose scope is
// the set of clusters covering it; block-graph edges carrying no factor get a
// constant-1 filler so the cluster topology stays visible to the engine.
// The decoded lifted joint equals the original joint.
LiftedModel lift_to_block_graph(const FactorModel& model, const BlockGraph& bg,
                                std::size_t table_cap = kDefaultLiftedTableCap);

// Sum each cluster marginal over all coordinates except the node's own,
// then renormalize.
MarginalSet project_node_marginals(const LiftedModel& lifted,
                                   const MarginalSet& cluster_marginals);

} // namespace blockinfer

#endif
