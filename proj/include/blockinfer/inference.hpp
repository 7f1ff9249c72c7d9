#ifndef BLOCKINFER_INFERENCE_HPP
#define BLOCKINFER_INFERENCE_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "blockinfer/decomposition.hpp"
#include "blockinfer/lift.hpp"
#include "blockinfer/model.hpp"

namespace blockinfer {

enum class BpSchedule { SequentialFixed, Parallel };

struct BpSettings {
    int max_iterations = 1000;
    double convergence_tolerance = 1e-9;
    BpSchedule schedule = BpSchedule::SequentialFixed;
    double damping = 0.0; // in [0, 1)
};

struct InferenceReport {
    MarginalSet marginals;
    bool converged = false;
    int iterations = 0;
    double wall_seconds = 0.0;
};

// Sum-product message passing on the factor graph; messages normalized after
// each update, factors visited in sorted-scope order.  Stops when the mean
// absolute change across all belief entries drops below the tolerance.
// Exact on acyclic factor graphs.
InferenceReport belief_propagation(const FactorModel& model,
                                   const BpSettings& settings = {});

inline constexpr std::size_t kBruteForceStateCap = std::size_t{1} << 22;

// Ground-truth oracle: full joint enumeration.
MarginalSet exact_brute_force(const FactorModel& model,
                              std::size_t state_cap = kBruteForceStateCap);

inline constexpr std::size_t kEliminationTableCap = std::size_t{1} << 24;

// Exact marginals via junction-tree calibration over a min-fill
// triangulation.  Throws CapacityError when the induced width is too large.
MarginalSet exact_elimination(const FactorModel& model,
                              std::size_t table_cap = kEliminationTableCap);

struct RootPolicy {
    enum class Kind { Heuristic, Explicit };
    Kind kind = Kind::Heuristic;
    RootHeuristic heuristic = RootHeuristic::GreedyFillin;
    NodeSet explicit_root;

    static RootPolicy heuristic_policy(RootHeuristic h) {
        return {Kind::Heuristic, h, {}};
    }
    static RootPolicy explicit_policy(NodeSet root) {
        return {Kind::Explicit, RootHeuristic::GreedyFillin, std::move(root)};
    }
};

struct GeneralizedOptions {
    int m = 2;
    RootPolicy root;
    bool random_split = false;    // random-split baseline instead of the
                                  // merge-rule builder
    std::uint64_t split_seed = 0; // rng stream for the baseline
    BpSettings settings;
};

using EngineFn =
    std::function<InferenceReport(const FactorModel&, const BpSettings&)>;

// The block-graph wrapper: decompose, lift, run the engine on the lifted
// model, project cluster marginals back to node marginals.  Wall time covers
// all four stages.
InferenceReport generalized_inference(const FactorModel& model,
                                      const UndirectedGraph& g,
                                      const GeneralizedOptions& opts,
                                      const EngineFn& engine = belief_propagation);

std::string report_to_json(const InferenceReport& report);

} // namespace blockinfer

#endif
