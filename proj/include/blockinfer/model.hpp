#ifndef BLOCKINFER_MODEL_HPP
#define BLOCKINFER_MODEL_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "blockinfer/graph.hpp"

namespace blockinfer {

// Dense potential over a sorted variable scope.  Table is mixed-radix
// indexed: members ascending, LAST member fastest-varying.
struct Factor {
    NodeSet scope;
    std::vector<double> table;
};

// Discrete factorized model over 1-based variable ids with positive tables.
struct FactorModel {
    std::vector<int> cardinalities; // index 0 unused
    std::vector<Factor> factors;

    int variable_count() const { return static_cast<int>(cardinalities.size()) - 1; }
    int cardinality(int id) const { return cardinalities[id]; }

    // Throws if a table is non-positive, sized wrong, or a scope is invalid.
    void validate() const;

    // Graph with an edge for every within-scope variable pair.
    UndirectedGraph to_graph() const;
};

// Per-variable probability vectors, indexed by variable id (slot 0 unused).
using MarginalSet = std::vector<std::vector<double>>;

enum class PotentialKind { REP, ATT, MIX };

PotentialKind parse_potential_kind(const std::string& name);
std::string potential_kind_name(PotentialKind kind);

struct IsingConfig {
    PotentialKind potential_kind = PotentialKind::REP;
    double interaction_strength = 1.0; // variance of the couplings b_ij
    double field_scale = 0.1;          // variance of the fields a_i
    std::uint64_t seed = 0;
};

// Binary model with states ordered (-1, +1): node potentials exp(-a_i x_i),
// edge potentials exp(-+ b x_i x_j) per the REP/ATT/MIX convention.  Draws
// consume the seeded stream nodes-ascending then edges-lexicographic.
FactorModel ising_model(const UndirectedGraph& g, const IsingConfig& cfg);

// Mixed-radix helpers (last coordinate fastest).
std::size_t mixed_radix_encode(const std::vector<int>& digits,
                               const std::vector<int>& radices);
std::vector<int> mixed_radix_decode(std::size_t index,
                                    const std::vector<int>& radices);

std::string model_to_json(const FactorModel& model);
FactorModel model_from_json(const std::string& text);
FactorModel read_model_file(const std::string& path);
void write_model_file(const std::string& path, const FactorModel& model);

} // namespace blockinfer

#endif
