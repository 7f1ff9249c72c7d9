#include "blockinfer/lift.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "blockinfer/errors.hpp"

namespace blockinfer {

namespace {

std::string cluster_list_str(const std::vector<int>& clusters) {
    std::string s = "{";
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(clusters[i]);
    }
    return s + "}";
}

} // namespace

LiftedModel lift_to_block_graph(const FactorModel& model, const BlockGraph& bg,
                                std::size_t table_cap) {
    model.validate();
    const int n = model.variable_count();

    LiftedModel lifted;
    lifted.members = bg.clusters;
    lifted.cluster_of.assign(n + 1, -1);
    lifted.position_of.assign(n + 1, -1);
    for (std::size_t c = 0; c < bg.clusters.size(); ++c) {
        for (std::size_t p = 0; p < bg.clusters[c].size(); ++p) {
            int v = bg.clusters[c][p];
            if (v < 1 || v > n) {
                throw ArgumentError("block-graph covers unknown variable " +
                                    std::to_string(v));
            }
            lifted.cluster_of[v] = static_cast<int>(c);
            lifted.position_of[v] = static_cast<int>(p);
        }
    }
    for (int v = 1; v <= n; ++v) {
        if (lifted.cluster_of[v] == -1) {
            throw ArgumentError("block-graph does not cover variable " +
                                std::to_string(v));
        }
    }
    lifted.member_cards.resize(bg.clusters.size());
    std::vector<std::size_t> cluster_card(bg.clusters.size());
    for (std::size_t c = 0; c < bg.clusters.size(); ++c) {
        std::size_t card = 1;
        for (int v : bg.clusters[c]) {
            lifted.member_cards[c].push_back(model.cardinality(v));
            card *= static_cast<std::size_t>(model.cardinality(v));
        }
        cluster_card[c] = card;
        if (card > table_cap) {
            throw CapacityError("cluster " + cluster_list_str(bg.clusters[c]) +
                                " has state space beyond the cap");
        }
    }

    lifted.base.cardinalities.assign(bg.clusters.size() + 1, 0);
    for (std::size_t c = 0; c < bg.clusters.size(); ++c) {
        lifted.base.cardinalities[c + 1] = static_cast<int>(cluster_card[c]);
    }

    // Group original factors by the set of clusters covering their scope.
    std::map<std::vector<int>, std::vector<int>> groups;
    for (std::size_t fi = 0; fi < model.factors.size(); ++fi) {
        std::vector<int> covering;
        for (int v : model.factors[fi].scope) {
            covering.push_back(lifted.cluster_of[v]);
        }
        std::sort(covering.begin(), covering.end());
        covering.erase(std::unique(covering.begin(), covering.end()), covering.end());
        groups[covering].push_back(static_cast<int>(fi));
    }
    // Constant-1 filler on block-graph edges carrying no factor.
    for (auto [a, b] : bg.edges) {
        groups.try_emplace({a, b});
    }

    std::vector<int> node_state(n + 1, 0);
    for (const auto& [covering, factor_ids] : groups) {
        Factor out;
        std::vector<int> scope_cards;
        std::size_t table_size = 1;
        for (int c : covering) {
            out.scope.push_back(c + 1);
            scope_cards.push_back(static_cast<int>(cluster_card[c]));
            if (table_size > table_cap / cluster_card[c]) {
                throw CapacityError("lifted factor over clusters " +
                                    cluster_list_str(covering) +
                                    " exceeds the table cap");
            }
            table_size *= cluster_card[c];
        }
        out.table.resize(table_size, 1.0);
        for (std::size_t idx = 0; idx < table_size; ++idx) {
            auto cluster_states = mixed_radix_decode(idx, scope_cards);
            for (std::size_t ci = 0; ci < covering.size(); ++ci) {
                int c = covering[ci];
                auto states = mixed_radix_decode(
                    static_cast<std::size_t>(cluster_states[ci]),
                    lifted.member_cards[c]);
                for (std::size_t p = 0; p < lifted.members[c].size(); ++p) {
                    node_state[lifted.members[c][p]] = states[p];
                }
            }
            double value = 1.0;
            for (int fi : factor_ids) {
                const Factor& f = model.factors[fi];
                std::vector<int> digits, radices;
                for (int v : f.scope) {
                    digits.push_back(node_state[v]);
                    radices.push_back(model.cardinality(v));
                }
                value *= f.table[mixed_radix_encode(digits, radices)];
            }
            out.table[idx] = value;
        }
        lifted.base.factors.push_back(std::move(out));
        lifted.provenance.push_back(factor_ids);
    }
    return lifted;
}

MarginalSet project_node_marginals(const LiftedModel& lifted,
                                   const MarginalSet& cluster_marginals) {
    const int n = static_cast<int>(lifted.cluster_of.size()) - 1;
    MarginalSet out(n + 1);
    for (int v = 1; v <= n; ++v) {
        int c = lifted.cluster_of[v];
        int p = lifted.position_of[v];
        if (c < 0) {
            throw std::logic_error("node missing from every cluster: " +
                                   std::to_string(v));
        }
        const auto& cm = cluster_marginals.at(c + 1);
        const auto& cards = lifted.member_cards[c];
        if (cards.size() == 1) {
            out[v] = cm; // singleton: summing out nothing, keep bit-exact
            continue;
        }
        std::vector<double> marginal(cards[p], 0.0);
        for (std::size_t idx = 0; idx < cm.size(); ++idx) {
            auto states = mixed_radix_decode(idx, cards);
            marginal[states[p]] += cm[idx];
        }
        double total = std::accumulate(marginal.begin(), marginal.end(), 0.0);
        for (double& x : marginal) x /= total;
        out[v] = std::move(marginal);
    }
    return out;
}

} // namespace blockinfer
