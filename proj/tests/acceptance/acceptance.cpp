// End-to-end acceptance checks; prints one line per criterion.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "blockinfer/block_graph.hpp"
#include "blockinfer/decomposition.hpp"
#include "blockinfer/experiment.hpp"
#include "blockinfer/inference.hpp"
#include "blockinfer/lift.hpp"
#include "blockinfer/model.hpp"

using namespace blockinfer;

namespace {

int failures = 0;

void criterion(const std::string& name, const std::function<bool()>& body) {
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = std::string(" (") + e.what() + ")";
    }
    std::printf("%s: %s%s\n", ok ? "PASS" : "FAIL", name.c_str(), note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

bool expect(bool cond, const char* what) {
    if (!cond) std::printf("  check failed: %s\n", what);
    return cond;
}

UndirectedGraph partial_grid() {
    return UndirectedGraph(9, {{2, 3}, {3, 6}, {6, 9}, {9, 8}, {8, 7}, {7, 4},
                               {4, 1}, {4, 5}, {5, 6}, {2, 5}, {5, 8}});
}

std::set<NodeSet> as_set(const std::vector<NodeSet>& clusters) {
    return {clusters.begin(), clusters.end()};
}

std::set<std::pair<NodeSet, NodeSet>> edges_by_content(
    const std::vector<NodeSet>& clusters,
    const std::vector<std::pair<int, int>>& edges) {
    std::set<std::pair<NodeSet, NodeSet>> out;
    for (auto [i, j] : edges) {
        auto a = clusters[i], b = clusters[j];
        if (b < a) std::swap(a, b);
        out.insert({a, b});
    }
    return out;
}

UndirectedGraph random_connected(int n, int extra, std::mt19937_64& rng) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        edges.push_back({perm[pick(rng)], perm[i]});
    }
    std::set<std::pair<int, int>> have;
    for (auto [u, v] : edges) have.insert({std::min(u, v), std::max(u, v)});
    std::uniform_int_distribution<int> node(1, n);
    int added = 0, attempts = 0;
    while (added < extra && attempts++ < 20 * (extra + 1)) {
        int u = node(rng), v = node(rng);
        if (u == v) continue;
        auto e = std::make_pair(std::min(u, v), std::max(u, v));
        if (have.insert(e).second) {
            edges.push_back(e);
            ++added;
        }
    }
    return UndirectedGraph(n, edges);
}

bool golden_decompositions() {
    bool ok = true;
    auto grid_bt = build_block_tree(gen_grid(3, 3), {1});
    ok &= expect(as_set(grid_bt.clusters) ==
                     std::set<NodeSet>{{1}, {2, 4}, {3, 5, 7}, {6, 8}, {9}},
                 "grid chain clusters");
    ok &= expect(edges_by_content(grid_bt.clusters, grid_bt.edges) ==
                     std::set<std::pair<NodeSet, NodeSet>>{{{1}, {2, 4}},
                                                           {{2, 4}, {3, 5, 7}},
                                                           {{3, 5, 7}, {6, 8}},
                                                           {{6, 8}, {9}}},
                 "grid chain edges");

    auto pg = partial_grid();
    auto bt7 = build_block_tree(pg, {7});
    ok &= expect(as_set(bt7.clusters) ==
                     std::set<NodeSet>{{7}, {4, 8}, {5, 9}, {1}, {2, 6}, {3}},
                 "partial-grid clusters, root {7}");
    ok &= expect(edges_by_content(bt7.clusters, bt7.edges) ==
                     std::set<std::pair<NodeSet, NodeSet>>{{{4, 8}, {7}},
                                                           {{4, 8}, {5, 9}},
                                                           {{1}, {4, 8}},
                                                           {{2, 6}, {5, 9}},
                                                           {{2, 6}, {3}}},
                 "partial-grid edges, root {7}");
    ok &= expect(block_tree_width(bt7) == 4, "width 4, root {7}");

    auto bt74 = build_block_tree(pg, {7, 4});
    ok &= expect(as_set(bt74.clusters) ==
                     std::set<NodeSet>{{4, 7}, {5, 8}, {1}, {2, 6, 9}, {3}},
                 "partial-grid clusters, root {7,4}");
    ok &= expect(block_tree_width(bt74) == 5, "width 5, root {7,4}");

    auto grid_jt = to_junction_tree(build_block_tree(gen_grid(3, 3), {1}));
    ok &= expect(as_set(grid_jt.cliques) ==
                     std::set<NodeSet>{{1, 2, 4},
                                       {2, 3, 4, 5, 7},
                                       {3, 5, 6, 7, 8},
                                       {6, 8, 9}},
                 "grid junction tree cliques");
    auto pg_jt = to_junction_tree(bt7);
    ok &= expect(as_set(pg_jt.cliques) == std::set<NodeSet>{{4, 7, 8},
                                                            {1, 4, 8},
                                                            {4, 5, 8, 9},
                                                            {2, 5, 6, 9},
                                                            {2, 3, 6}},
                 "partial-grid junction tree cliques");
    return ok;
}

bool property_suite() {
    std::mt19937_64 rng(20260824);
    for (int trial = 0; trial < 1000; ++trial) {
        std::uniform_int_distribution<int> size(2, 40), mdist(1, 5);
        int n = size(rng), m = mdist(rng);
        auto g = random_connected(n, n / 2, rng);
        std::uniform_int_distribution<int> node(1, n);
        NodeSet root{node(rng)};

        auto bt = build_block_tree(g, root);
        std::vector<int> cluster_of(n + 1, -1);
        for (std::size_t c = 0; c < bt.clusters.size(); ++c) {
            for (int v : bt.clusters[c]) {
                if (cluster_of[v] != -1) return expect(false, "overlapping clusters");
                cluster_of[v] = static_cast<int>(c);
            }
        }
        for (int v = 1; v <= n; ++v) {
            if (cluster_of[v] < 0) return expect(false, "uncovered node");
        }
        if (bt.edges.size() + 1 != bt.clusters.size()) {
            return expect(false, "cluster adjacency is not a tree");
        }
        std::set<std::pair<int, int>> tree_edges(bt.edges.begin(), bt.edges.end());
        for (auto [u, v] : g.edges()) {
            int a = cluster_of[u], b = cluster_of[v];
            if (a != b &&
                !tree_edges.count({std::min(a, b), std::max(a, b)})) {
                return expect(false, "crossing edge outside the tree");
            }
        }

        if (bt.clusters.size() > 1) {
            auto jt = to_junction_tree(bt);
            std::vector<std::vector<int>> adj(jt.cliques.size());
            for (auto [a, b] : jt.edges) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
            for (int v = 1; v <= n; ++v) {
                std::vector<int> holding;
                for (std::size_t c = 0; c < jt.cliques.size(); ++c) {
                    if (std::binary_search(jt.cliques[c].begin(),
                                           jt.cliques[c].end(), v)) {
                        holding.push_back(static_cast<int>(c));
                    }
                }
                if (holding.empty()) return expect(false, "node in no clique");
                std::set<int> holders(holding.begin(), holding.end());
                std::vector<int> stack{holding[0]};
                std::set<int> seen{holding[0]};
                while (!stack.empty()) {
                    int u = stack.back();
                    stack.pop_back();
                    for (int w : adj[u]) {
                        if (holders.count(w) && !seen.count(w)) {
                            seen.insert(w);
                            stack.push_back(w);
                        }
                    }
                }
                if (seen.size() != holders.size()) {
                    return expect(false, "running intersection violated");
                }
            }
        }

        auto bg = build_block_graph(g, root, m);
        std::vector<int> bg_cluster_of(n + 1, -1);
        for (std::size_t c = 0; c < bg.clusters.size(); ++c) {
            if (static_cast<int>(bg.clusters[c].size()) > m) {
                return expect(false, "block-graph cluster over size bound");
            }
            for (int v : bg.clusters[c]) {
                if (bg_cluster_of[v] != -1) {
                    return expect(false, "block-graph clusters overlap");
                }
                bg_cluster_of[v] = static_cast<int>(c);
            }
        }
        for (int v = 1; v <= n; ++v) {
            if (bg_cluster_of[v] < 0) return expect(false, "block-graph misses a node");
        }
        std::set<std::pair<int, int>> expected;
        for (auto [u, v] : g.edges()) {
            int a = bg_cluster_of[u], b = bg_cluster_of[v];
            if (a != b) expected.insert({std::min(a, b), std::max(a, b)});
        }
        if (std::set<std::pair<int, int>>(bg.edges.begin(), bg.edges.end()) !=
            expected) {
            return expect(false, "block-graph edges not the induced ones");
        }

        auto unit = build_block_graph(g, root, 1);
        if (unit.clusters.size() != static_cast<std::size_t>(n)) {
            return expect(false, "m=1 clusters not singletons");
        }
        for (int v = 1; v <= n; ++v) {
            if (unit.clusters[v - 1] != NodeSet{v}) {
                return expect(false, "m=1 cluster order");
            }
        }
        std::set<std::pair<int, int>> unit_expected;
        for (auto [u, v] : g.edges()) unit_expected.insert({u - 1, v - 1});
        if (std::set<std::pair<int, int>>(unit.edges.begin(), unit.edges.end()) !=
            unit_expected) {
            return expect(false, "m=1 block-graph not isomorphic to G");
        }
    }
    return true;
}

double eval_model_at(const FactorModel& m, const std::vector<int>& node_state) {
    double p = 1.0;
    for (const auto& f : m.factors) {
        std::size_t idx = 0;
        for (int v : f.scope) idx = idx * m.cardinality(v) + node_state[v];
        p *= f.table[idx];
    }
    return p;
}

bool lifting_preservation() {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> size(2, 12), mdist(1, 4);
        int n = size(rng), m = mdist(rng);
        auto g = random_connected(n, n / 2, rng);
        IsingConfig cfg;
        cfg.potential_kind = PotentialKind::MIX;
        cfg.interaction_strength = 1.0;
        cfg.seed = 5000 + trial;
        auto model = ising_model(g, cfg);
        std::uniform_int_distribution<int> node(1, n);
        auto bg = build_block_graph(g, {node(rng)}, m);
        auto lm = lift_to_block_graph(model, bg);

        std::vector<int> covered(model.factors.size(), 0);
        for (const auto& ids : lm.provenance) {
            for (int id : ids) ++covered[id];
        }
        for (int c : covered) {
            if (c != 1) return expect(false, "provenance not a partition");
        }

        for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
            std::vector<int> node_state(n + 1, 0);
            for (int v = 1; v <= n; ++v) {
                node_state[v] = static_cast<int>((s >> (n - v)) & 1);
            }
            double orig = eval_model_at(model, node_state);
            std::vector<int> lifted_state(lm.members.size() + 1, 0);
            for (std::size_t c = 0; c < lm.members.size(); ++c) {
                std::vector<int> digits;
                for (int v : lm.members[c]) digits.push_back(node_state[v]);
                lifted_state[c + 1] = static_cast<int>(
                    mixed_radix_encode(digits, lm.member_cards[c]));
            }
            double lifted = eval_model_at(lm.base, lifted_state);
            if (std::abs(orig - lifted) > 1e-12 * std::max(orig, lifted)) {
                return expect(false, "lifted joint deviates");
            }
        }
    }
    return true;
}

bool exactness_suite() {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> size(2, 12);
        int n = size(rng);
        bool tree_case = trial % 2 == 0;
        auto g = random_connected(n, tree_case ? 0 : 2, rng);
        IsingConfig cfg;
        cfg.potential_kind = PotentialKind::MIX;
        cfg.interaction_strength = 1.0;
        cfg.seed = 9000 + trial;
        auto model = ising_model(g, cfg);
        auto truth = exact_brute_force(model);

        MarginalSet estimate;
        if (tree_case) {
            estimate = belief_propagation(model).marginals;
        } else {
            GeneralizedOptions opts;
            opts.m = n; // nothing splits: the block tree survives intact
            opts.root = RootPolicy::explicit_policy({1});
            estimate = generalized_inference(model, g, opts).marginals;
        }
        for (int v = 1; v <= n; ++v) {
            for (int s = 0; s < 2; ++s) {
                if (std::abs(estimate[v][s] - truth[v][s]) > 1e-8) {
                    return expect(false, tree_case ? "tree BP deviates"
                                                   : "block-tree wrapper deviates");
                }
            }
        }
    }
    return true;
}

std::map<std::string, double> run_cells(const ExperimentConfig& cfg) {
    auto rows = summarize(run_experiment(cfg));
    std::map<std::string, double> means;
    for (const auto& r : rows) {
        means[r.algorithm + "/" + r.potential + "/" + std::to_string(r.sigma)] =
            r.mean_error;
    }
    return means;
}

bool table1_reproduction() {
    ExperimentConfig cfg;
    cfg.graph = {GraphSpec::Kind::Grid, 10, 10, 0, 0, ""};
    cfg.potential = PotentialKind::REP;
    cfg.sigmas = {0.5};
    cfg.algorithms = {parse_algorithm("bp"), parse_algorithm("b2-bp"),
                      parse_algorithm("b3-bp")};
    cfg.trials = 30;
    cfg.master_seed = 1;
    cfg.measure_time = false;
    auto rows = summarize(run_experiment(cfg));
    double bp = -1, b2 = -1, b3 = -1;
    for (const auto& r : rows) {
        if (r.algorithm == "bp") bp = r.mean_error;
        if (r.algorithm == "b2-bp") b2 = r.mean_error;
        if (r.algorithm == "b3-bp") b3 = r.mean_error;
    }
    std::printf("  mean errors: bp=%.4f b2=%.4f b3=%.4f\n", bp, b2, b3);
    bool ok = true;
    ok &= expect(b3 < b2 && b2 < bp, "ordering b3 < b2 < bp");
    ok &= expect(bp >= 0.15 && bp <= 0.28, "bp band [0.15, 0.28]");
    ok &= expect(b2 >= 0.09 && b2 <= 0.20, "b2 band [0.09, 0.20]");
    ok &= expect(b3 >= 0.06 && b3 <= 0.16, "b3 band [0.06, 0.16]");
    return ok;
}

bool random_split_comparison() {
    int wins = 0, cells = 0;
    for (auto potential :
         {PotentialKind::REP, PotentialKind::ATT, PotentialKind::MIX}) {
        ExperimentConfig cfg;
        cfg.graph = {GraphSpec::Kind::Grid, 5, 5, 0, 0, ""};
        cfg.potential = potential;
        cfg.sigmas = {0.5, 1.0};
        cfg.algorithms = {parse_algorithm("b2-bp"), parse_algorithm("rand-b2-bp")};
        cfg.trials = 100;
        cfg.master_seed = 2;
        cfg.measure_time = false;
        auto rows = summarize(run_experiment(cfg));
        for (double sigma : cfg.sigmas) {
            double merged = -1, random_split = -1;
            for (const auto& r : rows) {
                if (r.sigma != sigma) continue;
                if (r.algorithm == "b2-bp") merged = r.mean_error;
                if (r.algorithm == "rand-b2-bp") random_split = r.mean_error;
            }
            ++cells;
            if (merged <= random_split) ++wins;
            std::printf("  %s sigma=%.1f: merged=%.4f random=%.4f\n",
                        potential_kind_name(potential).c_str(), sigma, merged,
                        random_split);
        }
    }
    return expect(wins >= 5, "merge rule wins at least 5 of 6 cells");
}

bool heuristic_comparison() {
    bool ok = true;
    std::mt19937_64 rng(606);
    for (auto [n, k] : std::vector<std::pair<int, int>>{{60, 3}, {60, 5}, {100, 4}}) {
        std::vector<int> min_degree, greedy_degree, greedy_fillin;
        for (int i = 0; i < 20; ++i) {
            auto g = synth_block_structured(n, k, 0.1, rng);
            auto width_for = [&](RootHeuristic h) {
                return block_tree_width(build_block_tree(g, select_root(g, h)));
            };
            min_degree.push_back(width_for(RootHeuristic::MinDegree));
            greedy_degree.push_back(width_for(RootHeuristic::GreedyDegree));
            greedy_fillin.push_back(width_for(RootHeuristic::GreedyFillin));
        }
        auto median = [](std::vector<int> xs) {
            std::sort(xs.begin(), xs.end());
            return xs[xs.size() / 2];
        };
        int md = median(min_degree), gd = median(greedy_degree),
            gf = median(greedy_fillin);
        std::printf("  n=%d k=%d medians: min-degree=%d greedy-degree=%d greedy-fillin=%d\n",
                    n, k, md, gd, gf);
        ok &= expect(gd <= md, "greedy-degree median <= min-degree median");
        ok &= expect(gf <= md, "greedy-fillin median <= min-degree median");
        ok &= expect(gf <= 2 * (2 * k), "greedy-fillin median within 2x the 2k bound");
    }
    return ok;
}

bool determinism() {
    ExperimentConfig cfg;
    cfg.graph = {GraphSpec::Kind::Grid, 6, 6, 0, 0, ""};
    cfg.potential = PotentialKind::MIX;
    cfg.sigmas = {0.5, 1.0};
    cfg.algorithms = {parse_algorithm("bp"), parse_algorithm("b2-bp"),
                      parse_algorithm("rand-b2-bp"), parse_algorithm("exact")};
    cfg.trials = 4;
    cfg.master_seed = 4242;
    cfg.measure_time = false;
    auto one = records_to_csv(run_experiment(cfg, 1));
    auto four = records_to_csv(run_experiment(cfg, 4));
    auto eight = records_to_csv(run_experiment(cfg, 8));
    return expect(one == four && one == eight,
                  "CSV byte-identical across 1/4/8 workers");
}

} // namespace

int main() {
    criterion("golden decompositions", golden_decompositions);
    criterion("decomposition property suite (1000 graphs)", property_suite);
    criterion("lifting preserves the joint (200 models)", lifting_preservation);
    criterion("tree BP and block-tree wrapper exactness (200 models)",
              exactness_suite);
    criterion("10x10 grid error ordering and bands", table1_reproduction);
    criterion("merge rule vs random split on the 5x5 grid",
              random_split_comparison);
    criterion("root heuristic comparison on block-structured graphs",
              heuristic_comparison);
    criterion("deterministic results across worker counts", determinism);
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
