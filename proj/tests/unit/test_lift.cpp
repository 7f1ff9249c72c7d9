#include <doctest.h>

#include <cmath>
#include <map>

#include "blockinfer/errors.hpp"
#include "blockinfer/inference.hpp"
#include "blockinfer/lift.hpp"
#include "helpers.hpp"

using namespace blockinfer;

namespace {

double eval_model(const FactorModel& m, const std::vector<int>& node_state) {
    double p = 1.0;
    for (const auto& f : m.factors) {
        std::size_t idx = 0;
        for (int v : f.scope) idx = idx * m.cardinality(v) + node_state[v];
        p *= f.table[idx];
    }
    return p;
}

// Unnormalized lifted joint evaluated at a full node-state assignment.
double eval_lifted(const LiftedModel& lm, const std::vector<int>& node_state) {
    std::vector<int> cluster_state(lm.members.size());
    for (std::size_t c = 0; c < lm.members.size(); ++c) {
        std::vector<int> digits;
        for (int v : lm.members[c]) digits.push_back(node_state[v]);
        cluster_state[c] =
            static_cast<int>(mixed_radix_encode(digits, lm.member_cards[c]));
    }
    std::vector<int> padded(lm.members.size() + 1, 0);
    for (std::size_t c = 0; c < lm.members.size(); ++c) {
        padded[c + 1] = cluster_state[c];
    }
    return eval_model(lm.base, padded);
}

void check_joint_preserved(const FactorModel& m, const LiftedModel& lm) {
    int n = m.variable_count();
    std::size_t total = 1;
    for (int v = 1; v <= n; ++v) total *= m.cardinality(v);
    for (std::size_t s = 0; s < total; ++s) {
        std::vector<int> node_state(n + 1, 0);
        std::size_t rest = s;
        for (int v = n; v >= 1; --v) {
            node_state[v] = static_cast<int>(rest % m.cardinality(v));
            rest /= m.cardinality(v);
        }
        double a = eval_model(m, node_state);
        double b = eval_lifted(lm, node_state);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(a, b));
    }
}

FactorModel random_binary_model(const UndirectedGraph& g, std::uint64_t seed) {
    IsingConfig cfg;
    cfg.potential_kind = PotentialKind::MIX;
    cfg.interaction_strength = 1.0;
    cfg.seed = seed;
    return ising_model(g, cfg);
}

// Seven-node model with the worked-example cluster layout.
FactorModel seven_node_model() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    FactorModel m;
    m.cardinalities = std::vector<int>(8, 2);
    m.cardinalities[0] = 0;
    auto add = [&](NodeSet scope) {
        std::size_t len = std::size_t{1} << scope.size();
        std::vector<double> table(len);
        for (auto& x : table) x = u(rng);
        m.factors.push_back({std::move(scope), std::move(table)});
    };
    add({1, 2});
    add({1, 3});
    add({1, 4});
    add({2, 4, 5});
    add({3, 6});
    add({4, 5, 6, 7});
    return m;
}

BlockGraph seven_node_clusters(const FactorModel& m) {
    BlockGraph bg;
    bg.clusters = {{1, 2}, {3}, {4, 5}, {6, 7}};
    bg.max_cluster_size = 2;
    bg.edges = induced_cluster_edges(m.to_graph(), bg.clusters);
    return bg;
}

} // namespace

TEST_CASE("worked-example grouping: one lifted factor per covering cluster set") {
    auto m = seven_node_model();
    auto bg = seven_node_clusters(m);
    auto lm = lift_to_block_graph(m, bg);

    // map lifted scope -> set of original factor ids
    std::map<NodeSet, std::vector<int>> by_scope;
    for (std::size_t i = 0; i < lm.base.factors.size(); ++i) {
        by_scope[lm.base.factors[i].scope] = lm.provenance[i];
    }
    // clusters (by min member): 1:{1,2} 2:{3} 3:{4,5} 4:{6,7}
    REQUIRE(by_scope.count({1}));
    CHECK(by_scope[{1}] == std::vector<int>{0});       // psi_{1,2}
    REQUIRE(by_scope.count({1, 2}));
    CHECK(by_scope[{1, 2}] == std::vector<int>{1});    // psi_{1,3}
    REQUIRE(by_scope.count({1, 3}));
    CHECK(by_scope[{1, 3}] == std::vector<int>{2, 3}); // psi_{1,4}, psi_{2,4,5}
    REQUIRE(by_scope.count({2, 4}));
    CHECK(by_scope[{2, 4}] == std::vector<int>{4});    // psi_{3,6}
    REQUIRE(by_scope.count({3, 4}));
    CHECK(by_scope[{3, 4}] == std::vector<int>{5});    // psi_{4,5,6,7}

    check_joint_preserved(m, lm);

    // provenance covers every original factor exactly once
    std::vector<int> seen(m.factors.size(), 0);
    for (const auto& ids : lm.provenance) {
        for (int id : ids) ++seen[id];
    }
    for (int c : seen) CHECK(c == 1);
}

TEST_CASE("one-cluster block-graph folds everything into a single factor") {
    auto m = random_binary_model(gen_grid(2, 3), 5);
    BlockGraph bg;
    bg.clusters = {{1, 2, 3, 4, 5, 6}};
    bg.max_cluster_size = 6;
    auto lm = lift_to_block_graph(m, bg);
    CHECK(lm.base.factors.size() == 1);
    CHECK(lm.base.factors[0].table.size() == 64);
    check_joint_preserved(m, lm);
}

TEST_CASE("factorless block-graph edges get constant fillers") {
    // path 1-2-3 with clusters {1},{2},{3}: edge factors exist, so build a
    // model missing the 2-3 potential but a graph that still has the edge
    FactorModel m;
    m.cardinalities = {0, 2, 2, 2};
    m.factors.push_back({{1, 2}, {1.0, 2.0, 3.0, 4.0}});
    m.factors.push_back({{3}, {0.5, 1.5}});
    UndirectedGraph g(3, {{1, 2}, {2, 3}});
    BlockGraph bg;
    bg.clusters = {{1}, {2}, {3}};
    bg.max_cluster_size = 1;
    bg.edges = induced_cluster_edges(g, bg.clusters);
    auto lm = lift_to_block_graph(m, bg);
    bool found_filler = false;
    for (std::size_t i = 0; i < lm.base.factors.size(); ++i) {
        if (lm.base.factors[i].scope == NodeSet{2, 3}) {
            found_filler = true;
            CHECK(lm.provenance[i].empty());
            for (double x : lm.base.factors[i].table) CHECK(x == 1.0);
        }
    }
    CHECK(found_filler);
    check_joint_preserved(m, lm);
}

TEST_CASE("lifting preserves the joint across random models and block-graphs") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> size(3, 10), mdist(1, 4);
        int n = size(rng), m = mdist(rng);
        auto g = test_helpers::random_connected_graph(n, n / 2, rng);
        auto model = random_binary_model(g, 1000 + trial);
        std::uniform_int_distribution<int> node(1, n);
        auto bg = build_block_graph(g, {node(rng)}, m);
        check_joint_preserved(model, lift_to_block_graph(model, bg));
    }
}

TEST_CASE("lifted table over the cap raises a capacity error") {
    auto g = gen_grid(3, 3);
    auto m = random_binary_model(g, 8);
    BlockGraph bg;
    bg.clusters = {{1, 2, 3, 4, 5}, {6, 7, 8, 9}};
    bg.max_cluster_size = 5;
    bg.edges = induced_cluster_edges(g, bg.clusters);
    CHECK_THROWS_AS(lift_to_block_graph(m, bg, 256), CapacityError);
}

TEST_CASE("project_node_marginals worked examples") {
    FactorModel m;
    m.cardinalities = {0, 2, 2, 2};
    m.factors.push_back({{1, 2}, {1.0, 1.0, 1.0, 1.0}});
    m.factors.push_back({{2, 3}, {1.0, 1.0, 1.0, 1.0}});
    UndirectedGraph g(3, {{1, 2}, {2, 3}});
    BlockGraph bg;
    bg.clusters = {{1}, {2, 3}};
    bg.max_cluster_size = 2;
    bg.edges = induced_cluster_edges(g, bg.clusters);
    auto lm = lift_to_block_graph(m, bg);

    MarginalSet cm(3);
    cm[1] = {0.25, 0.75};            // singleton cluster {1}
    cm[2] = {0.1, 0.2, 0.3, 0.4};    // cluster {2,3}, node 3 fastest
    auto nm = project_node_marginals(lm, cm);
    CHECK(nm[1][0] == doctest::Approx(0.25));
    CHECK(nm[1][1] == doctest::Approx(0.75));
    CHECK(nm[2][0] == doctest::Approx(0.3));  // states (0,0)+(0,1)
    CHECK(nm[2][1] == doctest::Approx(0.7));
    CHECK(nm[3][0] == doctest::Approx(0.4));  // states (0,0)+(1,0)
    CHECK(nm[3][1] == doctest::Approx(0.6));
}

TEST_CASE("projection of exact cluster marginals matches brute force") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = test_helpers::random_connected_graph(6, 3, rng);
        auto m = random_binary_model(g, 700 + trial);
        auto bg = build_block_graph(g, {1}, 2);
        auto lm = lift_to_block_graph(m, bg);
        auto cluster_marginals = exact_brute_force(lm.base);
        auto projected = project_node_marginals(lm, cluster_marginals);
        auto truth = exact_brute_force(m);
        for (int v = 1; v <= 6; ++v) {
            for (int s = 0; s < 2; ++s) {
                CHECK(projected[v][s] == doctest::Approx(truth[v][s]).epsilon(1e-12));
            }
        }
    }
}
