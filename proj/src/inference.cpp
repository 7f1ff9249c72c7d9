#include "blockinfer/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>

#include <json.hpp>

#include "blockinfer/errors.hpp"

namespace blockinfer {

namespace {

void normalize(std::vector<double>& v) {
    double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw NumericalError("message or belief normalization failed");
    }
    for (double& x : v) x /= total;
}

struct FactorGraph {
    const FactorModel* model;
    std::vector<int> order; // factor indices sorted by scope
    // incidence[v] = list of (position in `order`, position of v in scope)
    std::vector<std::vector<std::pair<int, int>>> incidence;
};

FactorGraph build_factor_graph(const FactorModel& model) {
    FactorGraph fg;
    fg.model = &model;
    fg.order.resize(model.factors.size());
    std::iota(fg.order.begin(), fg.order.end(), 0);
    std::stable_sort(fg.order.begin(), fg.order.end(), [&](int a, int b) {
        return model.factors[a].scope < model.factors[b].scope;
    });
    fg.incidence.assign(model.variable_count() + 1, {});
    for (std::size_t oi = 0; oi < fg.order.size(); ++oi) {
        const auto& scope = model.factors[fg.order[oi]].scope;
        for (std::size_t k = 0; k < scope.size(); ++k) {
            fg.incidence[scope[k]].push_back({static_cast<int>(oi), static_cast<int>(k)});
        }
    }
    return fg;
}

using Messages = std::vector<std::vector<std::vector<double>>>; // [oi][k][state]

MarginalSet beliefs_from(const FactorGraph& fg, const Messages& factor_to_var) {
    const FactorModel& model = *fg.model;
    MarginalSet beliefs(model.variable_count() + 1);
    for (int v = 1; v <= model.variable_count(); ++v) {
        std::vector<double> b(model.cardinality(v), 1.0);
        for (auto [oi, k] : fg.incidence[v]) {
            for (int s = 0; s < model.cardinality(v); ++s) {
                b[s] *= factor_to_var[oi][k][s];
            }
        }
        normalize(b);
        beliefs[v] = std::move(b);
    }
    return beliefs;
}

std::vector<double> compute_var_to_factor(const FactorGraph& fg,
                                          const Messages& factor_to_var,
                                          int v, int self_oi) {
    const FactorModel& model = *fg.model;
    std::vector<double> msg(model.cardinality(v), 1.0);
    for (auto [oi, k] : fg.incidence[v]) {
        if (oi == self_oi) continue;
        for (int s = 0; s < model.cardinality(v); ++s) {
            msg[s] *= factor_to_var[oi][k][s];
        }
    }
    normalize(msg);
    return msg;
}

std::vector<double> compute_factor_to_var(const FactorModel& model, int fi,
                                          const std::vector<std::vector<double>>& incoming,
                                          std::size_t k) {
    const Factor& f = model.factors[fi];
    std::vector<int> radices;
    for (int v : f.scope) radices.push_back(model.cardinality(v));
    std::vector<double> msg(radices[k], 0.0);
    std::vector<int> digits(radices.size(), 0);
    for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
        double w = f.table[idx];
        for (std::size_t j = 0; j < radices.size(); ++j) {
            if (j != k) w *= incoming[j][digits[j]];
        }
        msg[digits[k]] += w;
        // odometer, last digit fastest
        for (std::size_t j = radices.size(); j-- > 0;) {
            if (++digits[j] < radices[j]) break;
            digits[j] = 0;
        }
    }
    normalize(msg);
    return msg;
}

} // namespace

InferenceReport belief_propagation(const FactorModel& model,
                                   const BpSettings& settings) {
    if (settings.max_iterations < 1 || !(settings.convergence_tolerance > 0.0) ||
        settings.damping < 0.0 || settings.damping >= 1.0) {
        throw ArgumentError("bad BP settings");
    }
    model.validate();
    auto t0 = std::chrono::steady_clock::now();

    FactorGraph fg = build_factor_graph(model);
    Messages var_to_factor(fg.order.size()), factor_to_var(fg.order.size());
    for (std::size_t oi = 0; oi < fg.order.size(); ++oi) {
        const auto& scope = model.factors[fg.order[oi]].scope;
        var_to_factor[oi].resize(scope.size());
        factor_to_var[oi].resize(scope.size());
        for (std::size_t k = 0; k < scope.size(); ++k) {
            int card = model.cardinality(scope[k]);
            var_to_factor[oi][k].assign(card, 1.0 / card);
            factor_to_var[oi][k].assign(card, 1.0 / card);
        }
    }

    MarginalSet beliefs = beliefs_from(fg, factor_to_var);
    InferenceReport report;
    const double d = settings.damping;
    for (int iter = 1; iter <= settings.max_iterations; ++iter) {
        if (settings.schedule == BpSchedule::SequentialFixed) {
            for (std::size_t oi = 0; oi < fg.order.size(); ++oi) {
                int fi = fg.order[oi];
                const auto& scope = model.factors[fi].scope;
                // refresh every inbound message first so the outgoing ones
                // below see no stale sibling messages
                for (std::size_t k = 0; k < scope.size(); ++k) {
                    var_to_factor[oi][k] = compute_var_to_factor(
                        fg, factor_to_var, scope[k], static_cast<int>(oi));
                }
                for (std::size_t k = 0; k < scope.size(); ++k) {
                    auto updated = compute_factor_to_var(model, fi, var_to_factor[oi], k);
                    if (d > 0.0) {
                        for (std::size_t s = 0; s < updated.size(); ++s) {
                            updated[s] = (1.0 - d) * updated[s] + d * factor_to_var[oi][k][s];
                        }
                        normalize(updated);
                    }
                    factor_to_var[oi][k] = std::move(updated);
                }
            }
        } else {
            Messages new_vf(fg.order.size());
            for (std::size_t oi = 0; oi < fg.order.size(); ++oi) {
                const auto& scope = model.factors[fg.order[oi]].scope;
                new_vf[oi].resize(scope.size());
                for (std::size_t k = 0; k < scope.size(); ++k) {
                    new_vf[oi][k] = compute_var_to_factor(fg, factor_to_var, scope[k],
                                                          static_cast<int>(oi));
                }
            }
            var_to_factor = std::move(new_vf);
            Messages new_fv = factor_to_var;
            for (std::size_t oi = 0; oi < fg.order.size(); ++oi) {
                int fi = fg.order[oi];
                const auto& scope = model.factors[fi].scope;
                for (std::size_t k = 0; k < scope.size(); ++k) {
                    auto updated = compute_factor_to_var(model, fi, var_to_factor[oi], k);
                    if (d > 0.0) {
                        for (std::size_t s = 0; s < updated.size(); ++s) {
                            updated[s] = (1.0 - d) * updated[s] + d * factor_to_var[oi][k][s];
                        }
                        normalize(updated);
                    }
                    new_fv[oi][k] = std::move(updated);
                }
            }
            factor_to_var = std::move(new_fv);
        }

        MarginalSet updated = beliefs_from(fg, factor_to_var);
        double diff_sum = 0.0;
        std::size_t entries = 0;
        for (int v = 1; v <= model.variable_count(); ++v) {
            for (std::size_t s = 0; s < updated[v].size(); ++s) {
                diff_sum += std::abs(updated[v][s] - beliefs[v][s]);
                ++entries;
            }
        }
        beliefs = std::move(updated);
        report.iterations = iter;
        if (diff_sum / static_cast<double>(entries) < settings.convergence_tolerance) {
            report.converged = true;
            break;
        }
    }
    report.marginals = std::move(beliefs);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

MarginalSet exact_brute_force(const FactorModel& model, std::size_t state_cap) {
    model.validate();
    const int n = model.variable_count();
    std::size_t total = 1;
    for (int v = 1; v <= n; ++v) {
        if (total > state_cap / static_cast<std::size_t>(model.cardinality(v))) {
            throw CapacityError("joint state space exceeds the brute-force cap");
        }
        total *= static_cast<std::size_t>(model.cardinality(v));
    }

    MarginalSet marginals(n + 1);
    for (int v = 1; v <= n; ++v) marginals[v].assign(model.cardinality(v), 0.0);

    std::vector<int> state(n + 1, 0);
    for (std::size_t it = 0; it < total; ++it) {
        double w = 1.0;
        for (const auto& f : model.factors) {
            std::size_t idx = 0;
            for (int v : f.scope) {
                idx = idx * static_cast<std::size_t>(model.cardinality(v)) +
                      static_cast<std::size_t>(state[v]);
            }
            w *= f.table[idx];
        }
        for (int v = 1; v <= n; ++v) marginals[v][state[v]] += w;
        for (int v = n; v >= 1; --v) {
            if (++state[v] < model.cardinality(v)) break;
            state[v] = 0;
        }
    }
    for (int v = 1; v <= n; ++v) normalize(marginals[v]);
    return marginals;
}

namespace {

// Dense table over a sorted variable scope, used by junction-tree
// calibration only.
struct DenseTable {
    NodeSet scope;
    std::vector<int> radices;
    std::vector<double> values;
};

DenseTable make_table(const FactorModel& model, const NodeSet& scope,
                      std::size_t table_cap) {
    DenseTable t;
    t.scope = scope;
    std::size_t size = 1;
    for (int v : scope) {
        int card = model.cardinality(v);
        t.radices.push_back(card);
        if (size > table_cap / static_cast<std::size_t>(card)) {
            throw CapacityError(
                "elimination width too large for the table cap; "
                "use brute force or a smaller instance");
        }
        size *= static_cast<std::size_t>(card);
    }
    t.values.assign(size, 1.0);
    return t;
}

// Multiply `small` (scope a subset of big.scope) into `big`.
void multiply_into(DenseTable& big, const DenseTable& small) {
    std::vector<int> pos; // positions of small.scope inside big.scope
    for (int v : small.scope) {
        auto it = std::lower_bound(big.scope.begin(), big.scope.end(), v);
        pos.push_back(static_cast<int>(it - big.scope.begin()));
    }
    std::vector<int> digits(big.scope.size(), 0);
    for (std::size_t idx = 0; idx < big.values.size(); ++idx) {
        std::size_t sidx = 0;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            sidx = sidx * static_cast<std::size_t>(small.radices[j]) +
                   static_cast<std::size_t>(digits[pos[j]]);
        }
        big.values[idx] *= small.values[sidx];
        for (std::size_t j = big.scope.size(); j-- > 0;) {
            if (++digits[j] < big.radices[j]) break;
            digits[j] = 0;
        }
    }
}

// Sum `t` down onto `target_scope` (a subset of t.scope).
DenseTable marginalize_onto(const DenseTable& t, const NodeSet& target_scope) {
    DenseTable out;
    out.scope = target_scope;
    std::size_t size = 1;
    std::vector<int> pos;
    for (int v : target_scope) {
        auto it = std::lower_bound(t.scope.begin(), t.scope.end(), v);
        int p = static_cast<int>(it - t.scope.begin());
        pos.push_back(p);
        out.radices.push_back(t.radices[p]);
        size *= static_cast<std::size_t>(t.radices[p]);
    }
    out.values.assign(size, 0.0);
    std::vector<int> digits(t.scope.size(), 0);
    for (std::size_t idx = 0; idx < t.values.size(); ++idx) {
        std::size_t oidx = 0;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            oidx = oidx * static_cast<std::size_t>(out.radices[j]) +
                   static_cast<std::size_t>(digits[pos[j]]);
        }
        out.values[oidx] += t.values[idx];
        for (std::size_t j = t.scope.size(); j-- > 0;) {
            if (++digits[j] < t.radices[j]) break;
            digits[j] = 0;
        }
    }
    return out;
}

void normalize_table(DenseTable& t) {
    double total = std::accumulate(t.values.begin(), t.values.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw NumericalError("table normalization failed in elimination");
    }
    for (double& x : t.values) x /= total;
}

} // namespace

MarginalSet exact_elimination(const FactorModel& model, std::size_t table_cap) {
    model.validate();
    const int n = model.variable_count();
    UndirectedGraph g = model.to_graph();
    auto tri = triangulate(g, greedy_fillin_order(g));
    const auto& cliques = tri.cliques;
    const int nc = static_cast<int>(cliques.size());

    // Max-weight spanning forest over the clique intersection graph gives a
    // junction tree (forest) for the chordal fill-in.
    struct CandEdge {
        int weight, a, b;
    };
    std::vector<CandEdge> cand;
    for (int a = 0; a < nc; ++a) {
        for (int b = a + 1; b < nc; ++b) {
            NodeSet inter;
            std::set_intersection(cliques[a].begin(), cliques[a].end(),
                                  cliques[b].begin(), cliques[b].end(),
                                  std::back_inserter(inter));
            if (!inter.empty()) {
                cand.push_back({static_cast<int>(inter.size()), a, b});
            }
        }
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [](const CandEdge& x, const CandEdge& y) { return x.weight > y.weight; });
    std::vector<int> uf(nc);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };
    std::vector<std::vector<int>> adj(nc);
    for (const auto& e : cand) {
        int ra = find(e.a), rb = find(e.b);
        if (ra != rb) {
            uf[ra] = rb;
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
    }

    // Clique potentials: product of the factors assigned to each clique.
    std::vector<DenseTable> potentials;
    potentials.reserve(nc);
    for (int c = 0; c < nc; ++c) {
        potentials.push_back(make_table(model, cliques[c], table_cap));
    }
    for (const auto& f : model.factors) {
        int home = -1;
        for (int c = 0; c < nc; ++c) {
            if (std::includes(cliques[c].begin(), cliques[c].end(), f.scope.begin(),
                              f.scope.end())) {
                home = c;
                break;
            }
        }
        if (home == -1) {
            throw std::logic_error("factor scope not covered by any clique");
        }
        DenseTable ft;
        ft.scope = f.scope;
        for (int v : f.scope) ft.radices.push_back(model.cardinality(v));
        ft.values = f.table;
        multiply_into(potentials[home], ft);
    }
    for (auto& p : potentials) normalize_table(p);

    // Two-pass Shafer-Shenoy calibration per tree component.
    std::vector<std::map<int, DenseTable>> inbox(nc); // messages keyed by sender
    std::vector<int> parent(nc, -2);
    std::vector<int> bfs_order;
    for (int root = 0; root < nc; ++root) {
        if (parent[root] != -2) continue;
        parent[root] = -1;
        std::queue<int> queue;
        queue.push(root);
        std::vector<int> comp_order;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop();
            comp_order.push_back(u);
            for (int v : adj[u]) {
                if (parent[v] == -2) {
                    parent[v] = u;
                    queue.push(v);
                }
            }
        }
        auto send = [&](int src, int dst) {
            DenseTable work = potentials[src];
            for (const auto& [from, msg] : inbox[src]) {
                if (from != dst) multiply_into(work, msg);
            }
            NodeSet sep;
            std::set_intersection(cliques[src].begin(), cliques[src].end(),
                                  cliques[dst].begin(), cliques[dst].end(),
                                  std::back_inserter(sep));
            DenseTable msg = marginalize_onto(work, sep);
            normalize_table(msg);
            inbox[dst][src] = std::move(msg);
        };
        for (auto it = comp_order.rbegin(); it != comp_order.rend(); ++it) {
            if (parent[*it] >= 0) send(*it, parent[*it]);
        }
        for (int u : comp_order) {
            for (int v : adj[u]) {
                if (parent[v] == u) send(u, v);
            }
        }
        bfs_order.insert(bfs_order.end(), comp_order.begin(), comp_order.end());
    }

    // Variable marginal from the smallest clique containing it.
    MarginalSet marginals(n + 1);
    for (int v = 1; v <= n; ++v) {
        int best = -1;
        for (int c = 0; c < nc; ++c) {
            if (std::binary_search(cliques[c].begin(), cliques[c].end(), v) &&
                (best == -1 || cliques[c].size() < cliques[best].size())) {
                best = c;
            }
        }
        DenseTable belief = potentials[best];
        for (const auto& [from, msg] : inbox[best]) {
            multiply_into(belief, msg);
        }
        DenseTable m = marginalize_onto(belief, {v});
        normalize_table(m);
        marginals[v] = std::move(m.values);
    }
    return marginals;
}

InferenceReport generalized_inference(const FactorModel& model,
                                      const UndirectedGraph& g,
                                      const GeneralizedOptions& opts,
                                      const EngineFn& engine) {
    auto t0 = std::chrono::steady_clock::now();
    NodeSet root = opts.root.kind == RootPolicy::Kind::Explicit
                       ? opts.root.explicit_root
                       : select_root(g, opts.root.heuristic);
    BlockGraph bg;
    if (opts.random_split) {
        std::mt19937_64 rng(opts.split_seed);
        bg = build_block_graph_random(g, root, opts.m, rng);
    } else {
        bg = build_block_graph(g, root, opts.m);
    }
    LiftedModel lifted = lift_to_block_graph(model, bg);
    InferenceReport report = engine(lifted.base, opts.settings);
    report.marginals = project_node_marginals(lifted, report.marginals);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string report_to_json(const InferenceReport& report) {
    nlohmann::json j;
    nlohmann::json marg = nlohmann::json::array();
    for (std::size_t v = 1; v < report.marginals.size(); ++v) {
        marg.push_back({{"id", v}, {"probabilities", report.marginals[v]}});
    }
    j["marginals"] = marg;
    j["converged"] = report.converged;
    j["iterations"] = report.iterations;
    j["wall_seconds"] = report.wall_seconds;
    return j.dump(2);
}

} // namespace blockinfer
