#include "blockinfer/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blockinfer/errors.hpp"

namespace blockinfer {

void FactorModel::validate() const {
    const int n = variable_count();
    if (n < 1) {
        throw ArgumentError("model has no variables");
    }
    for (int v = 1; v <= n; ++v) {
        if (cardinalities[v] < 1) {
            throw ArgumentError("variable " + std::to_string(v) + " has cardinality < 1");
        }
    }
    for (const auto& f : factors) {
        if (f.scope.empty() || !std::is_sorted(f.scope.begin(), f.scope.end()) ||
            std::adjacent_find(f.scope.begin(), f.scope.end()) != f.scope.end()) {
            throw ArgumentError("factor scope must be sorted and distinct");
        }
        std::size_t expected = 1;
        for (int v : f.scope) {
            if (v < 1 || v > n) {
                throw ArgumentError("factor scope id out of range");
            }
            expected *= static_cast<std::size_t>(cardinalities[v]);
        }
        if (f.table.size() != expected) {
            throw ArgumentError("factor table size mismatch");
        }
        for (double x : f.table) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                throw ArgumentError("factor tables must be strictly positive and finite");
            }
        }
    }
}

UndirectedGraph FactorModel::to_graph() const {
    std::vector<std::pair<int, int>> edges;
    for (const auto& f : factors) {
        for (std::size_t a = 0; a < f.scope.size(); ++a) {
            for (std::size_t b = a + 1; b < f.scope.size(); ++b) {
                edges.push_back({f.scope[a], f.scope[b]});
            }
        }
    }
    return UndirectedGraph(variable_count(), edges);
}

PotentialKind parse_potential_kind(const std::string& name) {
    if (name == "REP" || name == "rep") return PotentialKind::REP;
    if (name == "ATT" || name == "att") return PotentialKind::ATT;
    if (name == "MIX" || name == "mix") return PotentialKind::MIX;
    throw ArgumentError("unknown potential kind: " + name);
}

std::string potential_kind_name(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::REP: return "rep";
        case PotentialKind::ATT: return "att";
        case PotentialKind::MIX: return "mix";
    }
    return "?";
}

FactorModel ising_model(const UndirectedGraph& g, const IsingConfig& cfg) {
    if (cfg.interaction_strength < 0.0) {
        throw ArgumentError("interaction strength must be >= 0");
    }
    if (cfg.field_scale < 0.0) {
        throw ArgumentError("field scale must be >= 0");
    }
    std::mt19937_64 rng(cfg.seed);
    // N(0, x) parameters are variances, so the distributions get sqrt(x)
    std::normal_distribution<double> field(
        0.0, cfg.field_scale > 0.0 ? std::sqrt(cfg.field_scale) : 1.0);
    std::normal_distribution<double> coupling(
        0.0,
        cfg.interaction_strength > 0.0 ? std::sqrt(cfg.interaction_strength) : 1.0);

    FactorModel model;
    model.cardinalities.assign(g.node_count() + 1, 2);
    model.cardinalities[0] = 0;

    // States ordered (-1, +1): index 0 is spin -1, index 1 is spin +1.
    for (int v = 1; v <= g.node_count(); ++v) {
        double a = cfg.field_scale > 0.0 ? field(rng) : 0.0;
        Factor f;
        f.scope = {v};
        f.table = {std::exp(a), std::exp(-a)};
        model.factors.push_back(std::move(f));
    }
    for (auto [u, v] : g.edges()) {
        double b = cfg.interaction_strength > 0.0 ? coupling(rng) : 0.0;
        double w;
        switch (cfg.potential_kind) {
            case PotentialKind::REP: w = -std::abs(b); break;
            case PotentialKind::ATT: w = std::abs(b); break;
            case PotentialKind::MIX: w = -b; break;
            default: w = 0.0;
        }
        Factor f;
        f.scope = {u, v};
        // table[s_u * 2 + s_v], spins x = 2*s - 1
        f.table.resize(4);
        for (int su = 0; su < 2; ++su) {
            for (int sv = 0; sv < 2; ++sv) {
                int prod = (2 * su - 1) * (2 * sv - 1);
                f.table[su * 2 + sv] = std::exp(w * prod);
            }
        }
        model.factors.push_back(std::move(f));
    }
    return model;
}

std::size_t mixed_radix_encode(const std::vector<int>& digits,
                               const std::vector<int>& radices) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < radices.size(); ++i) {
        index = index * static_cast<std::size_t>(radices[i]) +
                static_cast<std::size_t>(digits[i]);
    }
    return index;
}

std::vector<int> mixed_radix_decode(std::size_t index,
                                    const std::vector<int>& radices) {
    std::vector<int> digits(radices.size());
    for (std::size_t i = radices.size(); i-- > 0;) {
        digits[i] = static_cast<int>(index % static_cast<std::size_t>(radices[i]));
        index /= static_cast<std::size_t>(radices[i]);
    }
    return digits;
}

std::string model_to_json(const FactorModel& model) {
    nlohmann::json j;
    j["comment"] =
        "factor tables are mixed-radix indexed over the sorted scope, "
        "last member fastest-varying";
    nlohmann::json vars = nlohmann::json::array();
    for (int v = 1; v <= model.variable_count(); ++v) {
        vars.push_back({{"id", v}, {"cardinality", model.cardinality(v)}});
    }
    j["variables"] = vars;
    nlohmann::json facs = nlohmann::json::array();
    for (const auto& f : model.factors) {
        facs.push_back({{"scope", f.scope}, {"table", f.table}});
    }
    j["factors"] = facs;
    return j.dump(2);
}

FactorModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("bad model JSON: ") + e.what());
    }
    FactorModel model;
    int max_id = 0;
    for (const auto& v : j.at("variables")) {
        max_id = std::max(max_id, v.at("id").get<int>());
    }
    model.cardinalities.assign(max_id + 1, 0);
    for (const auto& v : j.at("variables")) {
        model.cardinalities[v.at("id").get<int>()] = v.at("cardinality").get<int>();
    }
    for (const auto& f : j.at("factors")) {
        Factor factor;
        factor.scope = f.at("scope").get<NodeSet>();
        factor.table = f.at("table").get<std::vector<double>>();
        model.factors.push_back(std::move(factor));
    }
    model.validate();
    return model;
}

FactorModel read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open model file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

void write_model_file(const std::string& path, const FactorModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw ArgumentError("cannot write model file: " + path);
    }
    out << model_to_json(model) << "\n";
}

} // namespace blockinfer
