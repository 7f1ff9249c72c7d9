#include "blockinfer/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "blockinfer/errors.hpp"
#include "blockinfer/rng.hpp"

namespace blockinfer {

double mean_abs_error(const MarginalSet& est, const MarginalSet& truth) {
    if (est.size() != truth.size()) {
        throw ArgumentError("marginal sets cover different variables");
    }
    double total = 0.0;
    int count = 0;
    for (std::size_t v = 1; v < est.size(); ++v) {
        if (est[v].size() != truth[v].size()) {
            throw ArgumentError("marginal cardinality mismatch at variable " +
                                std::to_string(v));
        }
        for (std::size_t s = 0; s < est[v].size(); ++s) {
            total += std::abs(est[v][s] - truth[v][s]);
        }
        ++count;
    }
    if (count == 0) {
        throw ArgumentError("empty marginal sets");
    }
    return total / count;
}

AlgorithmSpec parse_algorithm(const std::string& label) {
    AlgorithmSpec spec;
    spec.label = label;
    if (label == "bp") {
        spec.kind = AlgorithmSpec::Kind::PlainBp;
        return spec;
    }
    if (label == "exact") {
        spec.kind = AlgorithmSpec::Kind::Exact;
        return spec;
    }
    auto parse_bm = [&](const std::string& body, AlgorithmSpec::Kind kind) -> bool {
        if (body.size() < 4 || body[0] != 'b') return false;
        auto dash = body.find("-bp");
        if (dash == std::string::npos || dash + 3 != body.size()) return false;
        try {
            spec.m = std::stoi(body.substr(1, dash - 1));
        } catch (const std::exception&) {
            return false;
        }
        if (spec.m < 1) return false;
        spec.kind = kind;
        return true;
    };
    if (label.rfind("rand-", 0) == 0) {
        if (parse_bm(label.substr(5), AlgorithmSpec::Kind::RandBlockBp)) return spec;
    } else if (parse_bm(label, AlgorithmSpec::Kind::BlockBp)) {
        return spec;
    }
    throw ArgumentError("unknown algorithm label: " + label +
                        " (expected bp, exact, b<m>-bp, or rand-b<m>-bp)");
}

namespace {

void parse_config_fields(const nlohmann::json& j, ExperimentConfig& cfg) {
    const auto& g = j.at("graph");
    std::string type = g.at("type").get<std::string>();
    if (type == "grid") {
        cfg.graph.kind = GraphSpec::Kind::Grid;
        cfg.graph.rows = g.at("rows").get<int>();
        cfg.graph.cols = g.at("cols").get<int>();
    } else if (type == "regular") {
        cfg.graph.kind = GraphSpec::Kind::RandomRegular;
        cfg.graph.n = g.at("n").get<int>();
        cfg.graph.degree = g.at("degree").get<int>();
    } else if (type == "file") {
        cfg.graph.kind = GraphSpec::Kind::File;
        cfg.graph.path = g.at("path").get<std::string>();
    } else {
        throw ArgumentError("unknown graph type: " + type);
    }
    cfg.potential = parse_potential_kind(j.at("potential").get<std::string>());
    cfg.sigmas = j.at("sigmas").get<std::vector<double>>();
    for (const auto& a : j.at("algorithms")) {
        cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    cfg.trials = j.at("trials").get<int>();
    cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("bp")) {
        const auto& b = j["bp"];
        if (b.contains("max_iter")) cfg.bp.max_iterations = b["max_iter"].get<int>();
        if (b.contains("tol")) cfg.bp.convergence_tolerance = b["tol"].get<double>();
        if (b.contains("damping")) cfg.bp.damping = b["damping"].get<double>();
        if (b.contains("schedule")) {
            std::string s = b["schedule"].get<std::string>();
            if (s == "seq") {
                cfg.bp.schedule = BpSchedule::SequentialFixed;
            } else if (s == "par") {
                cfg.bp.schedule = BpSchedule::Parallel;
            } else {
                throw ArgumentError("unknown schedule: " + s);
            }
        }
    }
    if (j.contains("root_heuristic")) {
        cfg.root_heuristic = parse_root_heuristic(j["root_heuristic"].get<std::string>());
    }
    if (j.contains("field_scale")) cfg.field_scale = j["field_scale"].get<double>();
    if (j.contains("measure_time")) cfg.measure_time = j["measure_time"].get<bool>();
    if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
}

} // namespace

ExperimentConfig config_from_json(const std::string& text) {
    ExperimentConfig cfg;
    try {
        parse_config_fields(nlohmann::json::parse(text), cfg);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("bad experiment config: ") + e.what());
    }
    if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
    for (double s : cfg.sigmas) {
        if (s < 0.0) throw ArgumentError("sigma must be >= 0");
    }
    if (cfg.sigmas.empty() || cfg.algorithms.empty()) {
        throw ArgumentError("config needs at least one sigma and one algorithm");
    }
    return cfg;
}

ExperimentConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open config file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

namespace {

struct TrialTask {
    int sigma_index;
    int trial;
};

std::vector<TrialRecord> run_one_trial(const ExperimentConfig& cfg,
                                       int sigma_index, int trial) {
    const double sigma = cfg.sigmas[sigma_index];
    const std::uint64_t trial_seed = splitmix64(
        splitmix64(cfg.master_seed) ^
        (static_cast<std::uint64_t>(sigma_index) * 0x100000001b3ULL +
         static_cast<std::uint64_t>(trial)));

    UndirectedGraph g = [&]() -> UndirectedGraph {
        switch (cfg.graph.kind) {
            case GraphSpec::Kind::Grid:
                return gen_grid(cfg.graph.rows, cfg.graph.cols);
            case GraphSpec::Kind::RandomRegular: {
                auto rng = derive_rng(trial_seed, 0x67726170);
                return gen_random_regular(cfg.graph.n, cfg.graph.degree, rng);
            }
            case GraphSpec::Kind::File:
                return read_edge_list_file(cfg.graph.path);
        }
        throw ArgumentError("bad graph spec");
    }();

    IsingConfig icfg;
    icfg.potential_kind = cfg.potential;
    icfg.interaction_strength = sigma;
    icfg.field_scale = cfg.field_scale;
    icfg.seed = splitmix64(trial_seed ^ 0x69736e67ULL);
    FactorModel model = ising_model(g, icfg);

    MarginalSet truth = exact_elimination(model);

    std::vector<TrialRecord> out;
    for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
        const auto& alg = cfg.algorithms[ai];
        TrialRecord rec;
        rec.algorithm = alg.label;
        rec.potential = potential_kind_name(cfg.potential);
        rec.sigma = sigma;
        rec.trial = trial;
        rec.seed = trial_seed;
        switch (alg.kind) {
            case AlgorithmSpec::Kind::PlainBp: {
                auto report = belief_propagation(model, cfg.bp);
                rec.error = mean_abs_error(report.marginals, truth);
                rec.time_s = report.wall_seconds;
                rec.converged = report.converged;
                break;
            }
            case AlgorithmSpec::Kind::BlockBp:
            case AlgorithmSpec::Kind::RandBlockBp: {
                GeneralizedOptions opts;
                opts.m = alg.m;
                opts.root = RootPolicy::heuristic_policy(cfg.root_heuristic);
                opts.settings = cfg.bp;
                opts.random_split = alg.kind == AlgorithmSpec::Kind::RandBlockBp;
                opts.split_seed = splitmix64(trial_seed ^ (0x73706c69ULL + ai));
                auto report = generalized_inference(model, g, opts);
                rec.error = mean_abs_error(report.marginals, truth);
                rec.time_s = report.wall_seconds;
                rec.converged = report.converged;
                break;
            }
            case AlgorithmSpec::Kind::Exact: {
                auto t0 = std::chrono::steady_clock::now();
                MarginalSet est = exact_elimination(model);
                rec.time_s = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
                rec.error = mean_abs_error(est, truth);
                rec.converged = true;
                break;
            }
        }
        if (!cfg.measure_time) rec.time_s = 0.0;
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, int num_threads) {
    // Fail fast if exact ground truth is infeasible, before burning trials.
    {
        auto probe = run_one_trial(cfg, 0, 0);
        (void)probe;
    }

    std::vector<TrialTask> tasks;
    for (int si = 0; si < static_cast<int>(cfg.sigmas.size()); ++si) {
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({si, t});
    }
    std::vector<std::vector<TrialRecord>> results(tasks.size());

#ifdef _OPENMP
    int threads = num_threads > 0 ? num_threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < static_cast<int>(tasks.size()); ++i) {
        results[i] = run_one_trial(cfg, tasks[i].sigma_index, tasks[i].trial);
    }
#else
    (void)num_threads;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        results[i] = run_one_trial(cfg, tasks[i].sigma_index, tasks[i].trial);
    }
#endif

    std::vector<TrialRecord> records;
    for (auto& r : results) {
        records.insert(records.end(), std::make_move_iterator(r.begin()),
                       std::make_move_iterator(r.end()));
    }
    return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
    if (records.empty()) {
        throw ArgumentError("summarize: no records");
    }
    std::vector<SummaryRow> rows;
    for (const auto& rec : records) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
            return r.algorithm == rec.algorithm && r.potential == rec.potential &&
                   r.sigma == rec.sigma;
        });
        if (it == rows.end()) {
            rows.push_back({rec.algorithm, rec.potential, rec.sigma, 0, 0.0, 0.0});
            it = rows.end() - 1;
        }
        it->trials += 1;
        it->mean_error += rec.error;
        it->mean_time_s += rec.time_s;
    }
    for (auto& r : rows) {
        r.mean_error /= r.trials;
        r.mean_time_s /= r.trials;
    }
    return rows;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "algorithm" << std::setw(6) << "pot"
        << std::setw(8) << "sigma" << std::setw(8) << "trials" << std::setw(12)
        << "error" << "time_s\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(16) << r.algorithm << std::setw(6) << r.potential
            << std::setw(8) << r.sigma << std::setw(8) << r.trials << std::setw(12)
            << std::setprecision(4) << std::fixed << r.mean_error
            << std::setprecision(4) << r.mean_time_s << "\n";
        out.unsetf(std::ios::fixed);
        out << std::setprecision(6);
    }
    return out.str();
}

namespace {

std::string format_double(double x) {
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
}

} // namespace

std::string records_to_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream out;
    out << "algorithm,potential,sigma,trial,seed,error,time_s,converged\n";
    for (const auto& r : records) {
        out << r.algorithm << "," << r.potential << "," << format_double(r.sigma)
            << "," << r.trial << "," << r.seed << "," << format_double(r.error) << ","
            << format_double(r.time_s) << "," << (r.converged ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string records_to_json(const std::vector<TrialRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"algorithm", r.algorithm},
                       {"potential", r.potential},
                       {"sigma", r.sigma},
                       {"trial", r.trial},
                       {"seed", r.seed},
                       {"error", r.error},
                       {"time_s", r.time_s},
                       {"converged", r.converged}});
    }
    return arr.dump(2);
}

std::vector<TrialRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ArgumentError("empty CSV");
    }
    if (line != "algorithm,potential,sigma,trial,seed,error,time_s,converged") {
        throw ArgumentError("unexpected CSV header: " + line);
    }
    std::vector<TrialRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        TrialRecord r;
        std::getline(ls, r.algorithm, ',');
        std::getline(ls, r.potential, ',');
        std::getline(ls, field, ',');
        r.sigma = std::stod(field);
        std::getline(ls, field, ',');
        r.trial = std::stoi(field);
        std::getline(ls, field, ',');
        r.seed = std::stoull(field);
        std::getline(ls, field, ',');
        r.error = std::stod(field);
        std::getline(ls, field, ',');
        r.time_s = std::stod(field);
        std::getline(ls, field, ',');
        r.converged = field == "1";
        records.push_back(std::move(r));
    }
    return records;
}

void emit_results(const std::vector<TrialRecord>& records, ResultFormat format,
                  const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ArgumentError("cannot write results file: " + path);
    }
    out << (format == ResultFormat::Csv ? records_to_csv(records)
                                        : records_to_json(records));
    if (!out) {
        throw ArgumentError("write failed: " + path);
    }
}

} // namespace blockinfer
