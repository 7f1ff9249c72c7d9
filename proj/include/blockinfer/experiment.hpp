#ifndef BLOCKINFER_EXPERIMENT_HPP
#define BLOCKINFER_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "blockinfer/inference.hpp"
#include "blockinfer/model.hpp"

namespace blockinfer {

// (1/p) sum over variables of the L1 distance between estimated and true
// marginals.  In [0, 2] for normalized inputs.
double mean_abs_error(const MarginalSet& est, const MarginalSet& truth);

struct GraphSpec {
    enum class Kind { Grid, RandomRegular, File };
    Kind kind = Kind::Grid;
    int rows = 0, cols = 0;  // Grid
    int n = 0, degree = 0;   // RandomRegular (redrawn per trial)
    std::string path;        // File
};

// Labels: "bp", "b<m>-bp", "rand-b<m>-bp", "exact".
struct AlgorithmSpec {
    enum class Kind { PlainBp, BlockBp, RandBlockBp, Exact };
    Kind kind = Kind::PlainBp;
    int m = 1;
    std::string label;
};

AlgorithmSpec parse_algorithm(const std::string& label);

struct ExperimentConfig {
    GraphSpec graph;
    PotentialKind potential = PotentialKind::REP;
    std::vector<double> sigmas;
    std::vector<AlgorithmSpec> algorithms;
    int trials = 1;
    std::uint64_t master_seed = 0;
    BpSettings bp;
    RootHeuristic root_heuristic = RootHeuristic::GreedyFillin;
    double field_scale = 0.1;
    bool measure_time = true; // false: record 0 so reruns are byte-identical
    std::string output_path;  // empty: stdout only
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig read_config_file(const std::string& path);

struct TrialRecord {
    std::string algorithm;
    std::string potential;
    double sigma = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double error = 0.0;
    double time_s = 0.0;
    bool converged = false;
};

// One Ising model per (sigma, trial) from a seed stream derived from the
// master seed, ground truth once per model, every algorithm on the same
// model.  Trials run OpenMP-parallel; the record list is identical for any
// worker count.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg,
                                        int num_threads = 0);

struct SummaryRow {
    std::string algorithm;
    std::string potential;
    double sigma = 0.0;
    int trials = 0;
    double mean_error = 0.0;
    double mean_time_s = 0.0;
};

// Per (algorithm, potential, sigma) means, in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);
std::string summary_table(const std::vector<SummaryRow>& rows);

std::string records_to_csv(const std::vector<TrialRecord>& records);
std::string records_to_json(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> records_from_csv(const std::string& text);

enum class ResultFormat { Csv, Json };
void emit_results(const std::vector<TrialRecord>& records, ResultFormat format,
                  const std::string& path);

} // namespace blockinfer

#endif
