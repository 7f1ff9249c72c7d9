// Compares the serial trial runner against the OpenMP-parallel one on a
// fixed workload and checks the outputs match byte for byte.
#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "blockinfer/experiment.hpp"

using namespace blockinfer;

namespace {

ExperimentConfig workload() {
    ExperimentConfig cfg;
    cfg.graph.kind = GraphSpec::Kind::Grid;
    cfg.graph.rows = 8;
    cfg.graph.cols = 8;
    cfg.potential = PotentialKind::REP;
    cfg.sigmas = {0.5, 1.0};
    cfg.algorithms = {parse_algorithm("bp"), parse_algorithm("b2-bp"),
                      parse_algorithm("b3-bp")};
    cfg.trials = 16;
    cfg.master_seed = 7;
    cfg.measure_time = false;
    return cfg;
}

double timed_run(const ExperimentConfig& cfg, int threads, std::string& csv) {
    auto t0 = std::chrono::steady_clock::now();
    auto records = run_experiment(cfg, threads);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    csv = records_to_csv(records);
    return secs;
}

} // namespace

int main() {
    ExperimentConfig cfg = workload();
    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif

    std::string serial_csv, parallel_csv;
    double serial_s = timed_run(cfg, 1, serial_csv);
    double parallel_s = timed_run(cfg, max_threads, parallel_csv);

    std::cout << "trials x sigmas: " << cfg.trials << " x " << cfg.sigmas.size()
              << " on " << cfg.graph.rows << "x" << cfg.graph.cols << " grid\n";
    std::cout << "serial   (1 thread):  " << serial_s << " s\n";
    std::cout << "parallel (" << max_threads << " threads): " << parallel_s << " s\n";
    if (parallel_s > 0.0) {
        std::cout << "speedup: " << serial_s / parallel_s << "x\n";
    }
    if (serial_csv != parallel_csv) {
        std::cerr << "FAIL: serial and parallel results differ\n";
        return 1;
    }
    std::cout << "results identical across worker counts\n";
    return 0;
}
