#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdppp/decorations.hpp"

namespace sdppp {

// Flat key=value experiment description; round-trips losslessly through
// to_kv()/parse_kv(). The CLI layers flag overrides on top of a config file.
struct ExperimentConfig {
    std::string experiment = "validate-exact";
    std::string model_kind = "PointMass";
    double model_a = 1.0;
    double model_b = 2.0;
    double model_gamma = 0.5;
    std::vector<double> beta_grid;  // empty = experiment default
    double beta = 2.0;
    double beta_prime = 2.0;
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 1;
    double trunc_tol = 1e-6;
    std::uint64_t n_atoms = 0;  // 0 = adaptive per beta
    int workers = 1;
    bool quick = false;
    bool event_check = false;  // REM scan conditional-event diagnostic
    double bbm_t = 20.0;
    std::uint64_t bbm_runs = 1000;
    std::uint64_t bbm_max_population = 1u << 20;
    std::uint64_t bbm_pairs = 4000;
    std::string out_dir = "out";

    DecorationModel model() const;
    std::string to_kv() const;
    static ExperimentConfig parse_kv(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
};

// Runs one experiment: writes manifest.json, result CSVs and summary.txt into
// out_dir. Returns the process exit status (0 = success and all invoked
// checks passed). Any module error lands in error.json with status 3.
int run_experiment(const ExperimentConfig& config);

}  // namespace sdppp
