#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "simbound/solve.hpp"
#include "simbound/verify.hpp"

namespace simbound {

/// Configuration shared by the experiment suites. Defaults reproduce the
/// reference studies; defaults_for() adjusts the fields that differ per
/// suite (layer counts, widths, seed counts, input dimension).
struct ExperimentConfig {
    std::string suite = "similarity";
    std::uint64_t base_seed = 1;
    int num_seeds = 100;
    std::vector<int> layer_counts = {1, 2, 3, 4};
    int width = 10;
    int input_dim = 1;
    int output_dim = 1;
    double box_radius = 1.0;
    ObjectiveWeights weights;
    int tightness_grid = 100; // per-axis sample count for the T statistics

    // quantisation suites
    int integer_bits = 8;
    int fraction_bits = 2;

    // worst-case sweep
    std::vector<int> fraction_bits_list = {1, 2, 3, 4, 5};
    int worst_case_grid = 1001;

    // pruning
    int prune_count = 8;
    int surface_grid = 100;

    SolveOptions solve;

    static ExperimentConfig defaults_for(const std::string &suite);
    static ExperimentConfig from_json_text(const std::string &text);
    std::string to_json_text() const;
    void validate() const;
};

/// One solved instance. For the T-statistics suites, mean/max/min are over
/// the finite T samples with the -inf sentinels counted separately; the
/// worst-case suite fills the paired max bound/error fields instead.
struct SeedRow {
    std::uint64_t seed = 0;
    int layers = 0;
    int fraction_bits = 0;
    double delta = 0.0;
    SolveStatus status = SolveStatus::NumericalFailure;
    GammaValues gammas;
    double mean_T = 0.0;
    double max_T = 0.0;
    double min_T = 0.0;
    int neg_inf_count = 0;
    int unsound_count = 0;
    int samples = 0;
    double max_bound = 0.0;
    double error_at_max_bound = 0.0;
    double max_error = 0.0;
    double bound_at_max_error = 0.0;
    double max_violation = 0.0;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
};

struct CurvePoint {
    double x = 0.0;
    double error_sq = 0.0;
    double bound = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<SeedRow> rows;
    std::map<int, std::vector<CurvePoint>> curves;        // quantisation: first seed per layer count
    std::vector<std::array<double, 4>> surface;           // pruning: x0, x1, error^2, bound
    double surface_max_violation = 0.0;

    std::string rows_csv() const;
    std::string to_json_text() const;
};

ExperimentReport run_similarity_experiment(const ExperimentConfig &config);
ExperimentReport run_quantisation_experiment(const ExperimentConfig &config);
ExperimentReport run_worst_case_experiment(const ExperimentConfig &config);
ExperimentReport run_pruning_experiment(const ExperimentConfig &config);
ExperimentReport run_experiment(const ExperimentConfig &config);

/// Writes config.json, report.json, per_seed.csv and the suite-specific
/// curve/surface CSVs into the directory (created if needed).
void write_experiment_outputs(const ExperimentReport &report, const std::filesystem::path &dir);

} // namespace simbound
