#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scldpc/bp.hpp"
#include "scldpc/campaign.hpp"
#include "scldpc/csvio.hpp"
#include "scldpc/ensemble.hpp"
#include "scldpc/scaling.hpp"
#include "scldpc/stream.hpp"

namespace scldpc {

struct validation_error : std::runtime_error {
    explicit validation_error(const std::vector<std::string>& problems);
    std::vector<std::string> problems;
};

enum class RunMode { simulate, threshold, evolve, scaling, window_sim };

enum class Decoder { pd, bp, window };

struct ExperimentConfig {
    RunMode mode = RunMode::simulate;
    std::string ensemble;  // "family:l,r,..." or a matrix file path
    int M = 500;
    std::string channel = "bec";  // bec | biawgn
    std::vector<double> grid;     // eps or Eb/N0 values
    long long trials = 100;
    std::uint64_t base_seed = 1;
    Decoder decoder = Decoder::pd;
    int W = 12;
    std::string out_dir;
    int threads = 0;
    bool avoid_4cycles = false;
    bool overwrite = false;
    double tol = 1e-4;        // threshold / region bisection
    double eps = 0.45;        // evolve mode
    double sample_tau = 0.0;  // evolve CSV stride in tau units; 0 = every sample
    ScalingParams scaling;
    int n_chains = 1;  // scaling predictions
    int bp_max_iterations = 200;
    double llr_clip = 25.0;
};

/// Flat key=value file; '#' starts a comment. Unknown keys are rejected.
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_config_entries(ExperimentConfig& cfg, const std::map<std::string, std::string>& entries);

/// Grid helpers: "a:b:step" inclusive sweep or "x,y,z" list.
std::vector<double> parse_grid(const std::string& spec);

/// "family:l,r,params" specs or a path to a serialized matrix.
ConnectivityMatrix resolve_ensemble(const std::string& spec);

void validate(const ExperimentConfig& cfg);

struct RunManifest {
    std::string tool_version;
    int schema_version = 1;
    std::string mode;
    std::string matrix_hash;
    std::uint64_t base_seed = 0;
    std::string started_utc;
    std::string finished_utc;
    std::string status;  // complete | incomplete
};

/// Runs the configured experiment into cfg.out_dir: writes manifest.json,
/// the matrix, and the mode's artifacts (bler.csv, trajectory.csv,
/// threshold.json, prediction.csv, window_compare.csv). Returns the
/// directory path.
std::string run_experiment(const ExperimentConfig& cfg);

/// Inner join of a Monte Carlo table and a prediction table on their shared
/// grid column, with a prediction/empirical ratio column.
CsvTable overlay(const CsvTable& bler, const CsvTable& prediction,
                 const std::string& pred_col = "p_short");

CsvTable bler_to_csv(const BlerTable& table);
CsvTable predictions_to_csv(const std::vector<PredictionRow>& rows);
CsvTable window_rows_to_csv(const std::vector<WindowCompareRow>& rows);
CsvTable trajectory_to_csv(const Trajectory& traj, double sample_tau);

extern const char* kToolVersion;

}  // namespace scldpc
