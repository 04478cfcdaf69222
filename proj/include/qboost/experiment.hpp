#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qboost/adiabatic.hpp"
#include "qboost/boosting.hpp"
#include "qboost/data.hpp"
#include "qboost/solvers.hpp"

namespace qboost {

inline const std::vector<std::string> kTasks{"gen-data", "train", "compare", "sweep-overlap", "gap-analysis",
                                             "scaling"};
inline const std::vector<std::string> kAlgorithms{"qboost-inner", "qboost-outer", "adaboost", "baseline"};

struct DataConfig {
  std::string source = "gaussian";  // gaussian | box | csv
  std::size_t dimension = 30;
  double overlap = 0.95;
  std::size_t samples = 3000;
  std::string csv_path;
  bool csv_header = false;
  bool normalize = false;
};

struct DictionaryConfig {
  bool order1 = true;
  bool order2 = true;
};

/// Zero means "size-dependent default".
struct SolverConfig {
  std::string kind = "tabu";  // tabu | exhaustive
  std::size_t tenure = 0;
  std::size_t max_iterations = 0;
  std::size_t restarts = 0;
  std::size_t stall_limit = 0;
};

struct TrainConfig {
  std::string algorithm = "qboost-outer";
  std::size_t Q = 32;
  std::vector<double> lambdas;  // empty: default grid
  std::string mode = "replace-all";
  double scale = 2.0;
  std::size_t patience = 2;
  std::size_t max_iterations = 50;
  std::size_t max_passes = 50;
  bool refit_thresholds = true;
  bool co_optimize_theta = false;  // baseline only
  std::size_t adaboost_patience = 400;
  std::size_t adaboost_max_rounds = 20000;
};

struct CompareConfig {
  std::size_t seeds = 1;
};

struct SweepConfig {
  std::vector<double> overlaps{0.8, 0.95, 1.0};
  std::vector<std::string> algorithms{"qboost-outer", "adaboost"};
  std::vector<std::size_t> Q_values{32};
  std::size_t seeds = 20;
};

struct GapConfig {
  std::size_t qubits = 8;
  std::size_t samples = 40;
  std::size_t grid_points = kDefaultGridPoints;
  std::string method = "lanczos";  // lanczos | dense
  std::string problem_path;        // optional QUBO file instead of a synthetic instance
};

struct ScalingConfig {
  std::vector<std::size_t> qubits{6, 8, 10, 12};
  std::size_t runs = 20;
  std::size_t samples = 40;
  std::size_t grid_points = kDefaultGridPoints;
};

struct ExperimentConfig {
  std::string task = "train";
  std::uint64_t seed = 1;
  std::string out = "out";
  DataConfig data;
  DictionaryConfig dictionary;
  SolverConfig solver;
  TrainConfig train;
  CompareConfig compare;
  SweepConfig sweep;
  GapConfig gap;
  ScalingConfig scaling;
};

/// Every problem found while reading or validating a configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

ExperimentConfig default_config(const std::string& task);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);
/// Overlays `j` on the task defaults. Unknown keys, wrong types and invalid
/// values are collected and thrown together as one ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& task);
/// Semantic checks (ranges, choices, referenced paths, Q against the
/// dictionary size). Throws ConfigError listing everything.
void validate(const ExperimentConfig& config);

/// Seed derivation, all from the root seed:
///   data seed of replica r   = derive_seed(root, "data", r)
///   split seed of replica r  = derive_seed(root, "split", r)
///   solver seed of replica r = derive_seed(root, "solver", r)
///   gap / scaling instance   = derive_seed(root, "instance", n * 1000003 + run)
struct ReplicaSeeds {
  std::uint64_t data;
  std::uint64_t split;
  std::uint64_t solver;
};
ReplicaSeeds replica_seeds(std::uint64_t root, std::size_t replica);

Dataset make_dataset(const DataConfig& data, std::uint64_t seed);
QuboSolver make_solver(const SolverConfig& solver, std::uint64_t seed);

struct RunResult {
  StrongClassifier classifier;
  TrainReport report;
};
/// Builds the initial dictionary on split.train and runs one algorithm.
RunResult train_algorithm(const ExperimentConfig& config, const std::string& algorithm, std::size_t Q,
                          const SplitDataset& split, std::uint64_t solver_seed);

struct SweepRun {
  double overlap;
  std::string algorithm;
  std::size_t Q;
  std::size_t replica;
  double test_error;
  std::size_t weak_learners;
};
struct SweepRow {
  double overlap;
  std::string algorithm;
  std::size_t Q;
  double mean_test_error;
  double std_test_error;
  double mean_weak_learners;
  double std_weak_learners;
};
struct SweepResult {
  std::vector<SweepRun> runs;  // in (overlap, replica, algorithm, Q) order
  std::vector<SweepRow> rows;  // in (overlap, algorithm, Q) order
};
/// AdaBoost ignores Q; it runs once per dataset and fills every Q row.
SweepResult sweep_overlap(const ExperimentConfig& config);

/// Runs config.task and writes its artifacts into config.out.
void run_experiment(const ExperimentConfig& config);

/// Machine-readable error document.
nlohmann::ordered_json error_json(const std::string& kind, const std::vector<std::string>& messages);

}  // namespace qboost
