#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qboost/data.hpp"
#include "qboost/solvers.hpp"
#include "qboost/stumps.hpp"

namespace qboost {

struct WeightedStump {
  Stump stump;
  double alpha = 1.0;  // 1 for QBoost; the AdaBoost step size otherwise

  friend bool operator==(const WeightedStump&, const WeightedStump&) = default;
};

/// sign(sum_t alpha_t h_t(x) - theta), with sign(0) = +1.
class StrongClassifier {
 public:
  StrongClassifier() = default;
  StrongClassifier(std::vector<WeightedStump> terms, double kappa, double theta);

  std::span<const WeightedStump> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  double kappa() const { return kappa_; }
  double theta() const { return theta_; }

  double score(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return score(x) - theta_ >= 0.0 ? 1 : -1; }

  friend bool operator==(const StrongClassifier&, const StrongClassifier&) = default;

 private:
  std::vector<WeightedStump> terms_;
  double kappa_ = 1.0;
  double theta_ = 0.0;
};

/// Fraction of misclassified samples.
double test_error(const StrongClassifier& classifier, const Dataset& data);

/// Mean unthresholded score over the training set, (1/S) sum_s sum_t alpha_t h_t(x_s).
double compute_theta(std::span<const WeightedStump> terms, const Dataset& train);

/// d(s) * (score_s - y_s)^2 with 1e-12/S added to every multiplier, then
/// normalised. `scores` are mean weak-classifier outputs in [-1, 1].
SampleWeights update_sample_weights(const SampleWeights& d, std::span<const double> scores,
                                    std::span<const int> labels);

/// VC dimension bound of a T-term sum: 2 (vc_dict + 1)(T + 1) log2(e (T + 1)).
double vc_bound(double vc_dict, std::size_t T);
/// train_error + sqrt((vc_h ln(2S / vc_h + 1) + ln(9 / delta)) / S).
double generalization_bound(double train_error, double vc_h, std::size_t S, double delta);

struct IterationRecord {
  std::size_t pass = 0;
  std::size_t iteration = 0;
  std::size_t weak_learners = 0;  // strong-classifier size after this iteration
  std::size_t t_inner = 0;
  double train_error = 0.0;
  double validation_error = 0.0;
  double lambda = 0.0;
  double objective = 0.0;  // solver energy (QBoost) or exponential-loss step error (AdaBoost)
  double epsilon = 0.0;    // AdaBoost weighted error
  double alpha = 0.0;      // AdaBoost step size
  std::uint64_t solver_evaluations = 0;
  double solver_seconds = 0.0;
  std::vector<double> sweep_validation_errors;  // one per lambda, QBoost only
};

struct TrainReport {
  std::string algorithm;
  std::vector<IterationRecord> iterations;
  std::vector<std::size_t> pass_t_inner;  // outer loop: T_inner of every pass run
  std::size_t kept_passes = 0;            // outer loop: passes in the returned classifier
  double train_error = 0.0;
  double validation_error = 0.0;
  double test_error = 0.0;
  std::size_t weak_learner_count = 0;
  std::size_t rounds = 0;  // boosting rounds / loop iterations executed
  double wall_seconds = 0.0;
};

struct AdaBoostOptions {
  std::size_t patience = 400;
  std::size_t max_rounds = 20000;
  /// Refit every dictionary key's threshold to the current weights each round.
  bool refit_thresholds = true;
};

/// Discrete AdaBoost over the dictionary's stump keys. Stops after `patience`
/// rounds without a strictly lower validation error, when the best weighted
/// error reaches 1/2, or right after a zero-error round; returns the prefix
/// with the lowest validation error (earliest on ties).
std::pair<StrongClassifier, TrainReport> adaboost_train(const Dictionary& dictionary,
                                                        const SplitDataset& split,
                                                        const AdaBoostOptions& options = {});

enum class SelectionMode { augment, replace_all };

struct QBoostOptions {
  std::size_t Q = 32;
  std::vector<double> lambdas;  // empty: default_lambda_grid(Q)
  SelectionMode mode = SelectionMode::replace_all;
  double scale = 2.0;           // kappa = scale / (number of summed classifiers)
  std::size_t patience = 2;
  std::size_t max_iterations = 50;  // inner-loop iterations per call
  std::size_t max_passes = 50;      // outer-loop passes
  bool refit_thresholds = true;
};

/// lambda = 0 followed by 16 geometric values from 1e-3 to 1e2 times
/// 2/n + 1/n^2.
std::vector<double> default_lambda_grid(std::size_t n);

std::pair<StrongClassifier, TrainReport> inner_loop_train(const Dictionary& dictionary,
                                                          const SplitDataset& split,
                                                          const QBoostOptions& options,
                                                          const QuboSolver& solver);

std::pair<StrongClassifier, TrainReport> outer_loop_train(const Dictionary& dictionary,
                                                          const SplitDataset& split,
                                                          const QBoostOptions& options,
                                                          const QuboSolver& solver);

struct BaselineOptions {
  std::vector<double> lambdas;  // empty: default_lambda_grid(|dictionary|)
  double scale = 2.0;
  /// Optimise a binary-expanded global threshold together with the weights.
  bool co_optimize_theta = false;
};

/// One global optimisation over the whole dictionary, lambda picked on the
/// validation set.
std::pair<StrongClassifier, TrainReport> baseline_train(const Dictionary& dictionary,
                                                        const SplitDataset& split,
                                                        const BaselineOptions& options,
                                                        const QuboSolver& solver);

/// Model text format:
///   qboost-model 1
///   kappa <v>
///   theta <v>
///   stumps <count>
///   <order> <i> <j> <+|-> <threshold> <alpha>     (one line per stump)
void write_model(std::ostream& out, const StrongClassifier& classifier);
StrongClassifier read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const StrongClassifier& classifier);
StrongClassifier load_model(const std::filesystem::path& path);

/// One row per iteration record. Wall-clock fields are left out so the file
/// is reproducible byte for byte.
void write_report_csv(std::ostream& out, const TrainReport& report);

}  // namespace qboost
