#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "qboost/boosting.hpp"
#include "qboost/qubo.hpp"

namespace qboost {

std::vector<double> default_lambda_grid(std::size_t n) {
  if (n == 0) throw std::invalid_argument("lambda grid: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double weak = 2.0 / nd + 1.0 / (nd * nd);
  constexpr int kSteps = 16;
  std::vector<double> grid{0.0};
  for (int k = 0; k < kSteps; ++k) {
    const double exponent = -3.0 + 5.0 * k / (kSteps - 1);
    grid.push_back(weak * std::pow(10.0, exponent));
  }
  return grid;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double thresholded_error(std::span<const double> scores, double theta, std::span<const int> labels) {
  std::size_t wrong = 0;
  for (std::size_t s = 0; s < scores.size(); ++s)
    if ((scores[s] - theta >= 0.0 ? 1 : -1) != labels[s]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

double mean(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

std::vector<WeightedStump> unit_terms(std::span<const Stump> stumps) {
  std::vector<WeightedStump> out;
  out.reserve(stumps.size());
  for (const Stump& s : stumps) out.push_back({s, 1.0});
  return out;
}

// Shared state of the inner and outer loops.
struct Loop {
  const Dictionary& dictionary;
  const SplitDataset& split;
  const QBoostOptions& options;
  const QuboSolver& solver;
  std::vector<double> lambdas;
  std::vector<int> y_train;
  std::vector<int> y_val;
  std::optional<StumpFitter> fitter;

  Loop(const Dictionary& dict, const SplitDataset& sp, const QBoostOptions& opts, const QuboSolver& sol)
      : dictionary(dict), split(sp), options(opts), solver(sol) {
    if (dict.empty()) throw std::invalid_argument("qboost: empty dictionary");
    if (dict.dimension() != sp.train.dimension())
      throw std::invalid_argument("qboost: dictionary dimension differs from the data");
    if (opts.Q < 1) throw std::invalid_argument("qboost: Q must be >= 1");
    if (opts.Q > dict.size()) {
      throw std::invalid_argument("qboost: Q = " + std::to_string(opts.Q) +
                                  " exceeds the dictionary size " + std::to_string(dict.size()));
    }
    if (!(opts.scale > 0.0)) throw std::invalid_argument("qboost: scale must be positive");
    lambdas = opts.lambdas.empty() ? default_lambda_grid(opts.Q) : opts.lambdas;
    y_train = sp.train.labels();
    y_val = sp.validation.labels();
    if (opts.refit_thresholds) fitter.emplace(sp.train, dict.keys());
  }

  struct Frozen {
    std::vector<Stump> stumps;
    std::vector<double> train_scores;
    std::vector<double> val_scores;
  };

  struct InnerOutcome {
    std::vector<Stump> chosen;
    double validation_error = std::numeric_limits<double>::infinity();
    double kappa = 1.0;
  };

  std::vector<Stump> candidates(const Dictionary& dict, const SampleWeights& d,
                                const std::vector<Stump>& retained) const {
    if (options.mode == SelectionMode::replace_all)
      return select_top_k(dict, split.train, d, options.Q);
    std::set<StumpKey> exclude;
    for (const Stump& s : retained) exclude.insert(s.key);
    std::size_t available = 0;
    for (const Stump& s : dict.stumps())
      if (!exclude.contains(s.key)) ++available;
    const std::size_t want = options.Q - std::min(options.Q, retained.size());
    std::vector<Stump> out = retained;
    for (Stump& s : select_top_k(dict, split.train, d, std::min(want, available), exclude))
      out.push_back(std::move(s));
    return out;
  }

  // One inner loop on top of a frozen prefix, which is empty
  // outside the outer loop.
  InnerOutcome inner(SampleWeights d, const Frozen& frozen, std::size_t pass, TrainReport& report) const {
    const std::size_t S = split.train.size();
    const std::size_t V = split.validation.size();
    const double kappa = options.scale / static_cast<double>(frozen.stumps.size() + options.Q);

    InnerOutcome best;
    best.kappa = kappa;
    std::vector<Stump> retained;
    std::size_t since_best = 0;

    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      std::optional<Dictionary> refit;
      if (fitter) refit = fitter->fit(d);
      const Dictionary& dict = refit ? *refit : dictionary;

      const std::vector<Stump> cand = candidates(dict, d, retained);
      const PredictionMatrix h_train = predict_matrix(cand, split.train);
      const PredictionMatrix h_val = predict_matrix(cand, split.validation);

      IterationRecord rec;
      rec.pass = pass;
      rec.iteration = it;
      rec.validation_error = std::numeric_limits<double>::infinity();
      std::vector<Stump> chosen;
      std::vector<double> chosen_train_scores;

      for (double lambda : lambdas) {
        const QuboProblem q =
            build_training_qubo(h_train, y_train, kappa, lambda, std::span<const double>(frozen.train_scores));
        const SolverResult res = solver(q);
        rec.solver_evaluations += res.evaluations;
        rec.solver_seconds += res.wall_time.count();

        std::vector<double> train_scores = frozen.train_scores;
        std::vector<double> val_scores = frozen.val_scores;
        std::vector<Stump> picked;
        for (std::size_t i = 0; i < cand.size(); ++i) {
          if (!res.assignment[i]) continue;
          picked.push_back(cand[i]);
          for (std::size_t s = 0; s < S; ++s) train_scores[s] += h_train(s, i);
          for (std::size_t s = 0; s < V; ++s) val_scores[s] += h_val(s, i);
        }
        const double theta = mean(train_scores);
        const double val_err = thresholded_error(val_scores, theta, y_val);
        rec.sweep_validation_errors.push_back(val_err);
        if (val_err < rec.validation_error) {  // ties keep the smaller lambda
          rec.validation_error = val_err;
          rec.lambda = lambda;
          rec.objective = res.energy;
          rec.train_error = thresholded_error(train_scores, theta, y_train);
          chosen = std::move(picked);
          chosen_train_scores = std::move(train_scores);
        }
      }

      rec.t_inner = chosen.size();
      rec.weak_learners = frozen.stumps.size() + chosen.size();
      report.iterations.push_back(rec);

      // Reweight by the squared residual of the mean vote.
      std::vector<double> mean_vote(S, 0.0);
      if (rec.weak_learners > 0) {
        for (std::size_t s = 0; s < S; ++s)
          mean_vote[s] = chosen_train_scores[s] / static_cast<double>(rec.weak_learners);
      }
      d = update_sample_weights(d, mean_vote, y_train);
      retained = chosen;

      if (rec.validation_error < best.validation_error) {
        best.validation_error = rec.validation_error;
        best.chosen = std::move(chosen);
        since_best = 0;
      } else if (++since_best >= options.patience) {
        break;
      }
    }
    return best;
  }
};

void finish_report(TrainReport& report, const StrongClassifier& classifier, const SplitDataset& split,
                   Clock::time_point start) {
  report.rounds = report.iterations.size();
  report.weak_learner_count = classifier.size();
  report.train_error = test_error(classifier, split.train);
  report.validation_error = test_error(classifier, split.validation);
  report.test_error = test_error(classifier, split.test);
  report.wall_seconds = elapsed(start);
}

}  // namespace

std::pair<StrongClassifier, TrainReport> inner_loop_train(const Dictionary& dictionary,
                                                          const SplitDataset& split,
                                                          const QBoostOptions& options,
                                                          const QuboSolver& solver) {
  const auto start = Clock::now();
  const Loop loop(dictionary, split, options, solver);
  TrainReport report;
  report.algorithm = "qboost-inner";

  Loop::Frozen empty;
  empty.train_scores.assign(split.train.size(), 0.0);
  empty.val_scores.assign(split.validation.size(), 0.0);
  Loop::InnerOutcome out = loop.inner(SampleWeights::uniform(split.train.size()), empty, 0, report);

  std::vector<WeightedStump> terms = unit_terms(out.chosen);
  const double theta = compute_theta(terms, split.train);
  StrongClassifier classifier(std::move(terms), out.kappa, theta);
  report.pass_t_inner = {classifier.size()};
  report.kept_passes = 1;
  finish_report(report, classifier, split, start);
  return {std::move(classifier), std::move(report)};
}

std::pair<StrongClassifier, TrainReport> outer_loop_train(const Dictionary& dictionary,
                                                          const SplitDataset& split,
                                                          const QBoostOptions& options,
                                                          const QuboSolver& solver) {
  const auto start = Clock::now();
  const Loop loop(dictionary, split, options, solver);
  TrainReport report;
  report.algorithm = "qboost-outer";

  const std::size_t S = split.train.size();
  Loop::Frozen frozen;
  frozen.train_scores.assign(S, 0.0);
  frozen.val_scores.assign(split.validation.size(), 0.0);
  SampleWeights d_outer = SampleWeights::uniform(S);

  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_size = 0;
  double best_kappa = options.scale / static_cast<double>(options.Q);
  std::size_t since_best = 0;

  for (std::size_t pass = 0; pass < options.max_passes; ++pass) {
    const Loop::InnerOutcome out = loop.inner(d_outer, frozen, pass, report);
    report.pass_t_inner.push_back(out.chosen.size());

    for (const Stump& stump : out.chosen) {
      frozen.stumps.push_back(stump);
      for (std::size_t s = 0; s < S; ++s) frozen.train_scores[s] += stump.evaluate(split.train[s].features);
      for (std::size_t s = 0; s < split.validation.size(); ++s)
        frozen.val_scores[s] += stump.evaluate(split.validation[s].features);
    }
    const std::size_t t_outer = frozen.stumps.size();
    std::vector<double> mean_vote(S, 0.0);
    if (t_outer > 0)
      for (std::size_t s = 0; s < S; ++s) mean_vote[s] = frozen.train_scores[s] / static_cast<double>(t_outer);
    d_outer = update_sample_weights(d_outer, mean_vote, loop.y_train);

    if (out.validation_error < best_val) {
      best_val = out.validation_error;
      best_size = t_outer;
      best_kappa = out.kappa;
      report.kept_passes = pass + 1;
      since_best = 0;
    } else if (++since_best >= options.patience) {
      break;
    }
  }

  frozen.stumps.resize(best_size);
  std::vector<WeightedStump> terms = unit_terms(frozen.stumps);
  const double theta = compute_theta(terms, split.train);
  StrongClassifier classifier(std::move(terms), best_kappa, theta);
  finish_report(report, classifier, split, start);
  return {std::move(classifier), std::move(report)};
}

std::pair<StrongClassifier, TrainReport> baseline_train(const Dictionary& dictionary,
                                                        const SplitDataset& split,
                                                        const BaselineOptions& options,
                                                        const QuboSolver& solver) {
  if (dictionary.empty()) throw std::invalid_argument("baseline: empty dictionary");
  const auto start = Clock::now();
  const std::size_t N = dictionary.size();
  const std::vector<double> lambdas = options.lambdas.empty() ? default_lambda_grid(N) : options.lambdas;
  const double kappa = options.scale / static_cast<double>(N);
  const std::vector<int> y_train = split.train.labels();
  const PredictionMatrix h_train = predict_matrix(dictionary.stumps(), split.train);

  TrainReport report;
  report.algorithm = options.co_optimize_theta ? "baseline-theta" : "baseline";
  IterationRecord rec;
  rec.validation_error = std::numeric_limits<double>::infinity();
  StrongClassifier best;

  for (double lambda : lambdas) {
    SolverResult res;
    std::optional<double> theta;
    if (options.co_optimize_theta) {
      auto [q, layout] = build_threshold_qubo(h_train, y_train, kappa, lambda);
      res = solver(q);
      const auto& bits = layout.block("theta");
      double t = 0.0;
      for (std::size_t k = 0; k < bits.count; ++k)
        if (res.assignment[bits.start + k]) t += std::ldexp(1.0, static_cast<int>(k));
      theta = t - (std::ldexp(1.0, static_cast<int>(bits.count - 1)) - 1.0);
    } else {
      res = solver(build_training_qubo(h_train, y_train, kappa, lambda));
    }
    rec.solver_evaluations += res.evaluations;
    rec.solver_seconds += res.wall_time.count();

    std::vector<Stump> picked;
    for (std::size_t i = 0; i < N; ++i)
      if (res.assignment[i]) picked.push_back(dictionary[i]);
    std::vector<WeightedStump> terms = unit_terms(picked);
    const double th = theta ? *theta : compute_theta(terms, split.train);
    StrongClassifier candidate(std::move(terms), kappa, th);
    const double val_err = test_error(candidate, split.validation);
    rec.sweep_validation_errors.push_back(val_err);
    if (val_err < rec.validation_error) {
      rec.validation_error = val_err;
      rec.lambda = lambda;
      rec.objective = res.energy;
      rec.train_error = test_error(candidate, split.train);
      rec.t_inner = candidate.size();
      rec.weak_learners = candidate.size();
      best = std::move(candidate);
    }
  }
  report.iterations.push_back(rec);
  report.pass_t_inner = {best.size()};
  report.kept_passes = 1;
  finish_report(report, best, split, start);
  return {std::move(best), std::move(report)};
}

}  // namespace qboost
