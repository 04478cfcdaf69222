#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "qboost/boosting.hpp"

namespace qboost {

namespace {

constexpr double kEpsilonFloor = 1e-12;

double sign_error(std::span<const double> scores, std::span<const int> labels) {
  std::size_t wrong = 0;
  for (std::size_t s = 0; s < scores.size(); ++s)
    if ((scores[s] >= 0.0 ? 1 : -1) != labels[s]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

}  // namespace

std::pair<StrongClassifier, TrainReport> adaboost_train(const Dictionary& dictionary,
                                                        const SplitDataset& split,
                                                        const AdaBoostOptions& options) {
  if (dictionary.empty()) throw std::invalid_argument("adaboost: empty dictionary");
  if (dictionary.dimension() != split.train.dimension())
    throw std::invalid_argument("adaboost: dictionary dimension differs from the data");
  const auto start = std::chrono::steady_clock::now();

  const Dataset& train = split.train;
  const Dataset& val = split.validation;
  const std::vector<int> y_train = train.labels();
  const std::vector<int> y_val = val.labels();

  std::optional<StumpFitter> fitter;
  if (options.refit_thresholds) fitter.emplace(train, dictionary.keys());

  SampleWeights d = SampleWeights::uniform(train.size());
  std::vector<double> train_scores(train.size(), 0.0);
  std::vector<double> val_scores(val.size(), 0.0);
  std::vector<WeightedStump> terms;

  TrainReport report;
  report.algorithm = "adaboost";
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_rounds = 0;
  std::size_t since_best = 0;

  for (std::size_t round = 0; round < options.max_rounds; ++round) {
    // Weak learner with the smallest weighted error; lowest index on ties.
    Stump pick;
    double eps = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < dictionary.size(); ++k) {
      Stump candidate = dictionary[k];
      double err;
      if (fitter) {
        const auto fit = fitter->fit_one(k, d);
        candidate = fit.stump;
        err = fit.error;
      } else {
        err = weighted_error(candidate, train, d);
      }
      if (err < eps) {
        eps = err;
        pick = candidate;
      }
    }
    if (eps >= 0.5 - kEpsilonFloor) break;  // no weak learner beats chance

    const double clamped = std::clamp(eps, kEpsilonFloor, 1.0 - kEpsilonFloor);
    const double alpha = 0.5 * std::log((1.0 - clamped) / clamped);
    terms.push_back({pick, alpha});

    std::vector<double> masses(train.size());
    for (std::size_t s = 0; s < train.size(); ++s) {
      const int h = pick.evaluate(train[s].features);
      train_scores[s] += alpha * h;
      masses[s] = d[s] * std::exp(-alpha * y_train[s] * h);
    }
    d = SampleWeights::normalized(std::move(masses));
    for (std::size_t s = 0; s < val.size(); ++s) val_scores[s] += alpha * pick.evaluate(val[s].features);

    IterationRecord rec;
    rec.iteration = round;
    rec.weak_learners = terms.size();
    rec.train_error = sign_error(train_scores, y_train);
    rec.validation_error = sign_error(val_scores, y_val);
    rec.epsilon = eps;
    rec.alpha = alpha;
    rec.objective = eps;
    report.iterations.push_back(rec);

    if (rec.validation_error < best_val) {
      best_val = rec.validation_error;
      best_rounds = terms.size();
      since_best = 0;
    } else {
      ++since_best;
    }
    if (eps <= kEpsilonFloor) break;  // perfect weak learner: the weights stop moving
    if (since_best >= options.patience) break;
  }

  terms.resize(best_rounds);
  StrongClassifier classifier(std::move(terms), 1.0, 0.0);
  report.rounds = report.iterations.size();
  report.weak_learner_count = classifier.size();
  report.train_error = test_error(classifier, train);
  report.validation_error = test_error(classifier, val);
  report.test_error = test_error(classifier, split.test);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(classifier), std::move(report)};
}

}  // namespace qboost
