#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qboost/boosting.hpp"

namespace qboost {

StrongClassifier::StrongClassifier(std::vector<WeightedStump> terms, double kappa, double theta)
    : terms_(std::move(terms)), kappa_(kappa), theta_(theta) {
  if (!(kappa_ > 0.0)) throw std::invalid_argument("strong classifier: kappa must be positive");
}

double StrongClassifier::score(std::span<const double> x) const {
  double total = 0.0;
  for (const WeightedStump& t : terms_) total += t.alpha * t.stump.evaluate(x);
  return total;
}

double test_error(const StrongClassifier& classifier, const Dataset& data) {
  for (const WeightedStump& t : classifier.terms()) {
    const std::size_t need = std::max(t.stump.key.i, t.stump.key.j) + 1;
    if (need > data.dimension()) {
      throw std::invalid_argument("test_error: classifier uses feature " + std::to_string(need - 1) +
                                  " but data has dimension " + std::to_string(data.dimension()));
    }
  }
  std::size_t wrong = 0;
  for (const Sample& s : data.samples())
    if (classifier.predict(s.features) != s.label) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double compute_theta(std::span<const WeightedStump> terms, const Dataset& train) {
  double total = 0.0;
  for (const Sample& s : train.samples())
    for (const WeightedStump& t : terms) total += t.alpha * t.stump.evaluate(s.features);
  return total / static_cast<double>(train.size());
}

SampleWeights update_sample_weights(const SampleWeights& d, std::span<const double> scores,
                                    std::span<const int> labels) {
  if (scores.size() != d.size() || labels.size() != d.size())
    throw std::invalid_argument("update_sample_weights: size mismatch");
  const double guard = 1e-12 / static_cast<double>(d.size());
  std::vector<double> masses(d.size());
  for (std::size_t s = 0; s < d.size(); ++s) {
    const double r = scores[s] - labels[s];
    masses[s] = d[s] * (r * r + guard);
  }
  double total = 0.0;
  for (double m : masses) total += m;
  if (!(total > 0.0)) return SampleWeights::uniform(d.size());  // d had no support left
  return SampleWeights::normalized(std::move(masses));
}

double vc_bound(double vc_dict, std::size_t T) {
  if (!(vc_dict > 0.0) || T < 1) throw std::invalid_argument("vc_bound: arguments must be positive");
  const double t1 = static_cast<double>(T) + 1.0;
  return 2.0 * (vc_dict + 1.0) * t1 * std::log2(std::numbers::e * t1);
}

double generalization_bound(double train_error, double vc_h, std::size_t S, double delta) {
  if (!(vc_h > 0.0) || S < 1 || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("generalization_bound: arguments out of range");
  const double s = static_cast<double>(S);
  return train_error + std::sqrt((vc_h * std::log(2.0 * s / vc_h + 1.0) + std::log(9.0 / delta)) / s);
}

}  // namespace qboost
