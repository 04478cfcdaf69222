#include "qboost/stumps.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qboost {

double Stump::projection(std::span<const double> x) const {
  const double raw = key.order == 1 ? x[key.i] : x[key.i] * x[key.j];
  return key.polarity == Polarity::positive ? raw : -raw;
}

std::size_t dictionary_size(std::size_t dimension, OrderSet orders) {
  std::size_t total = 0;
  if (orders.first) total += 2 * dimension;
  if (orders.second) total += dimension * (dimension - 1);  // 2 * C(M, 2)
  return total;
}

std::vector<StumpKey> dictionary_keys(std::size_t dimension, OrderSet orders) {
  std::vector<StumpKey> keys;
  keys.reserve(dictionary_size(dimension, orders));
  for (Polarity pol : {Polarity::positive, Polarity::negative}) {
    if (!orders.first) break;
    for (std::size_t l = 0; l < dimension; ++l) keys.push_back({1, l, l, pol});
  }
  for (Polarity pol : {Polarity::positive, Polarity::negative}) {
    if (!orders.second) break;
    for (std::size_t i = 0; i < dimension; ++i)
      for (std::size_t j = i + 1; j < dimension; ++j) keys.push_back({2, i, j, pol});
  }
  return keys;
}

Dictionary::Dictionary(std::vector<Stump> stumps, std::size_t dimension)
    : stumps_(std::move(stumps)), dimension_(dimension) {
  for (const Stump& s : stumps_) {
    if (s.key.order == 2 && !(s.key.i < s.key.j)) {
      throw std::invalid_argument("dictionary: order-2 stump needs i < j");
    }
    if (s.key.order != 1 && s.key.order != 2) throw std::invalid_argument("dictionary: bad order");
    if (s.key.i >= dimension_ || s.key.j >= dimension_) {
      throw std::invalid_argument("dictionary: feature index out of range");
    }
  }
}

std::vector<StumpKey> Dictionary::keys() const {
  std::vector<StumpKey> out;
  out.reserve(stumps_.size());
  for (const Stump& s : stumps_) out.push_back(s.key);
  return out;
}

int evaluate(const Stump& stump, std::span<const double> x, std::size_t dimension) {
  if (x.size() != dimension) {
    throw std::invalid_argument("evaluate: feature vector has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dimension));
  }
  if (stump.key.i >= dimension || stump.key.j >= dimension)
    throw std::invalid_argument("evaluate: stump feature index out of range");
  return stump.evaluate(x);
}

double weighted_error(const Stump& stump, const Dataset& data, const SampleWeights& weights) {
  if (weights.size() != data.size()) throw std::invalid_argument("weighted_error: size mismatch");
  double err = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    if (stump.evaluate(data[s].features) != data[s].label) err += weights[s];
  }
  return err;
}

namespace {

// A threshold t with a < t <= b, so that p >= t separates {p <= a} from {p >= b}.
double threshold_between(double a, double b) {
  const double mid = a + (b - a) / 2.0;
  return mid > a && mid <= b ? mid : b;
}

constexpr double kOutsideMargin = 1.0;

struct ScanResult {
  double threshold;
  double error;
};

// Scans candidate thresholds over projections visited in ascending order.
// `value(r)` and `sample(r)` give the r-th smallest projection and its sample.
template <class ValueAt, class SampleAt>
ScanResult scan_thresholds(std::size_t count, ValueAt value, SampleAt sample,
                           std::span<const int> labels, const SampleWeights& weights) {
  double err = 0.0;  // every sample predicted +1
  for (std::size_t s = 0; s < count; ++s)
    if (labels[s] < 0) err += weights[s];

  ScanResult best{value(0) - kOutsideMargin, err};
  std::size_t r = 0;
  while (r < count) {
    const double v = value(r);
    while (r < count && value(r) == v) {
      const std::size_t s = sample(r);
      err += labels[s] > 0 ? weights[s] : -weights[s];
      ++r;
    }
    const double t = r < count ? threshold_between(v, value(r)) : v + kOutsideMargin;
    if (err < best.error) best = {t, err};
  }
  best.error = std::clamp(best.error, 0.0, 1.0);
  return best;
}

double raw_projection(const StumpKey& key, std::span<const double> x) {
  return key.order == 1 ? x[key.i] : x[key.i] * x[key.j];
}

}  // namespace

std::vector<double> candidate_thresholds(std::vector<double> projections) {
  if (projections.empty()) return {};
  std::sort(projections.begin(), projections.end());
  projections.erase(std::unique(projections.begin(), projections.end()), projections.end());
  std::vector<double> out;
  out.reserve(projections.size() + 1);
  out.push_back(projections.front() - kOutsideMargin);
  for (std::size_t r = 0; r + 1 < projections.size(); ++r)
    out.push_back(threshold_between(projections[r], projections[r + 1]));
  out.push_back(projections.back() + kOutsideMargin);
  return out;
}

StumpFitter::StumpFitter(const Dataset& train, std::vector<StumpKey> keys)
    : dimension_(train.dimension()), labels_(train.labels()), keys_(std::move(keys)) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (i, j) per slot
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot_of_pair;
  for (const StumpKey& key : keys_) {
    if (key.i >= dimension_ || key.j >= dimension_)
      throw std::invalid_argument("stump fitter: feature index out of range");
    // Order-1 and order-2 keys never share a slot because order 2 has i < j.
    const std::pair<std::size_t, std::size_t> ij{key.i, key.order == 1 ? key.i : key.j};
    auto [it, inserted] = slot_of_pair.try_emplace(ij, pairs.size());
    if (inserted) pairs.push_back(ij);
    slot_of_key_.push_back(it->second);
  }

  const std::size_t n = train.size();
  projections_.resize(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const StumpKey probe{pairs[p].first == pairs[p].second ? 1 : 2, pairs[p].first,
                         pairs[p].second, Polarity::positive};
    std::vector<double> raw(n);
    for (std::size_t s = 0; s < n; ++s) raw[s] = raw_projection(probe, train[s].features);
    Projection& proj = projections_[p];
    proj.order.resize(n);
    std::iota(proj.order.begin(), proj.order.end(), 0u);
    std::stable_sort(proj.order.begin(), proj.order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return raw[a] < raw[b]; });
    proj.sorted_values.resize(n);
    for (std::size_t r = 0; r < n; ++r) proj.sorted_values[r] = raw[proj.order[r]];
  }
}

StumpFitter::StumpFitter(const Dataset& train, OrderSet orders)
    : StumpFitter(train, dictionary_keys(train.dimension(), orders)) {}

StumpFitter::Fit StumpFitter::fit_one(std::size_t k, const SampleWeights& weights) const {
  if (weights.size() != labels_.size()) throw std::invalid_argument("stump fitter: weight size mismatch");
  const StumpKey& key = keys_[k];
  const Projection& proj = projections_[slot_of_key_[k]];
  const std::size_t n = proj.order.size();
  ScanResult r;
  if (key.polarity == Polarity::positive) {
    r = scan_thresholds(
        n, [&](std::size_t i) { return proj.sorted_values[i]; },
        [&](std::size_t i) { return static_cast<std::size_t>(proj.order[i]); }, labels_, weights);
  } else {
    r = scan_thresholds(
        n, [&](std::size_t i) { return -proj.sorted_values[n - 1 - i]; },
        [&](std::size_t i) { return static_cast<std::size_t>(proj.order[n - 1 - i]); }, labels_,
        weights);
  }
  return Fit{Stump{key, r.threshold}, r.error};
}

Dictionary StumpFitter::fit(const SampleWeights& weights) const {
  std::vector<Stump> stumps;
  stumps.reserve(keys_.size());
  for (std::size_t k = 0; k < keys_.size(); ++k) stumps.push_back(fit_one(k, weights).stump);
  return Dictionary(std::move(stumps), dimension_);
}

Dictionary build_dictionary(const Dataset& train, const SampleWeights& weights, OrderSet orders) {
  if (weights.size() != train.size()) throw std::invalid_argument("build_dictionary: size mismatch");
  // Streams one projection at a time instead of caching all of them.
  const std::vector<int> labels = train.labels();
  const std::size_t n = train.size();
  std::vector<Stump> stumps;
  const std::vector<StumpKey> keys = dictionary_keys(train.dimension(), orders);
  stumps.reserve(keys.size());
  std::vector<double> raw(n);
  std::vector<std::size_t> order(n);
  for (const StumpKey& key : keys) {
    for (std::size_t s = 0; s < n; ++s) raw[s] = raw_projection(key, train[s].features);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
    ScanResult r;
    if (key.polarity == Polarity::positive) {
      r = scan_thresholds(
          n, [&](std::size_t i) { return raw[order[i]]; }, [&](std::size_t i) { return order[i]; },
          labels, weights);
    } else {
      r = scan_thresholds(
          n, [&](std::size_t i) { return -raw[order[n - 1 - i]]; },
          [&](std::size_t i) { return order[n - 1 - i]; }, labels, weights);
    }
    stumps.push_back(Stump{key, r.threshold});
  }
  return Dictionary(std::move(stumps), train.dimension());
}

std::vector<Stump> select_top_k(const Dictionary& dictionary, const Dataset& data,
                                const SampleWeights& weights, std::size_t k,
                                const std::set<StumpKey>& exclude) {
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(dictionary.size());
  for (std::size_t d = 0; d < dictionary.size(); ++d) {
    if (exclude.contains(dictionary[d].key)) continue;
    ranked.emplace_back(weighted_error(dictionary[d], data, weights), d);
  }
  if (k > ranked.size()) {
    throw std::invalid_argument("select_top_k: k = " + std::to_string(k) + " exceeds the " +
                                std::to_string(ranked.size()) + " available stumps");
  }
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  std::vector<Stump> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) out.push_back(dictionary[ranked[r].second]);
  return out;
}

}  // namespace qboost
