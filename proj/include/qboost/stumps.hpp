#pragma once

#include <compare>
#include <cstdint>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "qboost/data.hpp"

namespace qboost {

enum class Polarity { positive, negative };

/// Identity of a stump up to its threshold: order, feature index/indices and
/// polarity. For order 1 only `i` is used and `j == i`.
struct StumpKey {
  int order = 1;
  std::size_t i = 0;
  std::size_t j = 0;
  Polarity polarity = Polarity::positive;

  auto operator<=>(const StumpKey&) const = default;
};

/// Thresholded decision stump:
///   order 1: sign(+-x_i - threshold)
///   order 2: sign(+-x_i * x_j - threshold)
/// with sign(0) = +1.
struct Stump {
  StumpKey key;
  double threshold = 0.0;

  /// The signed projection that is compared against the threshold.
  double projection(std::span<const double> x) const;
  int evaluate(std::span<const double> x) const { return projection(x) >= threshold ? 1 : -1; }

  friend bool operator==(const Stump&, const Stump&) = default;
};

struct OrderSet {
  bool first = true;
  bool second = true;
};

std::size_t dictionary_size(std::size_t dimension, OrderSet orders);

/// All stump keys in dictionary order: order-1 positive, order-1 negative,
/// order-2 positive, order-2 negative; ascending feature index within a block
/// (pairs in lexicographic (i, j) order, i < j).
std::vector<StumpKey> dictionary_keys(std::size_t dimension, OrderSet orders);

class Dictionary {
 public:
  Dictionary(std::vector<Stump> stumps, std::size_t dimension);

  std::size_t size() const { return stumps_.size(); }
  bool empty() const { return stumps_.empty(); }
  std::size_t dimension() const { return dimension_; }
  const Stump& operator[](std::size_t k) const { return stumps_[k]; }
  std::span<const Stump> stumps() const { return stumps_; }
  std::vector<StumpKey> keys() const;

 private:
  std::vector<Stump> stumps_;
  std::size_t dimension_;
};

/// Evaluates with a dimension check.
int evaluate(const Stump& stump, std::span<const double> x, std::size_t dimension);

double weighted_error(const Stump& stump, const Dataset& data, const SampleWeights& weights);

/// Fits stump thresholds on one training set. Sorted projections are cached
/// per (order, i, j) so that refitting under new weights costs O(S) per key.
class StumpFitter {
 public:
  StumpFitter(const Dataset& train, std::vector<StumpKey> keys);
  StumpFitter(const Dataset& train, OrderSet orders);

  std::size_t sample_count() const { return labels_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::span<const StumpKey> keys() const { return keys_; }

  struct Fit {
    Stump stump;
    double error;
  };
  Fit fit_one(std::size_t k, const SampleWeights& weights) const;
  Dictionary fit(const SampleWeights& weights) const;

 private:
  struct Projection {
    std::vector<double> sorted_values;    // ascending
    std::vector<std::uint32_t> order;     // sample index per sorted position
  };
  std::size_t projection_slot(const StumpKey& key) const;

  std::size_t dimension_;
  std::vector<int> labels_;
  std::vector<StumpKey> keys_;
  std::vector<std::size_t> slot_of_key_;
  std::vector<Projection> projections_;
};

/// One stump per key with the threshold minimising weighted training error
/// over the candidate grid: midpoints between consecutive distinct projection
/// values, plus one value below the minimum and one above the maximum. Ties
/// go to the smallest threshold.
Dictionary build_dictionary(const Dataset& train, const SampleWeights& weights, OrderSet orders);

/// Candidate thresholds for a set of projection values, ascending.
std::vector<double> candidate_thresholds(std::vector<double> projections);

/// The k non-excluded stumps with smallest weighted error; ties broken by
/// dictionary position.
std::vector<Stump> select_top_k(const Dictionary& dictionary, const Dataset& data,
                                const SampleWeights& weights, std::size_t k,
                                const std::set<StumpKey>& exclude = {});

}  // namespace qboost
