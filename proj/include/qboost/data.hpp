#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qboost {

struct Sample {
  std::vector<double> features;
  int label = 1;  // -1 or +1

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Non-empty, fixed-dimension collection of labeled samples. Immutable once
/// constructed; the constructor enforces every invariant.
class Dataset {
 public:
  explicit Dataset(std::vector<Sample> samples);

  std::size_t size() const { return samples_.size(); }
  std::size_t dimension() const { return dimension_; }
  const Sample& operator[](std::size_t s) const { return samples_[s]; }
  std::span<const Sample> samples() const { return samples_; }
  std::vector<int> labels() const;

  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Sample> samples_;
  std::size_t dimension_ = 0;
};

struct SplitDataset {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Probability distribution over training samples.
class SampleWeights {
 public:
  /// Takes an already normalized vector; rejects negative entries and sums
  /// further than 1e-9 from 1.
  explicit SampleWeights(std::vector<double> weights);

  static SampleWeights uniform(std::size_t n);
  /// Scales non-negative masses to sum 1. Rejects an all-zero vector.
  static SampleWeights normalized(std::vector<double> masses);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t s) const { return weights_[s]; }
  std::span<const double> values() const { return weights_; }

 private:
  std::vector<double> weights_;
};

/// Offset of the class means along the first axis as a function of the
/// overlap coefficient c in [0, 1]: 8.0 - c * (8.0 - 3.29). At c = 1 the
/// Bayes error Phi(-delta/2) is 0.05; at c = 0 it is about 3e-5.
double gaussian_mean_separation(double overlap);

/// Two unit-covariance spherical Gaussians in M dimensions centered at
/// +-(delta/2) e_0, labels drawn with probability 1/2 each.
Dataset generate_gaussian_mixture(std::size_t dimension, double overlap, std::size_t count,
                                  std::uint64_t seed);

/// Positives uniform in [-1,1]^2; negatives uniform in [-3,3]^2 minus
/// [-1.2,1.2]^2. Exactly floor(count/2) positives, at shuffled positions.
Dataset generate_box_cluster_2d(std::size_t count, std::uint64_t seed);

inline constexpr double kBoxInner = 1.0;
inline constexpr double kBoxMargin = 1.2;
inline constexpr double kBoxOuter = 3.0;

/// Random permutation of [0, n) cut into three consecutive parts whose sizes
/// differ by at most one (larger parts first).
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, std::uint64_t seed);

SplitDataset split_even(const Dataset& dataset, std::uint64_t seed);

Dataset l2_normalize(const Dataset& dataset);

struct CsvOptions {
  bool header = false;
};

Dataset load_csv(const std::filesystem::path& path, CsvOptions options = {});
void save_csv(const Dataset& dataset, const std::filesystem::path& path, CsvOptions options = {});

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace qboost
