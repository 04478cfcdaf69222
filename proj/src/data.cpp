#include "qboost/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "qboost/rng.hpp"

namespace qboost {

Dataset::Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("dataset: no samples");
  dimension_ = samples_.front().features.size();
  if (dimension_ == 0) throw std::invalid_argument("dataset: zero-dimensional samples");
  for (std::size_t s = 0; s < samples_.size(); ++s) {
    const Sample& sample = samples_[s];
    if (sample.features.size() != dimension_) {
      throw std::invalid_argument("dataset: sample " + std::to_string(s) + " has " +
                                  std::to_string(sample.features.size()) + " features, expected " +
                                  std::to_string(dimension_));
    }
    if (sample.label != 1 && sample.label != -1) {
      throw std::invalid_argument("dataset: sample " + std::to_string(s) + " has label " +
                                  std::to_string(sample.label));
    }
    for (double v : sample.features) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("dataset: sample " + std::to_string(s) +
                                    " has a non-finite feature");
      }
    }
  }
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples_.size());
  for (const Sample& s : samples_) out.push_back(s.label);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Sample> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(samples_.at(i));
  return Dataset(std::move(picked));
}

SampleWeights::SampleWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("sample weights: negative or non-finite entry");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("sample weights: sum " + std::to_string(total) + " is not 1");
  }
}

SampleWeights SampleWeights::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample weights: empty");
  return SampleWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SampleWeights SampleWeights::normalized(std::vector<double> masses) {
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("sample weights: total mass must be positive");
  }
  for (double& m : masses) m /= total;
  return SampleWeights(std::move(masses));
}

double gaussian_mean_separation(double overlap) {
  constexpr double kMaxSeparation = 8.0;
  constexpr double kUnitOverlapSeparation = 3.29;
  return kMaxSeparation - overlap * (kMaxSeparation - kUnitOverlapSeparation);
}

Dataset generate_gaussian_mixture(std::size_t dimension, double overlap, std::size_t count,
                                  std::uint64_t seed) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw std::invalid_argument("gaussian mixture: overlap must lie in [0, 1]");
  }
  if (dimension < 1) throw std::invalid_argument("gaussian mixture: dimension must be >= 1");
  if (count < 2) throw std::invalid_argument("gaussian mixture: need at least 2 samples");

  const double half = gaussian_mean_separation(overlap) / 2.0;
  Rng rng(seed);
  std::vector<Sample> samples(count);
  for (Sample& sample : samples) {
    sample.label = rng.coin() ? 1 : -1;
    sample.features.resize(dimension);
    for (double& v : sample.features) v = rng.normal();
    sample.features[0] += sample.label * half;
  }
  return Dataset(std::move(samples));
}

Dataset generate_box_cluster_2d(std::size_t count, std::uint64_t seed) {
  if (count < 4) throw std::invalid_argument("box cluster: need at least 4 samples");
  Rng rng(seed);
  std::vector<Sample> samples(count);
  // Exactly half positive (rounded down), in shuffled positions.
  for (std::size_t s = 0; s < count; ++s) samples[s].label = s < count / 2 ? 1 : -1;
  for (std::size_t s = count - 1; s > 0; --s) std::swap(samples[s].label, samples[rng.index(s + 1)].label);
  for (Sample& sample : samples) {
    if (sample.label == 1) {
      sample.features = {rng.uniform(-kBoxInner, kBoxInner), rng.uniform(-kBoxInner, kBoxInner)};
      continue;
    }
    // Rejection sampling; the accepted region covers 1 - (2.4/6)^2 = 84% of the square.
    for (;;) {
      const double a = rng.uniform(-kBoxOuter, kBoxOuter);
      const double b = rng.uniform(-kBoxOuter, kBoxOuter);
      if (std::abs(a) > kBoxMargin || std::abs(b) > kBoxMargin) {
        sample.features = {a, b};
        break;
      }
    }
  }
  return Dataset(std::move(samples));
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("split: need at least 3 samples");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);

  std::array<std::vector<std::size_t>, 3> parts;
  std::size_t begin = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    const std::size_t len = n / 3 + (p < n % 3 ? 1 : 0);
    parts[p].assign(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                    perm.begin() + static_cast<std::ptrdiff_t>(begin + len));
    begin += len;
  }
  return parts;
}

SplitDataset split_even(const Dataset& dataset, std::uint64_t seed) {
  const auto parts = split_indices(dataset.size(), seed);
  return SplitDataset{dataset.subset(parts[0]), dataset.subset(parts[1]), dataset.subset(parts[2])};
}

Dataset l2_normalize(const Dataset& dataset) {
  std::vector<Sample> out(dataset.samples().begin(), dataset.samples().end());
  for (std::size_t s = 0; s < out.size(); ++s) {
    double norm2 = 0.0;
    for (double v : out[s].features) norm2 += v * v;
    if (norm2 == 0.0) {
      throw std::invalid_argument("l2_normalize: sample " + std::to_string(s) +
                                  " is the zero vector");
    }
    const double norm = std::sqrt(norm2);
    for (double& v : out[s].features) v /= norm;
  }
  return Dataset(std::move(out));
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

[[noreturn]] void row_error(std::size_t line, const std::string& what) {
  throw std::invalid_argument("csv line " + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, CsvOptions options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<Sample> samples;
  std::size_t columns = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && options.header) continue;
    if (trim(line).empty()) continue;

    std::vector<double> values;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      double v = 0.0;
      if (!parse_double(cell, v)) row_error(line_no, "non-numeric cell '" + std::string(trim(cell)) + "'");
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (values.size() < 2) row_error(line_no, "need at least one feature and a label");
    if (columns == 0) columns = values.size();
    if (values.size() != columns) {
      row_error(line_no, "expected " + std::to_string(columns) + " columns, found " +
                             std::to_string(values.size()));
    }
    const double label = values.back();
    if (label != 1.0 && label != -1.0) row_error(line_no, "label must be -1 or +1");
    for (std::size_t c = 0; c + 1 < values.size(); ++c) {
      if (!std::isfinite(values[c])) row_error(line_no, "non-finite feature");
    }
    values.pop_back();
    samples.push_back(Sample{std::move(values), label > 0 ? 1 : -1});
  }
  if (samples.empty()) throw std::invalid_argument("no samples");
  return Dataset(std::move(samples));
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path, CsvOptions options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (options.header) {
    for (std::size_t c = 0; c < dataset.dimension(); ++c) out << 'x' << c << ',';
    out << "label\n";
  }
  for (const Sample& sample : dataset.samples()) {
    for (double v : sample.features) out << format_double(v) << ',';
    out << sample.label << '\n';
  }
}

}  // namespace qboost
