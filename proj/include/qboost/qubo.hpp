#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qboost/data.hpp"
#include "qboost/stumps.hpp"

namespace qboost {

using Assignment = std::vector<std::uint8_t>;

/// Quadratic pseudo-Boolean objective
///   offset + sum_i linear_i w_i + sum_{i<j} quadratic_ij w_i w_j.
///
/// Quadratic couplings are kept sparse per variable (both directions) so a
/// single-bit flip can be priced in O(degree). Diagonal contributions are
/// folded into the linear term (w^2 = w).
class QuboProblem {
 public:
  struct Coupling {
    std::uint32_t other;
    double value;
  };
  struct Term {
    std::size_t i;
    std::size_t j;
    double value;
  };

  explicit QuboProblem(std::size_t n);

  std::size_t size() const { return linear_.size(); }

  void add_offset(double value) { offset_ += value; }
  void add_linear(std::size_t i, double value);
  /// Order-insensitive; i == j adds to the linear coefficient.
  void add_quadratic(std::size_t i, std::size_t j, double value);

  double offset() const { return offset_; }
  double linear(std::size_t i) const { return linear_.at(i); }
  std::span<const double> linear() const { return linear_; }
  double quadratic(std::size_t i, std::size_t j) const;
  std::span<const Coupling> couplings(std::size_t i) const { return couplings_.at(i); }
  /// Upper-triangular terms (i < j) in row-major order.
  std::vector<Term> quadratic_terms() const;

  double energy(std::span<const std::uint8_t> assignment) const;

  /// energy(flip(x, bit)) - energy(x) in O(degree of bit).
  double flip_delta(std::span<const std::uint8_t> assignment, std::size_t bit) const;

 private:
  double offset_ = 0.0;
  std::vector<double> linear_;
  std::vector<std::vector<Coupling>> couplings_;  // sorted by `other`
};

/// Multilinear polynomial over binary variables with terms of degree <= 4.
class PseudoBooleanProblem {
 public:
  static constexpr std::size_t kMaxDegree = 4;
  using Indices = std::vector<std::uint32_t>;

  explicit PseudoBooleanProblem(std::size_t n) : n_(n) {}

  std::size_t size() const { return n_; }
  std::size_t degree() const;

  void add_offset(double value) { offset_ += value; }
  /// Indices may repeat and come in any order (x^2 = x); an empty index list
  /// adds to the offset.
  void add_term(Indices indices, double value);

  double offset() const { return offset_; }
  const std::map<Indices, double>& terms() const { return terms_; }

  double energy(std::span<const std::uint8_t> assignment) const;

 private:
  std::size_t n_;
  double offset_ = 0.0;
  std::map<Indices, double> terms_;
};

/// Named contiguous blocks of variables.
class VariableLayout {
 public:
  struct Block {
    std::string name;
    std::size_t start;
    std::size_t count;
  };

  /// Appends a block directly after the previous one; returns its start.
  std::size_t add(std::string name, std::size_t count);
  const Block& block(const std::string& name) const;
  std::size_t index(const std::string& name, std::size_t offset) const;
  std::span<const Block> blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.empty() ? 0 : blocks_.back().start + blocks_.back().count; }

 private:
  std::vector<Block> blocks_;
};

/// S x N matrix of weak-classifier outputs h_i(x_s), each +-1.
class PredictionMatrix {
 public:
  PredictionMatrix(std::size_t samples, std::size_t classifiers, std::vector<std::int8_t> values);

  std::size_t samples() const { return samples_; }
  std::size_t classifiers() const { return classifiers_; }
  int operator()(std::size_t s, std::size_t i) const { return values_[s * classifiers_ + i]; }
  std::span<const std::int8_t> row(std::size_t s) const {
    return std::span(values_).subspan(s * classifiers_, classifiers_);
  }

 private:
  std::size_t samples_;
  std::size_t classifiers_;
  std::vector<std::int8_t> values_;
};

PredictionMatrix predict_matrix(std::span<const Stump> stumps, const Dataset& data);

/// ceil(log2 n) for n >= 1.
std::size_t ceil_log2(std::size_t n);

/// sum_s (kappa (F_s + sum_i w_i H_si) - y_s)^2 + lambda sum_i w_i, assembled
/// from Corr(h_i, h_j) and Corr(h_i, y); F defaults to zero.
QuboProblem build_training_qubo(const PredictionMatrix& h, std::span<const int> labels,
                                double kappa, double lambda,
                                std::optional<std::span<const double>> frozen_scores = {});

/// Training objective with a binary-expanded global threshold:
///   sum_s (kappa (sum_i w_i H_si - sum_{k=0}^{K} t_k 2^k + 2^K - 1) - y_s)^2
///   + lambda sum_i w_i,   K = ceil(log2 N).
/// Layout blocks: "w" (N), "theta" (K + 1).
std::pair<QuboProblem, VariableLayout> build_threshold_qubo(const PredictionMatrix& h,
                                                            std::span<const int> labels,
                                                            double kappa, double lambda);

/// 0-1 loss surrogate with error bits, in its expanded quadratic form:
///   sum_s (f_s - y_s ybar_s)^2 + N^2 (f_s - y_s ybar_s + y_s N e_s)^2 + lambda |w|_0,
///   f_s = sum_i w_i H_si,  ybar_s = 1 + sum_{k<K} b_{k,s} 2^k.
/// Layout blocks: "w" (N), "ybar" (S*K, sample-major), "e" (S).
std::pair<QuboProblem, VariableLayout> build_zero_one_qubo_v1(const PredictionMatrix& h,
                                                              std::span<const int> labels,
                                                              double lambda);

/// Indicator-bit 0-1 loss variant, kept in its native (non-quadratic) form:
///   sum_s (f_s - (e+_s - e-_s) y_s ybar_s)^2 + e-_s + lambda |w|_0.
/// Layout blocks: "w" (N), "ybar" (S*K), "e_plus" (S), "e_minus" (S).
std::pair<PseudoBooleanProblem, VariableLayout> build_zero_one_objective_v2(
    const PredictionMatrix& h, std::span<const int> labels, double lambda);

using Problem = std::variant<QuboProblem, PseudoBooleanProblem>;

/// Length-checked evaluation.
double energy(const QuboProblem& problem, std::span<const std::uint8_t> assignment);
double energy(const PseudoBooleanProblem& problem, std::span<const std::uint8_t> assignment);

/// Text format, one record per line:
///   n <count>
///   offset <v>
///   lin <i> <v>
///   quad <i> <j> <v>
///   cube <i> <j> <k> <v>
///   quart <i> <j> <k> <l> <v>
/// Values are written with 17 significant digits. A file containing cube or
/// quart records loads as a PseudoBooleanProblem.
void write_problem(std::ostream& out, const QuboProblem& problem);
void write_problem(std::ostream& out, const PseudoBooleanProblem& problem);
Problem read_problem(std::istream& in);
void save_problem(const std::filesystem::path& path, const Problem& problem);
Problem load_problem(const std::filesystem::path& path);

}  // namespace qboost
