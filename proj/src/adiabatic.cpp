#include "qboost/adiabatic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qboost/lanczos.hpp"
#include "qboost/rng.hpp"
#include "qboost/stumps.hpp"

namespace qboost {

namespace {

void check_qubits(std::size_t n) {
  if (n == 0) throw std::invalid_argument("adiabatic: problem has no variables");
  if (n > kMaxQubits) {
    throw std::invalid_argument("adiabatic: " + std::to_string(n) + " qubits exceeds the limit of " +
                                std::to_string(kMaxQubits));
  }
}

// (1-s) H_B + s H_P as a matrix-free operator.
class Interpolated {
 public:
  Interpolated(const std::vector<double>& diagonal, std::size_t n, double s)
      : diagonal_(diagonal), n_(n), s_(s) {}

  void apply(std::span<const double> x, std::span<double> y) const {
    const double b = 1.0 - s_;
    const double shift = b * 0.5 * static_cast<double>(n_);
    for (std::size_t z = 0; z < x.size(); ++z) {
      double flips = 0.0;
      for (std::size_t q = 0; q < n_; ++q) flips += x[z ^ (std::size_t{1} << q)];
      y[z] = (shift + s_ * diagonal_[z]) * x[z] - 0.5 * b * flips;
    }
  }

  // H_P - H_B, the s-derivative.
  void apply_derivative(std::span<const double> x, std::span<double> y) const {
    const double shift = 0.5 * static_cast<double>(n_);
    for (std::size_t z = 0; z < x.size(); ++z) {
      double flips = 0.0;
      for (std::size_t q = 0; q < n_; ++q) flips += x[z ^ (std::size_t{1} << q)];
      y[z] = (diagonal_[z] - shift) * x[z] + 0.5 * flips;
    }
  }

  Eigen::MatrixXd dense() const {
    const auto dim = static_cast<Eigen::Index>(diagonal_.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double b = 1.0 - s_;
    for (Eigen::Index z = 0; z < dim; ++z) {
      h(z, z) = b * 0.5 * static_cast<double>(n_) + s_ * diagonal_[static_cast<std::size_t>(z)];
      for (std::size_t q = 0; q < n_; ++q) h(z, z ^ static_cast<Eigen::Index>(std::size_t{1} << q)) = -0.5 * b;
    }
    return h;
  }

 private:
  const std::vector<double>& diagonal_;
  std::size_t n_;
  double s_;
};

struct LowPair {
  double e0 = 0.0;
  double e1 = 0.0;
  std::vector<double> psi0;
  std::vector<double> psi1;
};

std::vector<double> generic_vector(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(dim);
  for (double& x : v) x = rng.uniform(0.5, 1.5);
  return v;
}

std::vector<double> warm_start(const std::vector<double>& previous, const std::vector<double>& generic) {
  if (previous.empty()) return generic;
  std::vector<double> v(previous);
  double norm = 0.0;
  for (double x : generic) norm += x * x;
  const double scale = 0.1 / std::sqrt(norm);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += scale * generic[i];
  return v;
}

class Solver {
 public:
  Solver(const QuboProblem& problem, EigenMethod method)
      : n_(problem.size()), method_(method) {
    check_qubits(n_);
    if (method_ == EigenMethod::dense && n_ > kMaxDenseQubits) {
      throw std::invalid_argument("adiabatic: dense diagonalisation is limited to " +
                                  std::to_string(kMaxDenseQubits) + " qubits");
    }
    diagonal_ = problem_hamiltonian_diagonal(problem);
    generic0_ = generic_vector(diagonal_.size(), 0x5eed0);
    generic1_ = generic_vector(diagonal_.size(), 0x5eed1);
  }

  const std::vector<double>& diagonal() const { return diagonal_; }
  std::size_t qubits() const { return n_; }

  LowPair solve(double s, bool first_excited, bool vectors) {
    return method_ == EigenMethod::dense ? solve_dense(s, first_excited, vectors)
                                         : solve_lanczos(s, first_excited);
  }

  double derivative_element(double s, const std::vector<double>& a, const std::vector<double>& b) const {
    Interpolated h(diagonal_, n_, s);
    std::vector<double> tmp(b.size());
    h.apply_derivative(b, tmp);
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * tmp[i];
    return total;
  }

 private:
  LowPair solve_dense(double s, bool first_excited, bool vectors) const {
    Interpolated h(diagonal_, n_, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.dense(),
                                                       vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("adiabatic: dense eigensolver failed at s = " + std::to_string(s));
    LowPair out;
    out.e0 = eig.eigenvalues()(0);
    if (first_excited) out.e1 = eig.eigenvalues()(1);
    if (vectors) {
      const auto& v = eig.eigenvectors();
      out.psi0.assign(v.col(0).data(), v.col(0).data() + v.rows());
      out.psi1.assign(v.col(1).data(), v.col(1).data() + v.rows());
    }
    return out;
  }

  LowPair solve_lanczos(double s, bool first_excited) {
    Interpolated h(diagonal_, n_, s);
    const LinearOperator op = [&h](std::span<const double> x, std::span<double> y) { h.apply(x, y); };
    const std::size_t dim = diagonal_.size();
    LowPair out;

    LanczosResult r0 = lowest_eigenpair(op, dim, warm_start(prev0_, generic0_));
    if (!r0.converged)
      throw std::runtime_error("adiabatic: eigensolver did not converge for E0 at s = " + std::to_string(s));
    out.e0 = r0.value;
    out.psi0 = std::move(r0.vector);
    prev0_ = out.psi0;

    if (first_excited) {
      const std::vector<std::vector<double>> deflate{out.psi0};
      LanczosResult r1 = lowest_eigenpair(op, dim, warm_start(prev1_, generic1_), deflate);
      if (!r1.converged)
        throw std::runtime_error("adiabatic: eigensolver did not converge for E1 at s = " + std::to_string(s));
      out.e1 = r1.value;
      out.psi1 = std::move(r1.vector);
      prev1_ = out.psi1;
    }
    return out;
  }

  std::size_t n_;
  EigenMethod method_;
  std::vector<double> diagonal_;
  std::vector<double> generic0_;
  std::vector<double> generic1_;
  std::vector<double> prev0_;
  std::vector<double> prev1_;
};

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("s grid needs at least two points");
  if (grid.front() != 0.0 || grid.back() != 1.0) throw std::invalid_argument("s grid must start at 0 and end at 1");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("s grid must be strictly increasing");
}

}  // namespace

std::size_t basis_index(const Assignment& a) {
  std::size_t z = 0;
  for (std::uint8_t bit : a) z = (z << 1) | (bit ? 1u : 0u);
  return z;
}

std::vector<double> problem_hamiltonian_diagonal(const QuboProblem& problem) {
  const std::size_t n = problem.size();
  check_qubits(n);
  std::vector<double> diag(std::size_t{1} << n);
  Assignment a(n, 0);
  for (std::size_t z = 0; z < diag.size(); ++z) {
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<std::uint8_t>((z >> (n - 1 - i)) & 1u);
    diag[z] = problem.energy(a);
  }
  return diag;
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

SpectralCurve spectral_sweep(const QuboProblem& problem, std::span<const double> s_grid,
                             const SweepOptions& options) {
  check_grid(s_grid);
  Solver solver(problem, options.method);
  SpectralCurve curve;
  curve.n_qubits = solver.qubits();
  curve.s_grid.assign(s_grid.begin(), s_grid.end());
  for (double s : s_grid) {
    const LowPair p = solver.solve(s, options.first_excited, false);
    curve.E0.push_back(p.e0);
    if (options.first_excited) curve.E1.push_back(p.e1);
  }
  return curve;
}

GapMinimum min_gap(const SpectralCurve& curve) {
  if (curve.E1.size() != curve.s_grid.size() || curve.E0.size() != curve.s_grid.size() || curve.s_grid.empty())
    throw std::invalid_argument("min_gap: curve needs E0 and E1 at every grid point");
  GapMinimum best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < curve.s_grid.size(); ++i) {
    // Rounding can leave E1 a hair below E0 at a degeneracy.
    const double gap = std::max(0.0, curve.E1[i] - curve.E0[i]);
    if (gap < best.g_min - kDegeneracyTolerance) best = {gap, curve.s_grid[i]};
  }
  return best;
}

Curvature curvature_metric(const SpectralCurve& curve) {
  const auto& s = curve.s_grid;
  if (s.size() < 51) throw std::invalid_argument("curvature: the grid needs at least 51 points");
  if (curve.E0.size() != s.size()) throw std::invalid_argument("curvature: E0 length differs from the grid");
  const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i)
    if (std::abs((s[i] - s[i - 1]) - h) > 1e-9 * h) throw std::invalid_argument("curvature: the grid is not uniform");

  Curvature out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double second = (curve.E0[i + 1] - 2.0 * curve.E0[i] + curve.E0[i - 1]) / (h * h);
    const double w = s[i] * s[i] * (1.0 - s[i]) * (1.0 - s[i]);
    const double value = std::abs(second * w);
    out.s.push_back(s[i]);
    out.values.push_back(value);
    if (out.values.size() == 1 || value > out.peak) {
      out.peak = value;
      out.s_at_peak = s[i];
    }
  }
  return out;
}

std::optional<double> v01_matrix_element(const QuboProblem& problem, double s, EigenMethod method) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("v01: s must lie in [0, 1]");
  Solver solver(problem, method);
  const LowPair p = solver.solve(s, true, true);
  if (p.e1 - p.e0 <= kDegeneracyTolerance) return std::nullopt;
  return std::abs(solver.derivative_element(s, p.psi0, p.psi1));
}

GapAnalysis analyze_gap(const QuboProblem& problem, std::span<const double> s_grid, const SweepOptions& options) {
  GapAnalysis out;
  SweepOptions opts = options;
  opts.first_excited = true;
  out.curve = spectral_sweep(problem, s_grid, opts);
  const GapMinimum g = min_gap(out.curve);
  out.curvature = curvature_metric(out.curve);
  out.report.g_min = g.g_min;
  out.report.s_at_gmin = g.s;
  out.report.curvature_peak = out.curvature.peak;
  out.report.s_at_peak = out.curvature.s_at_peak;
  out.report.v01_at_peak = v01_matrix_element(problem, out.curvature.s_at_peak, opts.method);
  return out;
}

QuboProblem synthetic_training_qubo(std::size_t n, std::uint64_t seed, const SyntheticQuboOptions& options) {
  check_qubits(n);
  const Dataset data = generate_gaussian_mixture(options.dimension, options.overlap, options.samples, seed);
  const SampleWeights uniform = SampleWeights::uniform(data.size());
  const Dictionary dict = build_dictionary(data, uniform, OrderSet{true, false});
  const std::vector<Stump> picked = select_top_k(dict, data, uniform, n);
  const double nd = static_cast<double>(n);
  const double lambda = 0.5 * (2.0 / nd + 1.0 / (nd * nd));
  return build_training_qubo(predict_matrix(picked, data), data.labels(), 1.0 / nd, lambda);
}

std::vector<ScalingRow> scaling_sweep(std::span<const std::size_t> qubits, const InstanceGenerator& generator,
                                      std::size_t runs, std::size_t grid_points) {
  if (runs == 0) throw std::invalid_argument("scaling: runs must be >= 1");
  for (std::size_t n : qubits) check_qubits(n);
  const std::vector<double> grid = uniform_grid(grid_points);
  const SweepOptions options{EigenMethod::lanczos, false};
  std::vector<ScalingRow> rows;
  for (std::size_t n : qubits) {
    ScalingRow row;
    row.n = n;
    for (std::size_t r = 0; r < runs; ++r) {
      const QuboProblem problem = generator(n, r);
      if (problem.size() != n) throw std::invalid_argument("scaling: generator returned the wrong size");
      row.peaks.push_back(curvature_metric(spectral_sweep(problem, grid, options)).peak);
    }
    double sum = 0.0;
    for (double p : row.peaks) sum += p;
    row.mean = sum / static_cast<double>(runs);
    if (runs > 1) {
      double sq = 0.0;
      for (double p : row.peaks) sq += (p - row.mean) * (p - row.mean);
      row.std = std::sqrt(sq / static_cast<double>(runs - 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qboost
