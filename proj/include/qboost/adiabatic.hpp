#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qboost/qubo.hpp"

namespace qboost {

/// Exact diagonalisation is refused above this many qubits.
inline constexpr std::size_t kMaxQubits = 14;
/// The dense path materialises the 2^n x 2^n matrix and is kept for small n.
inline constexpr std::size_t kMaxDenseQubits = 8;
inline constexpr double kDegeneracyTolerance = 1e-9;
inline constexpr std::size_t kDefaultGridPoints = 201;

/// Computational-basis index of an assignment. Variable 0 is the most
/// significant qubit: z = sum_i a_i 2^(n-1-i).
std::size_t basis_index(const Assignment& a);

/// Entry z is the problem energy of the assignment encoded by z.
std::vector<double> problem_hamiltonian_diagonal(const QuboProblem& problem);

struct SpectralCurve {
  std::vector<double> s_grid;
  std::vector<double> E0;
  std::vector<double> E1;  // empty when not requested
  std::size_t n_qubits = 0;
};

enum class EigenMethod { lanczos, dense };

struct SweepOptions {
  EigenMethod method = EigenMethod::lanczos;
  bool first_excited = true;
};

/// `points` uniformly spaced values from 0 to 1 inclusive.
std::vector<double> uniform_grid(std::size_t points = kDefaultGridPoints);

/// Two lowest eigenvalues of (1-s) H_B + s H_P at every grid point, with
/// H_B = sum_i (1 - sigma^x_i)/2 and H_P diagonal. Degenerate ground states
/// give E1 = E0.
SpectralCurve spectral_sweep(const QuboProblem& problem, std::span<const double> s_grid,
                             const SweepOptions& options = {});

struct GapMinimum {
  double g_min = 0.0;
  double s = 0.0;
};
/// Smallest E1 - E0; the smallest s wins ties within the degeneracy tolerance.
GapMinimum min_gap(const SpectralCurve& curve);

struct Curvature {
  std::vector<double> s;       // interior grid points
  std::vector<double> values;  // |E0''(s)| s^2 (1-s)^2
  double peak = 0.0;
  double s_at_peak = 0.0;
};
/// Central second differences on a uniform grid of at least 51 points.
Curvature curvature_metric(const SpectralCurve& curve);

/// |<psi0|H_P - H_B|psi1>| at s; nullopt when E1 - E0 is within the
/// degeneracy tolerance.
std::optional<double> v01_matrix_element(const QuboProblem& problem, double s,
                                         EigenMethod method = EigenMethod::lanczos);

struct GapReport {
  double g_min = 0.0;
  double s_at_gmin = 0.0;
  double curvature_peak = 0.0;
  double s_at_peak = 0.0;
  std::optional<double> v01_at_peak;
};

struct GapAnalysis {
  SpectralCurve curve;
  Curvature curvature;
  GapReport report;
};
GapAnalysis analyze_gap(const QuboProblem& problem, std::span<const double> s_grid,
                        const SweepOptions& options = {});

struct SyntheticQuboOptions {
  std::size_t samples = 40;
  std::size_t dimension = 30;
  double overlap = 0.95;
};
/// Training QUBO of n order-1 stumps picked from fresh Gaussian data:
/// the n lowest-error stumps, kappa = 1/n, lambda = (2/n + 1/n^2) / 2.
QuboProblem synthetic_training_qubo(std::size_t n, std::uint64_t seed, const SyntheticQuboOptions& options = {});

using InstanceGenerator = std::function<QuboProblem(std::size_t n, std::size_t run)>;

struct ScalingRow {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
  std::vector<double> peaks;
};
std::vector<ScalingRow> scaling_sweep(std::span<const std::size_t> qubits, const InstanceGenerator& generator,
                                      std::size_t runs, std::size_t grid_points = kDefaultGridPoints);

}  // namespace qboost
