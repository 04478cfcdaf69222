#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qboost {

/// y = A x for a real symmetric A.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct LanczosOptions {
  std::size_t max_krylov = 120;
  std::size_t max_restarts = 60;
  /// Converged when ||A x - theta x|| <= tolerance * max(1, |theta|).
  double tolerance = 1e-10;
};

struct LanczosResult {
  double value = 0.0;
  std::vector<double> vector;  // unit norm
  std::size_t matvecs = 0;
  bool converged = false;
};

/// Lowest eigenpair of A restricted to the orthogonal complement of
/// `deflate` (orthonormal vectors). Restarted Lanczos with full
/// reorthogonalisation; restarts from the current Ritz vector.
LanczosResult lowest_eigenpair(const LinearOperator& op, std::size_t dimension, std::vector<double> start,
                               std::span<const std::vector<double>> deflate = {},
                               const LanczosOptions& options = {});

}  // namespace qboost
