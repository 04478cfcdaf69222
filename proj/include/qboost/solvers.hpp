#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qboost/qubo.hpp"

namespace qboost {

struct SolverResult {
  Assignment assignment;
  double energy = 0.0;
  std::uint64_t evaluations = 0;
  std::chrono::duration<double> wall_time{0.0};
};

/// Exhaustive enumeration is refused above this many variables.
inline constexpr std::size_t kExhaustiveLimit = 25;

/// Global minimum by Gray-code enumeration of all 2^n assignments. Among
/// co-optimal assignments (energies within 1e-9 relative) the lexicographically
/// smallest bit vector wins, bit 0 first.
SolverResult solve_exhaustive(const QuboProblem& problem);
SolverResult solve_exhaustive(const PseudoBooleanProblem& problem);
SolverResult solve_exhaustive(const Problem& problem);

struct TabuConfig {
  std::size_t tenure = 1;
  std::size_t max_iterations = 1;  // per restart
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  std::size_t stall_limit = 1;     // iterations without a new incumbent

  /// tenure = min(20, ceil(n/4)), max_iterations = 200 n, restarts = 10,
  /// stall_limit = 50 n.
  static TabuConfig defaults(std::size_t n, std::uint64_t seed = 0);
};

/// Optional per-iteration trace of the incumbent (best-so-far) energy.
struct TabuTrace {
  struct Row {
    std::size_t restart;
    std::size_t iteration;
    double incumbent;
  };
  std::vector<Row> rows;
};

/// Single-flip tabu search with best-improvement moves. A flipped bit stays
/// tabu for `tenure` iterations unless flipping it would beat the incumbent
/// (aspiration). Equal-delta candidates go to the lowest index. Restart r
/// starts from a random assignment drawn with seed + r.
SolverResult solve_tabu(const QuboProblem& problem, const TabuConfig& config,
                        TabuTrace* trace = nullptr);

/// energy(flip(assignment, bit)) - energy(assignment), range-checked.
double incremental_delta(const QuboProblem& problem, std::span<const std::uint8_t> assignment,
                         std::size_t bit);

/// Assignment with cached energy and per-bit flip deltas kept current under
/// flips in O(degree).
class FlipState {
 public:
  FlipState(const QuboProblem& problem, Assignment start);

  const Assignment& assignment() const { return x_; }
  double energy() const { return energy_; }
  double delta(std::size_t bit) const { return delta_[bit]; }
  std::span<const double> deltas() const { return delta_; }
  void flip(std::size_t bit);

 private:
  const QuboProblem* problem_;
  Assignment x_;
  double energy_;
  std::vector<double> delta_;
};

/// Solver backend used by the training loops.
using QuboSolver = std::function<SolverResult(const QuboProblem&)>;

QuboSolver make_exhaustive_solver();
/// Tabu with TabuConfig::defaults(n, seed) for each problem size n.
QuboSolver make_tabu_solver(std::uint64_t seed);

}  // namespace qboost
