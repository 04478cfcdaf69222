#include "qboost/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qboost/rng.hpp"

namespace qboost {

namespace {

using Clock = std::chrono::steady_clock;

bool ties(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

// Walks all 2^n assignments in Gray-code order. `delta(x, bit)` prices a
// flip and `exact(x)` evaluates from scratch; the running energy is
// resynchronised every 1024 steps to bound accumulated rounding.
template <class Delta, class Exact>
SolverResult gray_code_minimum(std::size_t n, Delta delta, Exact exact) {
  if (n > kExhaustiveLimit) {
    throw std::invalid_argument("solve_exhaustive: " + std::to_string(n) +
                                " variables exceeds the limit of " +
                                std::to_string(kExhaustiveLimit));
  }
  const auto start = Clock::now();
  Assignment x(n, 0);
  double e = exact(x);
  Assignment best = x;
  double best_e = e;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(g));
    e += delta(x, bit);
    x[bit] ^= 1;
    if ((g & 1023) == 0) e = exact(x);
    if (e < best_e && !ties(e, best_e)) {
      best = x;
      best_e = e;
    } else if (ties(e, best_e) && x < best) {
      best = x;
      best_e = e;
    }
  }
  SolverResult result;
  result.energy = exact(best);
  result.assignment = std::move(best);
  result.evaluations = total;
  result.wall_time = Clock::now() - start;
  return result;
}

}  // namespace

SolverResult solve_exhaustive(const QuboProblem& problem) {
  return gray_code_minimum(
      problem.size(),
      [&](const Assignment& x, std::size_t bit) { return problem.flip_delta(x, bit); },
      [&](const Assignment& x) { return problem.energy(x); });
}

SolverResult solve_exhaustive(const PseudoBooleanProblem& problem) {
  // Per-variable incidence: the terms containing each variable.
  struct Incidence {
    const PseudoBooleanProblem::Indices* indices;
    double value;
  };
  std::vector<std::vector<Incidence>> incident(problem.size());
  for (const auto& [idx, v] : problem.terms())
    for (auto i : idx) incident[i].push_back({&idx, v});

  return gray_code_minimum(
      problem.size(),
      [&](const Assignment& x, std::size_t bit) {
        double field = 0.0;
        for (const Incidence& inc : incident[bit]) {
          bool on = true;
          for (auto k : *inc.indices)
            if (k != bit && !x[k]) {
              on = false;
              break;
            }
          if (on) field += inc.value;
        }
        return x[bit] ? -field : field;
      },
      [&](const Assignment& x) { return problem.energy(x); });
}

SolverResult solve_exhaustive(const Problem& problem) {
  return std::visit([](const auto& p) { return solve_exhaustive(p); }, problem);
}

TabuConfig TabuConfig::defaults(std::size_t n, std::uint64_t seed) {
  const std::size_t m = std::max<std::size_t>(n, 1);
  TabuConfig c;
  c.tenure = std::min<std::size_t>(20, (m + 3) / 4);
  c.max_iterations = 200 * m;
  c.restarts = 10;
  c.seed = seed;
  c.stall_limit = 50 * m;
  return c;
}

FlipState::FlipState(const QuboProblem& problem, Assignment start)
    : problem_(&problem), x_(std::move(start)), energy_(0.0), delta_(problem.size()) {
  if (x_.size() != problem.size()) throw std::invalid_argument("FlipState: assignment length");
  energy_ = problem.energy(x_);
  for (std::size_t i = 0; i < x_.size(); ++i) delta_[i] = problem.flip_delta(x_, i);
}

void FlipState::flip(std::size_t bit) {
  const double step = x_[bit] ? -1.0 : 1.0;
  energy_ += delta_[bit];
  for (const auto& c : problem_->couplings(bit)) {
    const double sign = x_[c.other] ? -1.0 : 1.0;
    delta_[c.other] += sign * c.value * step;
  }
  delta_[bit] = -delta_[bit];
  x_[bit] ^= 1;
}

SolverResult solve_tabu(const QuboProblem& problem, const TabuConfig& config, TabuTrace* trace) {
  const std::size_t n = problem.size();
  if (n == 0) throw std::invalid_argument("solve_tabu: empty problem");
  if (config.tenure < 1 || config.max_iterations < 1 || config.restarts < 1 ||
      config.stall_limit < 1) {
    throw std::invalid_argument("solve_tabu: all config counts must be >= 1");
  }
  const auto start = Clock::now();
  SolverResult result;
  result.energy = std::numeric_limits<double>::infinity();

  for (std::size_t r = 0; r < config.restarts; ++r) {
    Rng rng(config.seed + r);
    Assignment x0(n);
    for (auto& b : x0) b = rng.coin() ? 1 : 0;
    FlipState state(problem, std::move(x0));

    Assignment best = state.assignment();
    double best_e = state.energy();
    std::vector<std::size_t> tabu_until(n, 0);
    std::size_t last_improvement = 0;

    // Guards against drift in the incrementally maintained energy.
    auto improves = [&](double e) { return e < best_e - 1e-12 * std::max(1.0, std::abs(best_e)); };

    for (std::size_t it = 0; it < config.max_iterations; ++it) {
      std::size_t pick = n;
      double pick_delta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double d = state.delta(i);
        const bool allowed = tabu_until[i] <= it || improves(state.energy() + d);
        if (allowed && d < pick_delta) {
          pick = i;
          pick_delta = d;
        }
      }
      if (pick == n) {  // everything tabu and nothing aspirates
        pick = static_cast<std::size_t>(
            std::min_element(state.deltas().begin(), state.deltas().end()) - state.deltas().begin());
      }
      state.flip(pick);
      tabu_until[pick] = it + 1 + config.tenure;
      result.evaluations += n;

      if (improves(state.energy())) {
        best_e = state.energy();
        best = state.assignment();
        last_improvement = it;
      }
      if (trace) trace->rows.push_back({r, it, best_e});
      if (it - last_improvement >= config.stall_limit) break;
    }

    const double exact = problem.energy(best);
    if (exact < result.energy) {
      result.energy = exact;
      result.assignment = std::move(best);
    }
  }
  result.wall_time = Clock::now() - start;
  return result;
}

double incremental_delta(const QuboProblem& problem, std::span<const std::uint8_t> assignment,
                         std::size_t bit) {
  if (assignment.size() != problem.size())
    throw std::invalid_argument("incremental_delta: assignment length mismatch");
  if (bit >= problem.size())
    throw std::out_of_range("incremental_delta: bit " + std::to_string(bit) + " out of range");
  return problem.flip_delta(assignment, bit);
}

QuboSolver make_exhaustive_solver() {
  return [](const QuboProblem& p) { return solve_exhaustive(p); };
}

QuboSolver make_tabu_solver(std::uint64_t seed) {
  return [seed](const QuboProblem& p) { return solve_tabu(p, TabuConfig::defaults(p.size(), seed)); };
}

}  // namespace qboost
