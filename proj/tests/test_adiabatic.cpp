#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "oracles.hpp"
#include "qboost/adiabatic.hpp"
#include "qboost/lanczos.hpp"
#include "qboost/solvers.hpp"

using namespace qboost;

namespace {

// Closed-form eigenvalues of [[a, b], [b, d]].
std::pair<double, double> eig2(double a, double b, double d) {
  const double m = 0.5 * (a + d), r = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return {m - r, m + r};
}

std::pair<double, double> single_qubit(double c, double s) {
  const double b = 1.0 - s;
  return eig2(0.5 * b, -0.5 * b, 0.5 * b + s * c);
}

QuboProblem single(double c) {
  QuboProblem q(1);
  q.add_linear(0, c);
  return q;
}

}  // namespace

TEST_SUITE("adiabatic") {
  TEST_CASE("problem diagonal") {
    const auto d = problem_hamiltonian_diagonal(single(2.5));
    REQUIRE(d.size() == 2);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 2.5);
    QuboProblem flat(3);
    flat.add_offset(1.25);
    for (double v : problem_hamiltonian_diagonal(flat)) CHECK(v == 1.25);
    Rng rng(1);
    const QuboProblem q = oracle::random_qubo(rng, 6);
    const auto diag = problem_hamiltonian_diagonal(q);
    CHECK(*std::min_element(diag.begin(), diag.end()) == doctest::Approx(solve_exhaustive(q).energy).epsilon(1e-12));
    // variable 0 is the most significant qubit
    QuboProblem first(3);
    first.add_linear(0, 1.0);
    CHECK(problem_hamiltonian_diagonal(first)[4] == 1.0);
    CHECK(basis_index(Assignment{1, 0, 0}) == 4);
    CHECK_THROWS(problem_hamiltonian_diagonal(QuboProblem(15)));
  }

  TEST_CASE("lanczos on a small dense matrix") {
    Rng rng(2);
    const int n = 40;
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
    a = (a + a.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    const LinearOperator op = [&](std::span<const double> x, std::span<double> y) {
      Eigen::Map<Eigen::VectorXd>(y.data(), n) = a * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
    };
    std::vector<double> start(n, 1.0);
    const auto r0 = lowest_eigenpair(op, n, start);
    CHECK(r0.converged);
    CHECK(r0.value == doctest::Approx(ref.eigenvalues()(0)).epsilon(1e-10));
    const std::vector<std::vector<double>> defl{r0.vector};
    const auto r1 = lowest_eigenpair(op, n, start, defl);
    CHECK(r1.value == doctest::Approx(ref.eigenvalues()(1)).epsilon(1e-10));
  }

  TEST_CASE("sweep endpoints and the single-qubit closed form") {
    const double c = 1.7;
    const auto grid = uniform_grid(101);
    for (EigenMethod m : {EigenMethod::lanczos, EigenMethod::dense}) {
      const SpectralCurve curve = spectral_sweep(single(c), grid, {m, true});
      CHECK(std::abs(curve.E0.front()) <= 1e-9);
      CHECK(std::abs(curve.E1.front() - 1.0) <= 1e-9);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto [e0, e1] = single_qubit(c, grid[i]);
        CHECK(std::abs(curve.E0[i] - e0) <= 1e-9);
        CHECK(std::abs(curve.E1[i] - e1) <= 1e-9);
      }
    }
  }

  TEST_CASE("sweep endpoints on random instances, dense agreement, concavity") {
    Rng rng(3);
    const auto grid = uniform_grid(51);
    for (std::size_t n : {2u, 4u, 6u}) {
      const QuboProblem q = oracle::random_qubo(rng, n);
      const SpectralCurve it = spectral_sweep(q, grid);
      const SpectralCurve dense = spectral_sweep(q, grid, {EigenMethod::dense, true});
      CHECK(std::abs(it.E0.front()) <= 1e-9);
      CHECK(std::abs(it.E1.front() - 1.0) <= 1e-9);
      CHECK(std::abs(it.E0.back() - solve_exhaustive(q).energy) <= 1e-8);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(it.E0[i] - dense.E0[i]) <= 1e-8);
        CHECK(std::abs(it.E1[i] - dense.E1[i]) <= 1e-8);
        CHECK(it.E1[i] >= it.E0[i] - 1e-9);
      }
      for (std::size_t i = 1; i + 1 < grid.size(); ++i) CHECK(it.E0[i + 1] - 2.0 * it.E0[i] + it.E0[i - 1] <= 1e-9);
    }
    CHECK_THROWS(spectral_sweep(single(1.0), std::vector<double>{0.0, 0.5}));
    CHECK_THROWS(spectral_sweep(single(1.0), std::vector<double>{0.0, 0.7, 0.5, 1.0}));
    CHECK_THROWS(spectral_sweep(QuboProblem(9), uniform_grid(3), {EigenMethod::dense, true}));
  }

  TEST_CASE("degenerate ground states report E1 = E0") {
    QuboProblem q(2);  // H_P = 0 on two degenerate minima at s = 1: states 00 and 11
    q.add_linear(0, 1.0);
    q.add_linear(1, 1.0);
    q.add_quadratic(0, 1, -2.0);
    const SpectralCurve c = spectral_sweep(q, uniform_grid(11));
    CHECK(std::abs(c.E1.back() - c.E0.back()) <= 1e-9);
  }

  TEST_CASE("min_gap") {
    SUBCASE("H_P = 0 gives a gap of 1 - s") {
      const SpectralCurve c = spectral_sweep(QuboProblem(3), uniform_grid(21));
      for (std::size_t i = 0; i < c.s_grid.size(); ++i) CHECK(std::abs(c.E1[i] - c.E0[i] - (1.0 - c.s_grid[i])) <= 1e-9);
      const auto g = min_gap(c);
      CHECK(g.g_min <= 1e-9);
      CHECK(g.s == 1.0);
    }
    SUBCASE("single qubit against the analytic gap on a fine grid") {
      const double c = -0.8;
      const auto grid = uniform_grid(2001);
      const auto g = min_gap(spectral_sweep(single(c), grid));
      double best = 1e300, s_best = 0.0;
      for (double s : grid) {
        const auto [e0, e1] = single_qubit(c, s);
        if (e1 - e0 < best - 1e-9) {
          best = e1 - e0;
          s_best = s;
        }
      }
      CHECK(std::abs(g.g_min - best) <= 1e-9);
      CHECK(g.s == s_best);
    }
    SUBCASE("grid refinement changes g_min by less than 1e-3") {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const QuboProblem q = synthetic_training_qubo(5, seed);
        const auto coarse = min_gap(spectral_sweep(q, uniform_grid(201)));
        const auto fine = min_gap(spectral_sweep(q, uniform_grid(401)));
        CHECK(std::abs(coarse.g_min - fine.g_min) < 1e-3);
      }
    }
  }

  TEST_CASE("curvature metric") {
    Rng rng(4);
    const QuboProblem q = oracle::random_qubo(rng, 2);
    const SpectralCurve c = spectral_sweep(q, uniform_grid(201));
    const Curvature k = curvature_metric(c);
    REQUIRE(k.values.size() == 199);
    for (std::size_t i = 0; i < k.values.size(); ++i) {
      CHECK(k.values[i] >= 0.0);
      const std::size_t g = i + 1;
      const double h = c.s_grid[1] - c.s_grid[0];
      const double second = (c.E0[g + 1] - 2.0 * c.E0[g] + c.E0[g - 1]) / (h * h);
      const double s = c.s_grid[g];
      CHECK(std::abs(k.values[i] - (-second * s * s * (1 - s) * (1 - s))) <= 1e-9 * std::max(1.0, k.values[i]));
    }
    // s^2 (1-s)^2 is about 2.5e-5 next to either end against at most 1/16
    CHECK(k.values.front() < 1e-2 * k.peak);
    CHECK(k.values.back() < 1e-2 * k.peak);

    // peak agrees with a dense oracle on a 10x finer grid within 2 %
    const Curvature fine = curvature_metric(spectral_sweep(q, uniform_grid(2001), {EigenMethod::dense, false}));
    CHECK(std::abs(k.peak - fine.peak) <= 0.02 * fine.peak);

    CHECK_THROWS(curvature_metric(spectral_sweep(q, uniform_grid(50))));
    SpectralCurve bent = c;
    bent.s_grid[5] += 1e-4;
    CHECK_THROWS(curvature_metric(bent));
  }

  TEST_CASE("v01 matrix element") {
    const double c = 1.3;
    for (double s : {0.2, 0.5, 0.9}) {
      const double b = 1.0 - s;
      Eigen::Matrix2d h;
      h << 0.5 * b, -0.5 * b, -0.5 * b, 0.5 * b + s * c;
      Eigen::Matrix2d dh;
      dh << -0.5, 0.5, 0.5, c - 0.5;
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> e(h);
      const double ref = std::abs(e.eigenvectors().col(0).dot(dh * e.eigenvectors().col(1)));
      const auto v = v01_matrix_element(single(c), s);
      REQUIRE(v.has_value());
      CHECK(std::abs(*v - ref) <= 1e-9);
      CHECK(std::abs(*v01_matrix_element(single(c), s, EigenMethod::dense) - ref) <= 1e-9);
    }
    // s = 0: psi0 = |+>, psi1 = |->, so V01 = <+|H_P|-> = -c/2 in magnitude c/2
    CHECK(std::abs(*v01_matrix_element(single(c), 0.0) - 0.5 * c) <= 1e-9);
    QuboProblem degenerate(1);
    CHECK_FALSE(v01_matrix_element(degenerate, 1.0).has_value());
  }

  TEST_CASE("gap analysis and scaling sweep bookkeeping") {
    const QuboProblem q = synthetic_training_qubo(4, 7);
    CHECK(q.size() == 4);
    const GapAnalysis a = analyze_gap(q, uniform_grid(101));
    CHECK(a.report.g_min >= 0.0);
    CHECK(a.report.s_at_peak > 0.0);
    CHECK(a.report.s_at_peak < 1.0);
    CHECK(a.report.curvature_peak == a.curvature.peak);

    const std::vector<std::size_t> sizes{3, 4};
    const auto rows = scaling_sweep(sizes, [](std::size_t n, std::size_t r) { return synthetic_training_qubo(n, r); }, 3, 101);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
      CHECK(row.peaks.size() == 3);
      for (double p : row.peaks) CHECK(p > 0.0);
    }
  }
}
