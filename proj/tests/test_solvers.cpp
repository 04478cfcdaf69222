#include <doctest.h>

#include "oracles.hpp"
#include "qboost/solvers.hpp"

using namespace qboost;

TEST_SUITE("solvers") {
  TEST_CASE("exhaustive: trivial cases") {
    QuboProblem one(1);
    one.add_linear(0, -1.0);
    const auto r = solve_exhaustive(one);
    CHECK(r.assignment == Assignment{1});
    CHECK(r.energy == -1.0);

    QuboProblem flat(3);
    flat.add_offset(0.75);
    const auto f = solve_exhaustive(flat);
    CHECK(f.assignment == Assignment{0, 0, 0});
    CHECK(f.energy == 0.75);
    CHECK(f.evaluations == 8);

    CHECK_THROWS(solve_exhaustive(QuboProblem(26)));
  }

  TEST_CASE("exhaustive: lexicographic tie-break") {
    QuboProblem q(3);
    q.add_linear(1, -1.0);
    q.add_linear(2, -1.0);
    q.add_quadratic(1, 2, 1.0);  // (0,1,0) and (0,0,1) tie at -1, (0,1,1) also -1
    CHECK(solve_exhaustive(q).assignment == Assignment{0, 0, 1});
  }

  TEST_CASE("exhaustive matches a counting enumeration oracle") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
      const QuboProblem q = oracle::random_qubo(rng, 12);
      const auto res = solve_exhaustive(q);
      const auto ref = oracle::enumerate(12, [&](const oracle::Bits& x) { return oracle::qubo_energy(q, x); });
      CHECK(res.assignment == ref.assignment);
      CHECK(res.energy == doctest::Approx(ref.energy).epsilon(1e-12));
      CHECK(std::abs(res.energy - q.energy(res.assignment)) <= 1e-9);
      // certified: no single flip improves
      for (std::size_t b = 0; b < 12; ++b) CHECK(q.flip_delta(res.assignment, b) >= -1e-12);
    }
  }

  TEST_CASE("exhaustive on pseudo-boolean problems") {
    Rng rng(22);
    PseudoBooleanProblem p(8);
    for (int t = 0; t < 30; ++t) {
      PseudoBooleanProblem::Indices idx;
      const std::size_t deg = 1 + rng.index(4);
      for (std::size_t d = 0; d < deg; ++d) idx.push_back(static_cast<std::uint32_t>(rng.index(8)));
      p.add_term(idx, rng.uniform(-1.0, 1.0));
    }
    const auto res = solve_exhaustive(p);
    const auto ref = oracle::enumerate(8, [&](const oracle::Bits& x) { return p.energy(x); });
    CHECK(res.assignment == ref.assignment);
    CHECK(res.energy == doctest::Approx(ref.energy).epsilon(1e-12));
    const Problem v = p;
    CHECK(solve_exhaustive(v).assignment == res.assignment);
  }

  TEST_CASE("incremental delta") {
    Rng rng(23);
    const QuboProblem q = oracle::random_qubo(rng, 15);
    Assignment x(15);
    for (auto& b : x) b = rng.coin();
    for (int t = 0; t < 2000; ++t) {
      const std::size_t bit = rng.index(15);
      const double before = q.energy(x);
      const double d = incremental_delta(q, x, bit);
      x[bit] ^= 1;
      CHECK(std::abs(d - (q.energy(x) - before)) <= 1e-10);
      CHECK(std::abs(d + incremental_delta(q, x, bit)) <= 1e-12);
    }
    CHECK_THROWS(incremental_delta(q, x, 15));

    QuboProblem iso(2);
    iso.add_linear(1, 0.7);
    CHECK(incremental_delta(iso, Assignment{0, 0}, 1) == 0.7);
  }

  TEST_CASE("flip state keeps cached energy and deltas current") {
    Rng rng(24);
    const QuboProblem q = oracle::random_qubo(rng, 12);
    Assignment start(12, 0);
    FlipState st(q, start);
    for (int t = 0; t < 500; ++t) {
      st.flip(rng.index(12));
      CHECK(std::abs(st.energy() - q.energy(st.assignment())) <= 1e-9);
    }
    for (std::size_t b = 0; b < 12; ++b) CHECK(std::abs(st.delta(b) - q.flip_delta(st.assignment(), b)) <= 1e-9);
  }

  TEST_CASE("tabu: defaults, determinism, bounds and incumbent trace") {
    const TabuConfig c = TabuConfig::defaults(16, 3);
    CHECK(c.tenure == 4);
    CHECK(c.max_iterations == 3200);
    CHECK(c.restarts == 10);
    CHECK(c.stall_limit == 800);
    CHECK(TabuConfig::defaults(100).tenure == 20);
    CHECK(TabuConfig::defaults(1).tenure == 1);

    Rng rng(25);
    for (int t = 0; t < 10; ++t) {
      const QuboProblem q = oracle::random_qubo(rng, 14);
      const auto cfg = TabuConfig::defaults(14, static_cast<std::uint64_t>(t));
      TabuTrace trace;
      const auto a = solve_tabu(q, cfg, &trace);
      const auto b = solve_tabu(q, cfg);
      CHECK(a.assignment == b.assignment);
      CHECK(a.energy == b.energy);
      CHECK(a.energy >= solve_exhaustive(q).energy - 1e-9);
      CHECK(std::abs(a.energy - q.energy(a.assignment)) <= 1e-9);
      REQUIRE(!trace.rows.empty());
      for (std::size_t r = 1; r < trace.rows.size(); ++r)
        if (trace.rows[r].restart == trace.rows[r - 1].restart)
          CHECK(trace.rows[r].incumbent <= trace.rows[r - 1].incumbent);
    }
    TabuConfig bad = c;
    bad.tenure = 0;
    CHECK_THROWS(solve_tabu(QuboProblem(4), bad));
  }

  TEST_CASE("solver backends") {
    Rng rng(26);
    const QuboProblem q = oracle::random_qubo(rng, 10);
    CHECK(make_exhaustive_solver()(q).energy == solve_exhaustive(q).energy);
    CHECK(make_tabu_solver(5)(q).energy == solve_tabu(q, TabuConfig::defaults(10, 5)).energy);
  }
}
