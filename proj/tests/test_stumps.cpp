#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "qboost/rng.hpp"
#include "qboost/stumps.hpp"

using namespace qboost;

namespace {

Stump make(int order, std::size_t i, std::size_t j, Polarity p, double t) { return Stump{{order, i, j, p}, t}; }

Dataset noise_dataset(Rng& rng, std::size_t S, std::size_t M) {
  std::vector<Sample> v(S);
  for (Sample& s : v) {
    s.features.resize(M);
    for (double& x : s.features) x = rng.normal();
    s.label = rng.coin() ? 1 : -1;
  }
  return Dataset(std::move(v));
}

SampleWeights random_weights(Rng& rng, std::size_t S) {
  std::vector<double> w(S);
  for (double& x : w) x = rng.uniform() + 0.01;
  return SampleWeights::normalized(std::move(w));
}

double loop_error(const Stump& st, const Dataset& d, const SampleWeights& w) {
  double e = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    const auto& x = d[s].features;
    double p = st.key.order == 1 ? x[st.key.i] : x[st.key.i] * x[st.key.j];
    if (st.key.polarity == Polarity::negative) p = -p;
    const int out = p - st.threshold >= 0.0 ? 1 : -1;
    if (out != d[s].label) e += w[s];
  }
  return e;
}

}  // namespace

TEST_SUITE("stumps") {
  TEST_CASE("dictionary cardinality") {
    CHECK(dictionary_size(30, {true, true}) == 930);
    CHECK(dictionary_size(96, {true, true}) == 9312);
    CHECK(dictionary_size(1, {true, true}) == 2);
    CHECK(dictionary_size(5, {true, false}) == 10);
    CHECK(dictionary_size(5, {false, true}) == 20);
    CHECK(dictionary_keys(30, {true, true}).size() == 930);
  }

  TEST_CASE("dictionary ordering") {
    const auto keys = dictionary_keys(3, {true, true});
    REQUIRE(keys.size() == 12);
    CHECK(keys[0].order == 1);
    CHECK(keys[0].polarity == Polarity::positive);
    CHECK(keys[2].i == 2);
    CHECK(keys[3].polarity == Polarity::negative);
    CHECK(keys[3].i == 0);
    CHECK(keys[6].order == 2);
    CHECK(keys[6].i == 0);
    CHECK(keys[6].j == 1);
    CHECK(keys[7].j == 2);
    CHECK(keys[8].i == 1);
    CHECK(keys[9].polarity == Polarity::negative);
  }

  TEST_CASE("evaluate") {
    const std::vector<double> x{0.5, 1.0};
    CHECK(make(1, 0, 0, Polarity::positive, 0.0).evaluate(x) == 1);
    const std::vector<double> y{2.0, 3.0};
    CHECK(make(2, 0, 1, Polarity::negative, 0.0).evaluate(y) == -1);
    CHECK(make(1, 1, 1, Polarity::positive, 1.0).evaluate(x) == 1);  // sign(0) = +1
    CHECK(evaluate(make(1, 0, 0, Polarity::positive, 0.0), x, 2) == 1);
    CHECK_THROWS(evaluate(make(1, 0, 0, Polarity::positive, 0.0), x, 3));
    CHECK_THROWS(evaluate(make(2, 0, 2, Polarity::positive, 0.0), x, 2));
  }

  TEST_CASE("build_dictionary on a separable 1-d set") {
    const Dataset d({Sample{{-2.0}, -1}, Sample{{-0.5}, -1}, Sample{{0.25}, 1}, Sample{{3.0}, 1}});
    const auto w = SampleWeights::uniform(4);
    const Dictionary dict = build_dictionary(d, w, {true, true});
    REQUIRE(dict.size() == 2);
    const Stump& pos = dict[0];
    CHECK(pos.key.polarity == Polarity::positive);
    CHECK(pos.threshold > -0.5);
    CHECK(pos.threshold <= 0.25);
    CHECK(weighted_error(pos, d, w) == 0.0);
    // brute-force scan of every candidate agrees
    double best = 1.0;
    for (double t : candidate_thresholds({-2.0, -0.5, 0.25, 3.0}))
      best = std::min(best, weighted_error(make(1, 0, 0, Polarity::positive, t), d, w));
    CHECK(best == 0.0);
  }

  TEST_CASE("M = 2 with both orders has 6 stumps and is deterministic") {
    Rng rng(3);
    const Dataset d = noise_dataset(rng, 40, 2);
    const auto w = random_weights(rng, 40);
    const Dictionary a = build_dictionary(d, w, {true, true});
    const Dictionary b = build_dictionary(d, w, {true, true});
    CHECK(a.size() == 6);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  }

  TEST_CASE("candidate thresholds") {
    const auto c = candidate_thresholds({2.0, 1.0, 2.0, 4.0});
    REQUIRE(c.size() == 4);
    CHECK(c[0] < 1.0);
    CHECK(c[1] == 1.5);
    CHECK(c[2] == 3.0);
    CHECK(c[3] > 4.0);
    CHECK(std::is_sorted(c.begin(), c.end()));
  }

  TEST_CASE("threshold optimality by re-scan, and fitter agrees with build_dictionary") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
      const Dataset d = noise_dataset(rng, 30, 4);
      const auto w = random_weights(rng, 30);
      const Dictionary dict = build_dictionary(d, w, {true, true});
      const StumpFitter fitter(d, OrderSet{true, true});
      const Dictionary refit = fitter.fit(w);
      REQUIRE(refit.size() == dict.size());
      for (std::size_t k = 0; k < dict.size(); ++k) {
        const Stump& st = dict[k];
        CHECK(st == refit[k]);
        std::vector<double> proj;
        for (const Sample& s : d.samples())
          proj.push_back(st.key.order == 1 ? s.features[st.key.i] : s.features[st.key.i] * s.features[st.key.j]);
        if (st.key.polarity == Polarity::negative)
          for (double& p : proj) p = -p;
        const double err = weighted_error(st, d, w);
        for (double t : candidate_thresholds(proj)) {
          Stump other = st;
          other.threshold = t;
          CHECK(weighted_error(other, d, w) >= err - 1e-15);
        }
        CHECK(std::abs(fitter.fit_one(k, w).error - err) <= 1e-12);
      }
    }
  }

  TEST_CASE("weighted error against a loop oracle, and the mirror identity") {
    Rng rng(5);
    const Dataset d = noise_dataset(rng, 50, 3);
    const auto w = random_weights(rng, 50);
    for (int t = 0; t < 20; ++t) {
      const Stump st = make(t % 2 ? 2 : 1, 0, t % 2 ? 2 : 0, t % 3 ? Polarity::positive : Polarity::negative,
                            rng.normal());
      const double e = weighted_error(st, d, w);
      CHECK(e == doctest::Approx(loop_error(st, d, w)).epsilon(1e-14));
      double mirrored = 0.0;
      for (std::size_t s = 0; s < d.size(); ++s)
        if (-st.evaluate(d[s].features) != d[s].label) mirrored += w[s];
      CHECK(std::abs(e + mirrored - 1.0) <= 1e-12);
    }
    const Dataset perfect({Sample{{1.0}, 1}, Sample{{-1.0}, -1}});
    const auto u = SampleWeights::uniform(2);
    CHECK(weighted_error(make(1, 0, 0, Polarity::positive, 0.0), perfect, u) == 0.0);
    CHECK(weighted_error(make(1, 0, 0, Polarity::negative, 0.0), perfect, u) == doctest::Approx(1.0));
  }

  TEST_CASE("select_top_k") {
    Rng rng(9);
    const Dataset d = noise_dataset(rng, 40, 3);
    const auto w = random_weights(rng, 40);
    const Dictionary dict = build_dictionary(d, w, {true, true});

    std::vector<std::size_t> order(dict.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> errs;
    for (const Stump& s : dict.stumps()) errs.push_back(loop_error(s, d, w));
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return errs[a] < errs[b]; });

    const auto all = select_top_k(dict, d, w, dict.size());
    REQUIRE(all.size() == dict.size());
    for (std::size_t k = 0; k < all.size(); ++k) CHECK(all[k] == dict[order[k]]);

    const auto five = select_top_k(dict, d, w, 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(five[k] == dict[order[k]]);

    std::set<StumpKey> exclude{dict[order[0]].key};
    const auto ex = select_top_k(dict, d, w, 2, exclude);
    CHECK(ex[0] == dict[order[1]]);
    CHECK_THROWS(select_top_k(dict, d, w, dict.size(), exclude));

    // identical errors: dictionary order wins
    const Dataset same({Sample{{1.0, 1.0}, 1}});
    std::vector<Stump> st;
    for (std::size_t m = 0; m < 2; ++m) st.push_back(make(1, m, m, Polarity::positive, 0.0));
    const Dictionary tie(st, 2);
    const auto first = select_top_k(tie, same, SampleWeights::uniform(1), 1);
    CHECK(first[0] == st[0]);
  }

  TEST_CASE("dictionary validation") {
    CHECK_THROWS(Dictionary({make(2, 1, 0, Polarity::positive, 0.0)}, 2));
    CHECK_THROWS(Dictionary({make(1, 3, 3, Polarity::positive, 0.0)}, 2));
    CHECK_THROWS(Dictionary({make(3, 0, 1, Polarity::positive, 0.0)}, 2));
  }
}
