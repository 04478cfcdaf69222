#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "qboost/experiment.hpp"
#include "qboost/rng.hpp"

using namespace qboost;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> problems_of(const nlohmann::json& j, const std::string& task) {
  try {
    validate(config_from_json(j, task));
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("qboost_unit_" + name);
  fs::remove_all(p);
  return p;
}

// Non-timing content of every file a run produced.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.path().extension() == ".json") {
      auto j = nlohmann::ordered_json::parse(slurp(e.path()));
      j.erase("timing");
      files[name] = j.dump();
    } else {
      files[name] = slurp(e.path());
    }
  }
  return files;
}

ExperimentConfig small(const std::string& task, const fs::path& out) {
  ExperimentConfig c = default_config(task);
  c.out = out.string();
  c.data.dimension = 4;
  c.data.samples = 240;
  c.train.Q = 6;
  c.train.adaboost_patience = 20;
  c.compare.seeds = 2;
  c.sweep.seeds = 2;
  c.sweep.Q_values = {4, 6};
  c.gap.qubits = 4;
  c.scaling.qubits = {3, 4};
  c.scaling.runs = 2;
  return c;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("defaults validate for every task and round-trip through json") {
    for (const std::string& task : kTasks) {
      const ExperimentConfig c = default_config(task);
      CHECK_NOTHROW(validate(c));
      const auto j = config_to_json(c);
      CHECK(config_to_json(config_from_json(nlohmann::json::parse(j.dump()), task)).dump() == j.dump());
    }
  }

  TEST_CASE("config errors are listed all at once") {
    const auto j = nlohmann::json::parse(R"({
      "bogus": 1,
      "data": {"overlap": 2.0, "colour": "red"},
      "train": {"Q": -3, "mode": "sideways", "scale": "big"},
      "solver": {"kind": "annealer"}
    })");
    const auto p = problems_of(j, "train");
    CHECK(mentions(p, "bogus: unknown key"));
    CHECK(mentions(p, "data.colour: unknown key"));
    CHECK(mentions(p, "train.Q: expected a non-negative integer"));
    CHECK(mentions(p, "train.scale: expected a number"));
    CHECK(mentions(p, "data.overlap"));
    CHECK(mentions(p, "train.mode"));
    CHECK(mentions(p, "solver.kind"));
    CHECK(p.size() == 7);
  }

  TEST_CASE("Q larger than the dictionary is rejected by name") {
    auto p = problems_of(nlohmann::json::parse(R"({"data": {"dimension": 3}, "train": {"Q": 13}})"), "train");
    REQUIRE(p.size() == 1);
    CHECK(p[0] == "train.Q: Q = 13 exceeds the dictionary size 12");
    p = problems_of(nlohmann::json::parse(R"({"data": {"dimension": 3}, "sweep": {"Q_values": [4, 40]}})"),
                    "sweep-overlap");
    CHECK(mentions(p, "sweep.Q_values: Q = 40"));
    p = problems_of(nlohmann::json::parse(R"({"solver": {"kind": "exhaustive"}, "train": {"Q": 26}})"), "train");
    CHECK(mentions(p, "exhaustive solver handles at most 25"));
  }

  TEST_CASE("referenced paths must exist") {
    auto p = problems_of(nlohmann::json::parse(R"({"data": {"source": "csv", "csv_path": "/no/such.csv"}})"), "train");
    CHECK(mentions(p, "data.csv_path: file '/no/such.csv' does not exist"));
    p = problems_of(nlohmann::json::parse(R"({"gap": {"problem_path": "/no/such.txt"}})"), "gap-analysis");
    CHECK(mentions(p, "gap.problem_path"));
  }

  TEST_CASE("task-specific checks") {
    CHECK(mentions(problems_of(nlohmann::json::parse(R"({"task": "train"})"), "compare"), "task:"));
    CHECK(mentions(problems_of(nlohmann::json::parse(R"({"train": {"algorithm": "adaboost"}})"), "compare"),
                   "compare pairs"));
    CHECK(mentions(problems_of(nlohmann::json::parse(R"({"gap": {"qubits": 10, "method": "dense"}})"), "gap-analysis"),
                   "dense diagonalisation"));
    CHECK(mentions(problems_of(nlohmann::json::parse(R"({"scaling": {"qubits": [6, 15]}})"), "scaling"),
                   "scaling.qubits"));
    CHECK(mentions(problems_of(nlohmann::json::parse(R"({"gap": {"grid_points": 21}})"), "gap-analysis"),
                   "at least 51"));
    CHECK(mentions(problems_of(nlohmann::json::parse(R"({"data": {"source": "box"}})"), "sweep-overlap"),
                   "gaussian"));
  }

  TEST_CASE("replica seeds follow the documented derivation") {
    const ReplicaSeeds s = replica_seeds(77, 3);
    CHECK(s.data == derive_seed(77, "data", 3));
    CHECK(s.split == derive_seed(77, "split", 3));
    CHECK(s.solver == derive_seed(77, "solver", 3));
    CHECK(s.data != replica_seeds(77, 4).data);
  }

  TEST_CASE("solver overrides reach tabu") {
    SolverConfig sc;
    sc.restarts = 1;
    sc.max_iterations = 5;
    sc.stall_limit = 5;
    Rng rng(4);
    QuboProblem q(12);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = i; j < 12; ++j) q.add_quadratic(i, j, rng.uniform(-1.0, 1.0));
    const SolverResult limited = make_solver(sc, 9)(q);
    const SolverResult full = make_solver(SolverConfig{}, 9)(q);
    CHECK(limited.evaluations < full.evaluations);
  }

  TEST_CASE("sweep rows cover every (overlap, algorithm, Q)") {
    ExperimentConfig c = small("sweep-overlap", scratch("sweep_rows"));
    c.sweep.overlaps = {0.5, 1.0};
    const SweepResult r = sweep_overlap(c);
    CHECK(r.rows.size() == 2 * 2 * 2);
    CHECK(r.runs.size() == 2 * 2 * 2 * 2);
    for (const SweepRun& run : r.runs) {
      if (run.algorithm != "adaboost") continue;
      // one AdaBoost run fills both Q rows
      auto twin = std::find_if(r.runs.begin(), r.runs.end(), [&](const SweepRun& o) {
        return o.algorithm == "adaboost" && o.overlap == run.overlap && o.replica == run.replica && o.Q != run.Q;
      });
      REQUIRE(twin != r.runs.end());
      CHECK(twin->test_error == run.test_error);
    }
  }

  TEST_CASE("every task writes its artifacts and repeats byte for byte") {
    const std::map<std::string, std::vector<std::string>> expected{
        {"gen-data", {"data.csv", "train.csv", "validation.csv", "test.csv"}},
        {"train", {"model.txt", "report.csv", "report.json"}},
        {"compare", {"compare.csv"}},
        {"sweep-overlap", {"sweep.csv", "sweep_runs.csv"}},
        {"gap-analysis", {"spectrum.csv", "problem.txt"}},
        {"scaling", {"scaling.csv", "scaling_runs.csv"}},
    };
    for (const std::string& task : kTasks) {
      CAPTURE(task);
      const fs::path a = scratch(task + "_a"), b = scratch(task + "_b");
      run_experiment(small(task, a));
      run_experiment(small(task, b));
      for (const std::string& f : expected.at(task)) CHECK(fs::exists(a / f));
      CHECK(fs::exists(a / "metrics.json"));
      CHECK(fs::exists(a / "config.json"));
      auto sa = snapshot(a), sb = snapshot(b);
      sa.erase("config.json");  // records the output directory
      sb.erase("config.json");
      CHECK(sa == sb);
    }
  }

  TEST_CASE("the saved model reproduces the reported test error") {
    const fs::path out = scratch("model");
    const ExperimentConfig c = small("train", out);
    run_experiment(c);
    const StrongClassifier clf = load_model(out / "model.txt");
    const ReplicaSeeds seeds = replica_seeds(c.seed, 0);
    const SplitDataset split = split_even(make_dataset(c.data, seeds.data), seeds.split);
    const auto metrics = nlohmann::json::parse(slurp(out / "metrics.json"));
    CHECK(test_error(clf, split.test) == metrics["results"]["test_error"].get<double>());
  }

  TEST_CASE("the written config reproduces the run") {
    const fs::path a = scratch("cfg_a"), b = scratch("cfg_b");
    run_experiment(small("compare", a));
    ExperimentConfig c = config_from_json(nlohmann::json::parse(slurp(a / "config.json")), "compare");
    c.out = b.string();
    run_experiment(c);
    CHECK(slurp(a / "compare.csv") == slurp(b / "compare.csv"));
  }

  TEST_CASE("error documents are machine readable") {
    const auto j = error_json("config", {"a", "b"});
    CHECK(j["error"]["kind"] == "config");
    CHECK(j["error"]["messages"].size() == 2);
  }
}
