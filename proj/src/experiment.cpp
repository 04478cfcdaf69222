#include "qboost/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "qboost/rng.hpp"

namespace qboost {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

bool one_of(const std::string& v, const std::vector<std::string>& choices) {
  return std::find(choices.begin(), choices.end(), v) != choices.end();
}

std::string choices_text(const std::vector<std::string>& choices) {
  std::string out;
  for (const auto& c : choices) out += (out.empty() ? "" : ", ") + c;
  return out;
}

// ---- reading ------------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void read(const json& v, bool& out, const std::string& path) {
    if (v.is_boolean()) out = v.get<bool>();
    else problems_.push_back(path + ": expected a boolean");
  }
  void read(const json& v, std::string& out, const std::string& path) {
    if (v.is_string()) out = v.get<std::string>();
    else problems_.push_back(path + ": expected a string");
  }
  void read(const json& v, double& out, const std::string& path) {
    if (v.is_number()) out = v.get<double>();
    else problems_.push_back(path + ": expected a number");
  }
  void read(const json& v, std::uint64_t& out, const std::string& path) {
    if (v.is_number_unsigned()) out = v.get<std::uint64_t>();
    else problems_.push_back(path + ": expected a non-negative integer");
  }
  template <class T>
  void read(const json& v, std::vector<T>& out, const std::string& path) {
    if (!v.is_array()) {
      problems_.push_back(path + ": expected an array");
      return;
    }
    std::vector<T> values(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) read(v[k], values[k], path + "[" + std::to_string(k) + "]");
    out = std::move(values);
  }

  using Handler = std::function<void(const json&, const std::string&)>;

  template <class T>
  static std::pair<std::string, Handler> field(Reader& r, const std::string& key, T& target) {
    return {key, [&r, &target](const json& v, const std::string& path) { r.read(v, target, path); }};
  }

  void object(const json& v, const std::string& path, const std::vector<std::pair<std::string, Handler>>& fields) {
    if (!v.is_object()) {
      problems_.push_back(path + ": expected an object");
      return;
    }
    for (const auto& [key, value] : v.items()) {
      const std::string sub = path.empty() ? key : path + "." + key;
      auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
      if (it == fields.end()) problems_.push_back(sub + ": unknown key");
      else it->second(value, sub);
    }
  }

 private:
  std::vector<std::string>& problems_;
};

// ---- writing ------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt(double v) { return format_double(v); }

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double sq = 0.0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(v.size() - 1));
  }
  return s;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

OrderSet orders_of(const DictionaryConfig& d) { return OrderSet{d.order1, d.order2}; }

std::size_t data_dimension(const DataConfig& d) { return d.source == "box" ? 2 : d.dimension; }

SelectionMode mode_of(const std::string& m) {
  return m == "augment" ? SelectionMode::augment : SelectionMode::replace_all;
}

ojson report_json(const TrainReport& r) {
  ojson its = ojson::array();
  ojson timing_its = ojson::array();
  for (const IterationRecord& rec : r.iterations) {
    ojson row;
    row["pass"] = rec.pass;
    row["iteration"] = rec.iteration;
    row["weak_learners"] = rec.weak_learners;
    row["t_inner"] = rec.t_inner;
    row["train_error"] = rec.train_error;
    row["validation_error"] = rec.validation_error;
    row["lambda"] = rec.lambda;
    row["objective"] = rec.objective;
    row["epsilon"] = rec.epsilon;
    row["alpha"] = rec.alpha;
    row["solver_evaluations"] = rec.solver_evaluations;
    row["sweep_validation_errors"] = rec.sweep_validation_errors;
    its.push_back(std::move(row));
    timing_its.push_back(rec.solver_seconds);
  }
  ojson j;
  j["algorithm"] = r.algorithm;
  j["train_error"] = r.train_error;
  j["validation_error"] = r.validation_error;
  j["test_error"] = r.test_error;
  j["weak_learners"] = r.weak_learner_count;
  j["rounds"] = r.rounds;
  j["pass_t_inner"] = r.pass_t_inner;
  j["kept_passes"] = r.kept_passes;
  j["iterations"] = std::move(its);
  j["timing"] = {{"wall_seconds", r.wall_seconds}, {"solver_seconds", std::move(timing_its)}};
  return j;
}

ojson metrics_doc(const ExperimentConfig& c, ojson results, double wall_seconds) {
  ojson j;
  j["schema_version"] = 1;
  j["task"] = c.task;
  j["seed"] = c.seed;
  j["results"] = std::move(results);
  j["timing"] = {{"wall_seconds", wall_seconds}};
  return j;
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) out += (out.empty() ? "" : ",") + c;
  return out + "\n";
}

std::uint64_t instance_seed(std::uint64_t root, std::size_t n, std::size_t run) {
  return derive_seed(root, "instance", static_cast<std::uint64_t>(n) * 1000003u + run);
}

// ---- tasks --------------------------------------------------------------

void run_gen_data(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto start = Clock::now();
  const ReplicaSeeds seeds = replica_seeds(c.seed, 0);
  const Dataset data = make_dataset(c.data, seeds.data);
  const SplitDataset split = split_even(data, seeds.split);
  save_csv(data, out / "data.csv");
  save_csv(split.train, out / "train.csv");
  save_csv(split.validation, out / "validation.csv");
  save_csv(split.test, out / "test.csv");
  std::size_t positives = 0;
  for (const Sample& s : data.samples()) positives += s.label == 1;
  ojson r;
  r["samples"] = data.size();
  r["dimension"] = data.dimension();
  r["positives"] = positives;
  r["negatives"] = data.size() - positives;
  r["split_sizes"] = {split.train.size(), split.validation.size(), split.test.size()};
  write_json(out / "metrics.json", metrics_doc(c, std::move(r), seconds_since(start)));
}

void run_train(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto start = Clock::now();
  const ReplicaSeeds seeds = replica_seeds(c.seed, 0);
  const SplitDataset split = split_even(make_dataset(c.data, seeds.data), seeds.split);
  const RunResult run = train_algorithm(c, c.train.algorithm, c.train.Q, split, seeds.solver);
  save_model(out / "model.txt", run.classifier);
  std::ostringstream csv;
  write_report_csv(csv, run.report);
  write_text(out / "report.csv", csv.str());
  write_json(out / "report.json", report_json(run.report));
  ojson r;
  r["algorithm"] = c.train.algorithm;
  r["train_error"] = run.report.train_error;
  r["validation_error"] = run.report.validation_error;
  r["test_error"] = run.report.test_error;
  r["weak_learners"] = run.report.weak_learner_count;
  r["iterations"] = run.report.rounds;
  r["kappa"] = run.classifier.kappa();
  r["theta"] = run.classifier.theta();
  ojson m = metrics_doc(c, std::move(r), seconds_since(start));
  m["timing"]["training_seconds"] = run.report.wall_seconds;
  write_json(out / "metrics.json", m);
}

void run_compare(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto start = Clock::now();
  std::string csv = "replica,algorithm,train_error,validation_error,test_error,weak_learners,rounds\n";
  std::vector<double> q_err, a_err, q_size, a_size;
  std::size_t fewer = 0;
  ojson timing = ojson::array();
  for (std::size_t r = 0; r < c.compare.seeds; ++r) {
    const ReplicaSeeds seeds = replica_seeds(c.seed, r);
    const SplitDataset split = split_even(make_dataset(c.data, seeds.data), seeds.split);
    const RunResult q = train_algorithm(c, c.train.algorithm, c.train.Q, split, seeds.solver);
    const RunResult a = train_algorithm(c, "adaboost", c.train.Q, split, seeds.solver);
    for (const RunResult* run : {&q, &a}) {
      const TrainReport& rep = run->report;
      csv += csv_line({std::to_string(r), rep.algorithm, fmt(rep.train_error), fmt(rep.validation_error),
                       fmt(rep.test_error), std::to_string(rep.weak_learner_count), std::to_string(rep.rounds)});
    }
    q_err.push_back(q.report.test_error);
    a_err.push_back(a.report.test_error);
    q_size.push_back(static_cast<double>(q.report.weak_learner_count));
    a_size.push_back(static_cast<double>(a.report.weak_learner_count));
    fewer += q.report.weak_learner_count < a.report.weak_learner_count;
    timing.push_back({{"replica", r}, {"qboost_seconds", q.report.wall_seconds}, {"adaboost_seconds", a.report.wall_seconds}});
  }
  write_text(out / "compare.csv", csv);
  auto summary = [](const std::vector<double>& err, const std::vector<double>& size) {
    const Stats e = stats(err), s = stats(size);
    return ojson{{"mean_test_error", e.mean}, {"std_test_error", e.std},
                 {"mean_weak_learners", s.mean}, {"std_weak_learners", s.std}};
  };
  ojson r;
  r["replicas"] = c.compare.seeds;
  r["qboost_algorithm"] = c.train.algorithm;
  r["qboost"] = summary(q_err, q_size);
  r["adaboost"] = summary(a_err, a_size);
  r["fewer_weak_learners_fraction"] = static_cast<double>(fewer) / static_cast<double>(c.compare.seeds);
  ojson m = metrics_doc(c, std::move(r), seconds_since(start));
  m["timing"]["runs"] = std::move(timing);
  write_json(out / "metrics.json", m);
}

void run_sweep(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto start = Clock::now();
  const SweepResult res = sweep_overlap(c);
  std::string runs = "overlap,algorithm,Q,replica,test_error,weak_learners\n";
  for (const SweepRun& r : res.runs)
    runs += csv_line({fmt(r.overlap), r.algorithm, std::to_string(r.Q), std::to_string(r.replica), fmt(r.test_error),
                      std::to_string(r.weak_learners)});
  std::string rows = "overlap,algorithm,Q,mean_test_error,std_test_error,mean_weak_learners,std_weak_learners\n";
  ojson jrows = ojson::array();
  for (const SweepRow& r : res.rows) {
    rows += csv_line({fmt(r.overlap), r.algorithm, std::to_string(r.Q), fmt(r.mean_test_error), fmt(r.std_test_error),
                      fmt(r.mean_weak_learners), fmt(r.std_weak_learners)});
    jrows.push_back({{"overlap", r.overlap}, {"algorithm", r.algorithm}, {"Q", r.Q},
                     {"mean_test_error", r.mean_test_error}, {"std_test_error", r.std_test_error},
                     {"mean_weak_learners", r.mean_weak_learners}, {"std_weak_learners", r.std_weak_learners}});
  }
  write_text(out / "sweep_runs.csv", runs);
  write_text(out / "sweep.csv", rows);
  ojson r;
  r["replicas"] = c.sweep.seeds;
  r["rows"] = std::move(jrows);
  write_json(out / "metrics.json", metrics_doc(c, std::move(r), seconds_since(start)));
}

QuboProblem gap_problem(const ExperimentConfig& c) {
  if (!c.gap.problem_path.empty()) {
    Problem p = load_problem(c.gap.problem_path);
    if (!std::holds_alternative<QuboProblem>(p))
      throw std::invalid_argument("gap.problem_path: spectral analysis needs a quadratic problem");
    return std::get<QuboProblem>(std::move(p));
  }
  SyntheticQuboOptions opts;
  opts.samples = c.gap.samples;
  return synthetic_training_qubo(c.gap.qubits, instance_seed(c.seed, c.gap.qubits, 0), opts);
}

void run_gap(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto start = Clock::now();
  const QuboProblem problem = gap_problem(c);
  std::ostringstream pf;
  write_problem(pf, problem);
  write_text(out / "problem.txt", pf.str());

  SweepOptions opts;
  opts.method = c.gap.method == "dense" ? EigenMethod::dense : EigenMethod::lanczos;
  const GapAnalysis a = analyze_gap(problem, uniform_grid(c.gap.grid_points), opts);
  std::string csv = "s,E0,E1,gap,curvature\n";
  for (std::size_t i = 0; i < a.curve.s_grid.size(); ++i) {
    const bool interior = i > 0 && i + 1 < a.curve.s_grid.size();
    csv += csv_line({fmt(a.curve.s_grid[i]), fmt(a.curve.E0[i]), fmt(a.curve.E1[i]),
                     fmt(a.curve.E1[i] - a.curve.E0[i]), interior ? fmt(a.curvature.values[i - 1]) : ""});
  }
  write_text(out / "spectrum.csv", csv);

  ojson r;
  r["n_qubits"] = a.curve.n_qubits;
  r["grid_points"] = a.curve.s_grid.size();
  r["g_min"] = a.report.g_min;
  r["s_at_gmin"] = a.report.s_at_gmin;
  r["curvature_peak"] = a.report.curvature_peak;
  r["s_at_peak"] = a.report.s_at_peak;
  r["e0_at_1"] = a.curve.E0.back();
  r["exhaustive_optimum"] = solve_exhaustive(problem).energy;
  if (a.report.v01_at_peak) {
    r["v01_at_peak"] = *a.report.v01_at_peak;
    r["v01_bound"] = a.report.g_min > 0.0 ? ojson(2.0 * *a.report.v01_at_peak * *a.report.v01_at_peak / a.report.g_min)
                                          : ojson(nullptr);
  } else {
    r["v01_at_peak"] = nullptr;
    r["v01_bound"] = nullptr;
  }
  write_json(out / "metrics.json", metrics_doc(c, std::move(r), seconds_since(start)));
}

void run_scaling(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto start = Clock::now();
  SyntheticQuboOptions opts;
  opts.samples = c.scaling.samples;
  const std::uint64_t root = c.seed;
  const auto rows = scaling_sweep(
      c.scaling.qubits,
      [&](std::size_t n, std::size_t run) { return synthetic_training_qubo(n, instance_seed(root, n, run), opts); },
      c.scaling.runs, c.scaling.grid_points);

  std::string table = "n,mean,std\n";
  std::string runs = "n,run,peak\n";
  ojson jrows = ojson::array();
  std::vector<double> xs, ys;
  for (const ScalingRow& row : rows) {
    table += csv_line({std::to_string(row.n), fmt(row.mean), fmt(row.std)});
    for (std::size_t k = 0; k < row.peaks.size(); ++k)
      runs += csv_line({std::to_string(row.n), std::to_string(k), fmt(row.peaks[k])});
    jrows.push_back({{"n", row.n}, {"mean", row.mean}, {"std", row.std}});
    xs.push_back(static_cast<double>(row.n));
    ys.push_back(std::log(row.mean));
  }
  write_text(out / "scaling.csv", table);
  write_text(out / "scaling_runs.csv", runs);

  ojson r;
  r["runs"] = c.scaling.runs;
  r["rows"] = std::move(jrows);
  if (xs.size() >= 2) {
    const double mx = stats(xs).mean, my = stats(ys).mean;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxy += (xs[k] - mx) * (ys[k] - my);
      sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    r["log_mean_slope"] = sxy / sxx;
  } else {
    r["log_mean_slope"] = nullptr;
  }
  write_json(out / "metrics.json", metrics_doc(c, std::move(r), seconds_since(start)));
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems)), problems_(std::move(problems)) {}

ExperimentConfig default_config(const std::string& task) {
  ExperimentConfig c;
  c.task = task;
  return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  ojson j;
  j["task"] = c.task;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["data"] = {{"source", c.data.source},       {"dimension", c.data.dimension},
               {"overlap", c.data.overlap},     {"samples", c.data.samples},
               {"csv_path", c.data.csv_path},   {"csv_header", c.data.csv_header},
               {"normalize", c.data.normalize}};
  j["dictionary"] = {{"order1", c.dictionary.order1}, {"order2", c.dictionary.order2}};
  j["solver"] = {{"kind", c.solver.kind},
                 {"tenure", c.solver.tenure},
                 {"max_iterations", c.solver.max_iterations},
                 {"restarts", c.solver.restarts},
                 {"stall_limit", c.solver.stall_limit}};
  j["train"] = {{"algorithm", c.train.algorithm},
                {"Q", c.train.Q},
                {"lambdas", c.train.lambdas},
                {"mode", c.train.mode},
                {"scale", c.train.scale},
                {"patience", c.train.patience},
                {"max_iterations", c.train.max_iterations},
                {"max_passes", c.train.max_passes},
                {"refit_thresholds", c.train.refit_thresholds},
                {"co_optimize_theta", c.train.co_optimize_theta},
                {"adaboost_patience", c.train.adaboost_patience},
                {"adaboost_max_rounds", c.train.adaboost_max_rounds}};
  j["compare"] = {{"seeds", c.compare.seeds}};
  j["sweep"] = {{"overlaps", c.sweep.overlaps},
                {"algorithms", c.sweep.algorithms},
                {"Q_values", c.sweep.Q_values},
                {"seeds", c.sweep.seeds}};
  j["gap"] = {{"qubits", c.gap.qubits},
              {"samples", c.gap.samples},
              {"grid_points", c.gap.grid_points},
              {"method", c.gap.method},
              {"problem_path", c.gap.problem_path}};
  j["scaling"] = {{"qubits", c.scaling.qubits},
                  {"runs", c.scaling.runs},
                  {"samples", c.scaling.samples},
                  {"grid_points", c.scaling.grid_points}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& task) {
  ExperimentConfig c = default_config(task);
  std::vector<std::string> problems;
  Reader r(problems);
  using R = Reader;
  std::string file_task = task;

  auto section = [&](std::vector<std::pair<std::string, R::Handler>> fields) {
    return [&r, fields = std::move(fields)](const json& v, const std::string& path) { r.object(v, path, fields); };
  };

  r.object(j, "",
           {
               R::field(r, "task", file_task),
               R::field(r, "seed", c.seed),
               R::field(r, "out", c.out),
               {"data", section({R::field(r, "source", c.data.source), R::field(r, "dimension", c.data.dimension),
                                 R::field(r, "overlap", c.data.overlap), R::field(r, "samples", c.data.samples),
                                 R::field(r, "csv_path", c.data.csv_path),
                                 R::field(r, "csv_header", c.data.csv_header),
                                 R::field(r, "normalize", c.data.normalize)})},
               {"dictionary",
                section({R::field(r, "order1", c.dictionary.order1), R::field(r, "order2", c.dictionary.order2)})},
               {"solver", section({R::field(r, "kind", c.solver.kind), R::field(r, "tenure", c.solver.tenure),
                                   R::field(r, "max_iterations", c.solver.max_iterations),
                                   R::field(r, "restarts", c.solver.restarts),
                                   R::field(r, "stall_limit", c.solver.stall_limit)})},
               {"train", section({R::field(r, "algorithm", c.train.algorithm), R::field(r, "Q", c.train.Q),
                                  R::field(r, "lambdas", c.train.lambdas), R::field(r, "mode", c.train.mode),
                                  R::field(r, "scale", c.train.scale), R::field(r, "patience", c.train.patience),
                                  R::field(r, "max_iterations", c.train.max_iterations),
                                  R::field(r, "max_passes", c.train.max_passes),
                                  R::field(r, "refit_thresholds", c.train.refit_thresholds),
                                  R::field(r, "co_optimize_theta", c.train.co_optimize_theta),
                                  R::field(r, "adaboost_patience", c.train.adaboost_patience),
                                  R::field(r, "adaboost_max_rounds", c.train.adaboost_max_rounds)})},
               {"compare", section({R::field(r, "seeds", c.compare.seeds)})},
               {"sweep", section({R::field(r, "overlaps", c.sweep.overlaps),
                                  R::field(r, "algorithms", c.sweep.algorithms),
                                  R::field(r, "Q_values", c.sweep.Q_values), R::field(r, "seeds", c.sweep.seeds)})},
               {"gap", section({R::field(r, "qubits", c.gap.qubits), R::field(r, "samples", c.gap.samples),
                                R::field(r, "grid_points", c.gap.grid_points), R::field(r, "method", c.gap.method),
                                R::field(r, "problem_path", c.gap.problem_path)})},
               {"scaling", section({R::field(r, "qubits", c.scaling.qubits), R::field(r, "runs", c.scaling.runs),
                                    R::field(r, "samples", c.scaling.samples),
                                    R::field(r, "grid_points", c.scaling.grid_points)})},
           });
  if (file_task != task) problems.push_back("task: config says '" + file_task + "' but '" + task + "' was requested");
  if (!problems.empty()) {
    // Fields with the wrong type kept their defaults, so the semantic checks
    // still report everything else in the same pass.
    try {
      validate(c);
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
    throw ConfigError(std::move(problems));
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> p;
  auto need = [&p](bool ok, const std::string& msg) {
    if (!ok) p.push_back(msg);
  };
  need(one_of(c.task, kTasks), "task: must be one of " + choices_text(kTasks));
  need(!c.out.empty(), "out: must not be empty");

  const bool uses_data = c.task == "gen-data" || c.task == "train" || c.task == "compare" || c.task == "sweep-overlap";
  const bool trains = c.task == "train" || c.task == "compare" || c.task == "sweep-overlap";
  if (uses_data) {
    const DataConfig& d = c.data;
    need(one_of(d.source, {"gaussian", "box", "csv"}), "data.source: must be one of gaussian, box, csv");
    need(d.overlap >= 0.0 && d.overlap <= 1.0, "data.overlap: must lie in [0, 1]");
    need(d.dimension >= 1, "data.dimension: must be >= 1");
    if (d.source != "csv") need(d.samples >= (d.source == "box" ? 4u : 3u), "data.samples: too few samples to split");
    if (d.source == "csv") {
      need(!d.csv_path.empty(), "data.csv_path: required when data.source is csv");
      if (!d.csv_path.empty())
        need(std::filesystem::exists(d.csv_path), "data.csv_path: file '" + d.csv_path + "' does not exist");
    }
    if (c.task == "sweep-overlap") need(d.source == "gaussian", "data.source: sweep-overlap needs gaussian data");
  }
  if (trains) {
    need(c.dictionary.order1 || c.dictionary.order2, "dictionary: at least one order must be enabled");
    need(one_of(c.solver.kind, {"tabu", "exhaustive"}), "solver.kind: must be tabu or exhaustive");
    const TrainConfig& t = c.train;
    need(one_of(t.algorithm, kAlgorithms), "train.algorithm: must be one of " + choices_text(kAlgorithms));
    need(one_of(t.mode, {"augment", "replace-all"}), "train.mode: must be augment or replace-all");
    need(t.Q >= 1, "train.Q: must be >= 1");
    need(t.scale > 0.0, "train.scale: must be positive");
    need(t.patience >= 1, "train.patience: must be >= 1");
    need(t.max_iterations >= 1, "train.max_iterations: must be >= 1");
    need(t.max_passes >= 1, "train.max_passes: must be >= 1");
    need(t.adaboost_patience >= 1, "train.adaboost_patience: must be >= 1");
    need(t.adaboost_max_rounds >= 1, "train.adaboost_max_rounds: must be >= 1");
    for (double l : t.lambdas) need(l >= 0.0 && std::isfinite(l), "train.lambdas: values must be finite and >= 0");

    std::vector<std::size_t> qs{t.Q};
    if (c.task == "sweep-overlap") qs = c.sweep.Q_values;
    if (c.data.source != "csv" && (c.dictionary.order1 || c.dictionary.order2)) {
      const std::size_t size = dictionary_size(data_dimension(c.data), orders_of(c.dictionary));
      const std::string key = c.task == "sweep-overlap" ? "sweep.Q_values" : "train.Q";
      for (std::size_t q : qs)
        need(q <= size, key + ": Q = " + std::to_string(q) + " exceeds the dictionary size " + std::to_string(size));
      if (c.solver.kind == "exhaustive") {
        for (std::size_t q : qs)
          need(q <= kExhaustiveLimit, key + ": the exhaustive solver handles at most " +
                                          std::to_string(kExhaustiveLimit) + " variables");
      }
    }
    if (c.task == "compare") {
      need(t.algorithm != "adaboost", "train.algorithm: compare pairs a QBoost algorithm with adaboost");
      need(c.compare.seeds >= 1, "compare.seeds: must be >= 1");
    }
    if (c.task == "sweep-overlap") {
      const SweepConfig& s = c.sweep;
      need(!s.overlaps.empty(), "sweep.overlaps: must not be empty");
      for (double o : s.overlaps) need(o >= 0.0 && o <= 1.0, "sweep.overlaps: values must lie in [0, 1]");
      need(!s.algorithms.empty(), "sweep.algorithms: must not be empty");
      for (const auto& a : s.algorithms)
        need(one_of(a, kAlgorithms), "sweep.algorithms: '" + a + "' is not one of " + choices_text(kAlgorithms));
      need(!s.Q_values.empty(), "sweep.Q_values: must not be empty");
      for (std::size_t q : s.Q_values) need(q >= 1, "sweep.Q_values: values must be >= 1");
      need(s.seeds >= 1, "sweep.seeds: must be >= 1");
    }
  }
  if (c.task == "gap-analysis") {
    const GapConfig& g = c.gap;
    need(one_of(g.method, {"lanczos", "dense"}), "gap.method: must be lanczos or dense");
    need(g.grid_points >= 51, "gap.grid_points: the curvature metric needs at least 51 points");
    if (g.problem_path.empty()) {
      need(g.qubits >= 1 && g.qubits <= kMaxQubits, "gap.qubits: must lie in [1, " + std::to_string(kMaxQubits) + "]");
      need(g.method != "dense" || g.qubits <= kMaxDenseQubits,
           "gap.method: dense diagonalisation is limited to " + std::to_string(kMaxDenseQubits) + " qubits");
      need(g.samples >= 2, "gap.samples: must be >= 2");
    } else {
      need(std::filesystem::exists(g.problem_path), "gap.problem_path: file '" + g.problem_path + "' does not exist");
    }
  }
  if (c.task == "scaling") {
    const ScalingConfig& s = c.scaling;
    need(!s.qubits.empty(), "scaling.qubits: must not be empty");
    for (std::size_t n : s.qubits)
      need(n >= 1 && n <= kMaxQubits, "scaling.qubits: values must lie in [1, " + std::to_string(kMaxQubits) + "]");
    need(s.runs >= 1, "scaling.runs: must be >= 1");
    need(s.samples >= 2, "scaling.samples: must be >= 2");
    need(s.grid_points >= 51, "scaling.grid_points: the curvature metric needs at least 51 points");
  }
  if (!p.empty()) throw ConfigError(std::move(p));
}

ReplicaSeeds replica_seeds(std::uint64_t root, std::size_t replica) {
  return {derive_seed(root, "data", replica), derive_seed(root, "split", replica),
          derive_seed(root, "solver", replica)};
}

Dataset make_dataset(const DataConfig& d, std::uint64_t seed) {
  Dataset data = d.source == "csv"   ? load_csv(d.csv_path, CsvOptions{d.csv_header})
                 : d.source == "box" ? generate_box_cluster_2d(d.samples, seed)
                                     : generate_gaussian_mixture(d.dimension, d.overlap, d.samples, seed);
  return d.normalize ? l2_normalize(data) : data;
}

QuboSolver make_solver(const SolverConfig& s, std::uint64_t seed) {
  if (s.kind == "exhaustive") return make_exhaustive_solver();
  return [s, seed](const QuboProblem& q) {
    TabuConfig cfg = TabuConfig::defaults(q.size(), seed);
    if (s.tenure) cfg.tenure = s.tenure;
    if (s.max_iterations) cfg.max_iterations = s.max_iterations;
    if (s.restarts) cfg.restarts = s.restarts;
    if (s.stall_limit) cfg.stall_limit = s.stall_limit;
    return solve_tabu(q, cfg);
  };
}

RunResult train_algorithm(const ExperimentConfig& c, const std::string& algorithm, std::size_t Q,
                          const SplitDataset& split, std::uint64_t solver_seed) {
  const Dictionary dict =
      build_dictionary(split.train, SampleWeights::uniform(split.train.size()), orders_of(c.dictionary));
  const TrainConfig& t = c.train;
  if (algorithm == "adaboost") {
    AdaBoostOptions o;
    o.patience = t.adaboost_patience;
    o.max_rounds = t.adaboost_max_rounds;
    o.refit_thresholds = t.refit_thresholds;
    auto [clf, rep] = adaboost_train(dict, split, o);
    return {std::move(clf), std::move(rep)};
  }
  const QuboSolver solver = make_solver(c.solver, solver_seed);
  if (algorithm == "baseline") {
    BaselineOptions o;
    o.lambdas = t.lambdas;
    o.scale = t.scale;
    o.co_optimize_theta = t.co_optimize_theta;
    auto [clf, rep] = baseline_train(dict, split, o, solver);
    return {std::move(clf), std::move(rep)};
  }
  QBoostOptions o;
  o.Q = Q;
  o.lambdas = t.lambdas;
  o.mode = mode_of(t.mode);
  o.scale = t.scale;
  o.patience = t.patience;
  o.max_iterations = t.max_iterations;
  o.max_passes = t.max_passes;
  o.refit_thresholds = t.refit_thresholds;
  auto [clf, rep] = algorithm == "qboost-inner" ? inner_loop_train(dict, split, o, solver)
                                                : outer_loop_train(dict, split, o, solver);
  return {std::move(clf), std::move(rep)};
}

SweepResult sweep_overlap(const ExperimentConfig& c) {
  SweepResult res;
  for (double overlap : c.sweep.overlaps) {
    DataConfig data = c.data;
    data.overlap = overlap;
    for (std::size_t r = 0; r < c.sweep.seeds; ++r) {
      const ReplicaSeeds seeds = replica_seeds(c.seed, r);
      const SplitDataset split = split_even(make_dataset(data, seeds.data), seeds.split);
      for (const std::string& algorithm : c.sweep.algorithms) {
        if (algorithm == "adaboost") {
          const RunResult run = train_algorithm(c, algorithm, c.sweep.Q_values.front(), split, seeds.solver);
          for (std::size_t q : c.sweep.Q_values)
            res.runs.push_back({overlap, algorithm, q, r, run.report.test_error, run.report.weak_learner_count});
          continue;
        }
        for (std::size_t q : c.sweep.Q_values) {
          const RunResult run = train_algorithm(c, algorithm, q, split, seeds.solver);
          res.runs.push_back({overlap, algorithm, q, r, run.report.test_error, run.report.weak_learner_count});
        }
      }
    }
  }
  for (double overlap : c.sweep.overlaps) {
    for (const std::string& algorithm : c.sweep.algorithms) {
      for (std::size_t q : c.sweep.Q_values) {
        std::vector<double> err, size;
        for (const SweepRun& run : res.runs) {
          if (run.overlap == overlap && run.algorithm == algorithm && run.Q == q) {
            err.push_back(run.test_error);
            size.push_back(static_cast<double>(run.weak_learners));
          }
        }
        const Stats e = stats(err), s = stats(size);
        res.rows.push_back({overlap, algorithm, q, e.mean, e.std, s.mean, s.std});
      }
    }
  }
  return res;
}

void run_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::filesystem::path out(config.out);
  std::filesystem::create_directories(out);
  write_json(out / "config.json", config_to_json(config));
  if (config.task == "gen-data") run_gen_data(config, out);
  else if (config.task == "train") run_train(config, out);
  else if (config.task == "compare") run_compare(config, out);
  else if (config.task == "sweep-overlap") run_sweep(config, out);
  else if (config.task == "gap-analysis") run_gap(config, out);
  else run_scaling(config, out);
}

nlohmann::ordered_json error_json(const std::string& kind, const std::vector<std::string>& messages) {
  ojson j;
  j["error"] = {{"kind", kind}, {"messages", messages}};
  return j;
}

}  // namespace qboost
