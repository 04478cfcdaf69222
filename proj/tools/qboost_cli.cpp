#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qboost/experiment.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string solver;
  std::string mode;
  bool print_defaults = false;
};

void report_error(const std::string& kind, const std::vector<std::string>& messages, const std::string& out_dir) {
  const std::string text = qboost::error_json(kind, messages).dump(2) + "\n";
  std::cerr << text;
  if (out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream f(std::filesystem::path(out_dir) / "error.json", std::ios::binary);
  if (f) f << text;
}

qboost::ExperimentConfig load(const std::string& task, const Flags& flags) {
  nlohmann::json j = nlohmann::json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw qboost::ConfigError({"--config: cannot open '" + flags.config_path + "'"});
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw qboost::ConfigError({"--config: " + std::string(e.what())});
    }
  }
  qboost::ExperimentConfig c = qboost::config_from_json(j, task);
  if (flags.seed) c.seed = *flags.seed;
  if (!flags.out.empty()) c.out = flags.out;
  if (!flags.solver.empty()) c.solver.kind = flags.solver;
  if (!flags.mode.empty()) c.train.mode = flags.mode;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QBoost experiments: data generation, training, comparisons and spectral analysis"};
  app.require_subcommand(1);
  Flags flags;
  for (const std::string& task : qboost::kTasks) {
    CLI::App* sub = app.add_subcommand(task);
    sub->add_option("--config", flags.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "root seed");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--solver", flags.solver, "QUBO solver")->check(CLI::IsMember({"tabu", "exhaustive"}));
    sub->add_option("--mode", flags.mode, "dictionary mode")->check(CLI::IsMember({"augment", "replace-all"}));
    sub->add_flag("--print-defaults", flags.print_defaults, "print the default configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", {e.what()}, "");
    return 2;
  }

  const std::string task = app.get_subcommands().front()->get_name();
  if (flags.print_defaults) {
    std::cout << qboost::config_to_json(qboost::default_config(task)).dump(2) << "\n";
    return 0;
  }

  std::string out_dir = flags.out;
  try {
    const qboost::ExperimentConfig config = load(task, flags);
    out_dir = config.out;
    qboost::validate(config);
    qboost::run_experiment(config);
  } catch (const qboost::ConfigError& e) {
    report_error("config", e.problems(), out_dir);
    return 2;
  } catch (const std::exception& e) {
    report_error("runtime", {e.what()}, out_dir);
    return 1;
  }
  return 0;
}
