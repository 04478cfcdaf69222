#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qboost/boosting.hpp"

namespace qboost {

void write_model(std::ostream& out, const StrongClassifier& classifier) {
  out << "qboost-model 1\n";
  out << "kappa " << format_double(classifier.kappa()) << '\n';
  out << "theta " << format_double(classifier.theta()) << '\n';
  out << "stumps " << classifier.size() << '\n';
  for (const WeightedStump& t : classifier.terms()) {
    const StumpKey& k = t.stump.key;
    out << k.order << ' ' << k.i << ' ' << k.j << ' ' << (k.polarity == Polarity::positive ? '+' : '-') << ' '
        << format_double(t.stump.threshold) << ' ' << format_double(t.alpha) << '\n';
  }
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    fail(std::string("unexpected end of file, expected ") + what);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("model line " + std::to_string(line_no_) + ": " + what);
  }

  double keyed_value(const char* key) {
    auto ls = next(key);
    std::string k;
    double v;
    if (!(ls >> k >> v) || k != key) fail(std::string("expected '") + key + " <value>'");
    expect_end(ls);
    return v;
  }

  void expect_end(std::istringstream& ls) const {
    std::string rest;
    if (ls >> rest) fail("trailing text '" + rest + "'");
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

StrongClassifier read_model(std::istream& in) {
  LineReader reader(in);
  {
    auto ls = reader.next("header");
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "qboost-model") reader.fail("expected 'qboost-model 1'");
    if (version != 1) reader.fail("unsupported model version " + std::to_string(version));
  }
  const double kappa = reader.keyed_value("kappa");
  const double theta = reader.keyed_value("theta");
  std::size_t count = 0;
  {
    auto ls = reader.next("stumps");
    std::string k;
    if (!(ls >> k >> count) || k != "stumps") reader.fail("expected 'stumps <count>'");
    reader.expect_end(ls);
  }
  std::vector<WeightedStump> terms;
  terms.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    auto ls = reader.next("stump");
    WeightedStump ws;
    std::string pol;
    if (!(ls >> ws.stump.key.order >> ws.stump.key.i >> ws.stump.key.j >> pol >> ws.stump.threshold >> ws.alpha))
      reader.fail("expected '<order> <i> <j> <+|-> <threshold> <alpha>'");
    reader.expect_end(ls);
    if (ws.stump.key.order != 1 && ws.stump.key.order != 2) reader.fail("stump order must be 1 or 2");
    if (ws.stump.key.order == 1 && ws.stump.key.i != ws.stump.key.j) reader.fail("order-1 stump needs i == j");
    if (ws.stump.key.order == 2 && ws.stump.key.i >= ws.stump.key.j) reader.fail("order-2 stump needs i < j");
    if (pol == "+") ws.stump.key.polarity = Polarity::positive;
    else if (pol == "-") ws.stump.key.polarity = Polarity::negative;
    else reader.fail("polarity must be + or -");
    terms.push_back(ws);
  }
  return StrongClassifier(std::move(terms), kappa, theta);
}

void save_model(const std::filesystem::path& path, const StrongClassifier& classifier) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_model(out, classifier);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

StrongClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_model(in);
}

void write_report_csv(std::ostream& out, const TrainReport& report) {
  out << "pass,iteration,weak_learners,t_inner,train_error,validation_error,lambda,objective,epsilon,alpha,"
         "solver_evaluations\n";
  for (const IterationRecord& r : report.iterations) {
    out << r.pass << ',' << r.iteration << ',' << r.weak_learners << ',' << r.t_inner << ','
        << format_double(r.train_error) << ',' << format_double(r.validation_error) << ','
        << format_double(r.lambda) << ',' << format_double(r.objective) << ',' << format_double(r.epsilon)
        << ',' << format_double(r.alpha) << ',' << r.solver_evaluations << '\n';
  }
}

}  // namespace qboost
