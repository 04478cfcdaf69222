#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qboost/qubo.hpp"

namespace qboost {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr const char* kTermTags[] = {"", "lin", "quad", "cube", "quart"};

}  // namespace

void write_problem(std::ostream& out, const QuboProblem& problem) {
  out << "n " << problem.size() << '\n';
  out << "offset " << g17(problem.offset()) << '\n';
  for (std::size_t i = 0; i < problem.size(); ++i)
    if (problem.linear(i) != 0.0) out << "lin " << i << ' ' << g17(problem.linear(i)) << '\n';
  for (const auto& t : problem.quadratic_terms())
    out << "quad " << t.i << ' ' << t.j << ' ' << g17(t.value) << '\n';
}

void write_problem(std::ostream& out, const PseudoBooleanProblem& problem) {
  out << "n " << problem.size() << '\n';
  out << "offset " << g17(problem.offset()) << '\n';
  for (const auto& [idx, v] : problem.terms()) {
    out << kTermTags[idx.size()];
    for (auto i : idx) out << ' ' << i;
    out << ' ' << g17(v) << '\n';
  }
}

Problem read_problem(std::istream& in) {
  struct Record {
    PseudoBooleanProblem::Indices indices;
    double value;
  };
  std::optional<std::size_t> n;
  double offset = 0.0;
  std::vector<Record> records;
  std::size_t max_degree = 0;

  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("problem file line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    if (tag == "n") {
      std::size_t count;
      if (!(fields >> count)) fail("bad variable count");
      n = count;
      continue;
    }
    if (tag == "offset") {
      if (!(fields >> offset)) fail("bad offset");
      continue;
    }
    std::size_t degree = 0;
    for (std::size_t d = 1; d <= 4; ++d)
      if (tag == kTermTags[d]) degree = d;
    if (degree == 0) fail("unknown record '" + tag + "'");
    if (!n) fail("'" + tag + "' record before the 'n' record");
    Record r;
    for (std::size_t d = 0; d < degree; ++d) {
      std::uint32_t i;
      if (!(fields >> i)) fail("bad index");
      if (i >= *n) fail("index " + std::to_string(i) + " out of range");
      r.indices.push_back(i);
    }
    if (!(fields >> r.value)) fail("bad coefficient");
    if (std::string rest; fields >> rest) fail("trailing text '" + rest + "'");
    max_degree = std::max(max_degree, degree);
    records.push_back(std::move(r));
  }
  if (!n) throw std::invalid_argument("problem file: missing 'n' record");

  if (max_degree <= 2) {
    QuboProblem q(*n);
    q.add_offset(offset);
    for (const Record& r : records) {
      if (r.indices.size() == 1) {
        q.add_linear(r.indices[0], r.value);
      } else {
        q.add_quadratic(r.indices[0], r.indices[1], r.value);
      }
    }
    return q;
  }
  PseudoBooleanProblem p(*n);
  p.add_offset(offset);
  for (const Record& r : records) p.add_term(r.indices, r.value);
  return p;
}

void save_problem(const std::filesystem::path& path, const Problem& problem) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::visit([&](const auto& p) { write_problem(out, p); }, problem);
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_problem(in);
}

}  // namespace qboost
