#include "qboost/qubo.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qboost {

QuboProblem::QuboProblem(std::size_t n) : linear_(n, 0.0), couplings_(n) {
  if (n > UINT32_MAX) throw std::invalid_argument("qubo: too many variables");
}

void QuboProblem::add_linear(std::size_t i, double value) {
  if (i >= size()) throw std::out_of_range("qubo: linear index out of range");
  linear_[i] += value;
}

namespace {
void add_coupling(std::vector<QuboProblem::Coupling>& row, std::uint32_t other, double value) {
  auto it = std::lower_bound(row.begin(), row.end(), other,
                             [](const QuboProblem::Coupling& c, std::uint32_t o) { return c.other < o; });
  if (it != row.end() && it->other == other) {
    it->value += value;
  } else {
    row.insert(it, QuboProblem::Coupling{other, value});
  }
}
}  // namespace

void QuboProblem::add_quadratic(std::size_t i, std::size_t j, double value) {
  if (i >= size() || j >= size()) throw std::out_of_range("qubo: quadratic index out of range");
  if (i == j) {
    linear_[i] += value;
    return;
  }
  add_coupling(couplings_[i], static_cast<std::uint32_t>(j), value);
  add_coupling(couplings_[j], static_cast<std::uint32_t>(i), value);
}

double QuboProblem::quadratic(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw std::out_of_range("qubo: quadratic index out of range");
  const auto& row = couplings_[i];
  auto it = std::lower_bound(row.begin(), row.end(), static_cast<std::uint32_t>(j),
                             [](const Coupling& c, std::uint32_t o) { return c.other < o; });
  return it != row.end() && it->other == j ? it->value : 0.0;
}

std::vector<QuboProblem::Term> QuboProblem::quadratic_terms() const {
  std::vector<Term> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (const Coupling& c : couplings_[i])
      if (c.other > i) out.push_back({i, c.other, c.value});
  return out;
}

double QuboProblem::energy(std::span<const std::uint8_t> x) const {
  double e = offset_;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!x[i]) continue;
    e += linear_[i];
    for (const Coupling& c : couplings_[i])
      if (c.other > i && x[c.other]) e += c.value;
  }
  return e;
}

double QuboProblem::flip_delta(std::span<const std::uint8_t> x, std::size_t bit) const {
  double field = linear_[bit];
  for (const Coupling& c : couplings_[bit])
    if (x[c.other]) field += c.value;
  return x[bit] ? -field : field;
}

double energy(const QuboProblem& problem, std::span<const std::uint8_t> assignment) {
  if (assignment.size() != problem.size()) {
    throw std::invalid_argument("energy: assignment has " + std::to_string(assignment.size()) +
                                " bits, problem has " + std::to_string(problem.size()));
  }
  return problem.energy(assignment);
}

std::size_t PseudoBooleanProblem::degree() const {
  std::size_t d = 0;
  for (const auto& [idx, v] : terms_) d = std::max(d, idx.size());
  return d;
}

void PseudoBooleanProblem::add_term(Indices indices, double value) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (indices.empty()) {
    offset_ += value;
    return;
  }
  if (indices.back() >= n_) throw std::out_of_range("pseudo-Boolean: index out of range");
  if (indices.size() > kMaxDegree) throw std::invalid_argument("pseudo-Boolean: degree above 4");
  terms_[std::move(indices)] += value;
}

double PseudoBooleanProblem::energy(std::span<const std::uint8_t> x) const {
  double e = offset_;
  for (const auto& [idx, v] : terms_) {
    bool on = true;
    for (std::uint32_t i : idx) on = on && x[i];
    if (on) e += v;
  }
  return e;
}

double energy(const PseudoBooleanProblem& problem, std::span<const std::uint8_t> assignment) {
  if (assignment.size() != problem.size()) {
    throw std::invalid_argument("energy: assignment has " + std::to_string(assignment.size()) +
                                " bits, problem has " + std::to_string(problem.size()));
  }
  return problem.energy(assignment);
}

std::size_t VariableLayout::add(std::string name, std::size_t count) {
  for (const Block& b : blocks_)
    if (b.name == name) throw std::invalid_argument("layout: duplicate block " + name);
  const std::size_t start = size();
  blocks_.push_back({std::move(name), start, count});
  return start;
}

const VariableLayout::Block& VariableLayout::block(const std::string& name) const {
  for (const Block& b : blocks_)
    if (b.name == name) return b;
  throw std::out_of_range("layout: no block " + name);
}

std::size_t VariableLayout::index(const std::string& name, std::size_t offset) const {
  const Block& b = block(name);
  if (offset >= b.count) throw std::out_of_range("layout: offset outside block " + name);
  return b.start + offset;
}

PredictionMatrix::PredictionMatrix(std::size_t samples, std::size_t classifiers,
                                   std::vector<std::int8_t> values)
    : samples_(samples), classifiers_(classifiers), values_(std::move(values)) {
  if (values_.size() != samples_ * classifiers_)
    throw std::invalid_argument("prediction matrix: size mismatch");
  for (std::int8_t v : values_)
    if (v != 1 && v != -1) throw std::invalid_argument("prediction matrix: entries must be +-1");
}

PredictionMatrix predict_matrix(std::span<const Stump> stumps, const Dataset& data) {
  std::vector<std::int8_t> values(data.size() * stumps.size());
  for (std::size_t s = 0; s < data.size(); ++s)
    for (std::size_t i = 0; i < stumps.size(); ++i)
      values[s * stumps.size() + i] = static_cast<std::int8_t>(stumps[i].evaluate(data[s].features));
  return PredictionMatrix(data.size(), stumps.size(), std::move(values));
}

std::size_t ceil_log2(std::size_t n) {
  if (n == 0) throw std::invalid_argument("ceil_log2: n must be >= 1");
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

namespace {

void check_labels(const PredictionMatrix& h, std::span<const int> labels) {
  if (labels.size() != h.samples())
    throw std::invalid_argument("qubo builder: label count differs from sample count");
  for (int y : labels)
    if (y != 1 && y != -1) throw std::invalid_argument("qubo builder: labels must be +-1");
}

// scale * (constant + sum_v a_v x_v)^2, expanded with x^2 = x.
void add_squared_affine(QuboProblem& q, std::span<const std::pair<std::size_t, double>> terms,
                        double constant, double scale = 1.0) {
  q.add_offset(scale * constant * constant);
  for (std::size_t u = 0; u < terms.size(); ++u) {
    const auto [iu, au] = terms[u];
    q.add_linear(iu, scale * (au * au + 2.0 * constant * au));
    for (std::size_t v = u + 1; v < terms.size(); ++v)
      q.add_quadratic(iu, terms[v].first, scale * 2.0 * au * terms[v].second);
  }
}

}  // namespace

QuboProblem build_training_qubo(const PredictionMatrix& h, std::span<const int> labels,
                                double kappa, double lambda,
                                std::optional<std::span<const double>> frozen_scores) {
  check_labels(h, labels);
  if (!(kappa > 0.0)) throw std::invalid_argument("training qubo: kappa must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("training qubo: lambda must be non-negative");
  const std::size_t S = h.samples();
  const std::size_t N = h.classifiers();
  if (frozen_scores && frozen_scores->size() != S)
    throw std::invalid_argument("training qubo: frozen score count differs from sample count");

  // Residual target per sample: kappa F_s - y_s.
  std::vector<double> base(S);
  for (std::size_t s = 0; s < S; ++s)
    base[s] = (frozen_scores ? kappa * (*frozen_scores)[s] : 0.0) - labels[s];

  QuboProblem q(N);
  double offset = 0.0;
  for (double b : base) offset += b * b;
  q.add_offset(offset);

  std::vector<double> corr(N * N, 0.0);  // Corr(h_i, h_j), upper triangle
  std::vector<double> corr_base(N, 0.0);  // sum_s H_si (kappa F_s - y_s)
  for (std::size_t s = 0; s < S; ++s) {
    const auto row = h.row(s);
    for (std::size_t i = 0; i < N; ++i) {
      corr_base[i] += row[i] * base[s];
      for (std::size_t j = i + 1; j < N; ++j) corr[i * N + j] += row[i] * row[j];
    }
  }
  const double corr_diag = static_cast<double>(S);  // h_i(x)^2 = 1
  for (std::size_t i = 0; i < N; ++i) {
    q.add_linear(i, kappa * kappa * corr_diag + 2.0 * kappa * corr_base[i] + lambda);
    for (std::size_t j = i + 1; j < N; ++j) {
      const double c = corr[i * N + j];
      if (c != 0.0) q.add_quadratic(i, j, 2.0 * kappa * kappa * c);
    }
  }
  return q;
}

std::pair<QuboProblem, VariableLayout> build_threshold_qubo(const PredictionMatrix& h,
                                                            std::span<const int> labels,
                                                            double kappa, double lambda) {
  check_labels(h, labels);
  if (!(kappa > 0.0)) throw std::invalid_argument("threshold qubo: kappa must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("threshold qubo: lambda must be non-negative");
  const std::size_t N = h.classifiers();
  const std::size_t K = ceil_log2(N);

  VariableLayout layout;
  const std::size_t w0 = layout.add("w", N);
  const std::size_t t0 = layout.add("theta", K + 1);
  QuboProblem q(layout.size());

  const double shift = static_cast<double>((std::size_t{1} << K) - 1);
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t s = 0; s < h.samples(); ++s) {
    terms.clear();
    for (std::size_t i = 0; i < N; ++i) terms.emplace_back(w0 + i, kappa * h(s, i));
    for (std::size_t k = 0; k <= K; ++k)
      terms.emplace_back(t0 + k, -kappa * static_cast<double>(std::size_t{1} << k));
    add_squared_affine(q, terms, kappa * shift - labels[s]);
  }
  for (std::size_t i = 0; i < N; ++i) q.add_linear(w0 + i, lambda);
  return {std::move(q), std::move(layout)};
}

std::pair<QuboProblem, VariableLayout> build_zero_one_qubo_v1(const PredictionMatrix& h,
                                                              std::span<const int> labels,
                                                              double lambda) {
  check_labels(h, labels);
  if (!(lambda >= 0.0)) throw std::invalid_argument("0-1 qubo: lambda must be non-negative");
  const std::size_t S = h.samples();
  const std::size_t N = h.classifiers();
  const std::size_t K = ceil_log2(N);
  const double n = static_cast<double>(N);
  const double a = 1.0 + n * n;
  const double n3 = n * n * n;
  const double n4 = n3 * n;

  VariableLayout layout;
  const std::size_t w0 = layout.add("w", N);
  const std::size_t b0 = layout.add("ybar", S * K);
  const std::size_t e0 = layout.add("e", S);
  QuboProblem q(layout.size());
  auto bit = [&](std::size_t s, std::size_t k) { return b0 + s * K + k; };
  auto pow2 = [](std::size_t k) { return static_cast<double>(std::size_t{1} << k); };

  // (1 + N^2) sum_ij w_i w_j Corr(h_i, h_j)
  for (std::size_t i = 0; i < N; ++i) {
    q.add_linear(w0 + i, a * static_cast<double>(S));
    for (std::size_t j = i + 1; j < N; ++j) {
      double corr = 0.0;
      for (std::size_t s = 0; s < S; ++s) corr += h(s, i) * h(s, j);
      if (corr != 0.0) q.add_quadratic(w0 + i, w0 + j, 2.0 * a * corr);
    }
  }
  for (std::size_t s = 0; s < S; ++s) {
    const double y = labels[s];
    // (1 + N^2) ybar_s^2 with ybar_s = 1 + sum_k b_{k,s} 2^k
    q.add_offset(a);
    for (std::size_t k = 0; k < K; ++k) {
      q.add_linear(bit(s, k), a * (2.0 * pow2(k) + pow2(2 * k)));
      for (std::size_t k2 = k + 1; k2 < K; ++k2)
        q.add_quadratic(bit(s, k), bit(s, k2), a * 2.0 * pow2(k + k2));
    }
    // N^4 e_s - 2 N^3 e_s ybar_s
    q.add_linear(e0 + s, n4 - 2.0 * n3);
    for (std::size_t k = 0; k < K; ++k) q.add_quadratic(e0 + s, bit(s, k), -2.0 * n3 * pow2(k));
    for (std::size_t i = 0; i < N; ++i) {
      const double yh = y * h(s, i);
      // -2 (1 + N^2) w_i y_s h_i(x_s) ybar_s
      q.add_linear(w0 + i, -2.0 * a * yh);
      for (std::size_t k = 0; k < K; ++k) q.add_quadratic(w0 + i, bit(s, k), -2.0 * a * yh * pow2(k));
      // 2 N^3 w_i e_s y_s h_i(x_s)
      q.add_quadratic(w0 + i, e0 + s, 2.0 * n3 * yh);
    }
  }
  for (std::size_t i = 0; i < N; ++i) q.add_linear(w0 + i, lambda);
  return {std::move(q), std::move(layout)};
}

namespace {

// Sparse multilinear polynomial used to expand products of affine forms.
using Monomial = PseudoBooleanProblem::Indices;
using Polynomial = std::map<Monomial, double>;

Monomial merge(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Polynomial multiply(const Polynomial& p, const Polynomial& q) {
  Polynomial out;
  for (const auto& [ma, ca] : p)
    for (const auto& [mb, cb] : q) out[merge(ma, mb)] += ca * cb;
  return out;
}

}  // namespace

std::pair<PseudoBooleanProblem, VariableLayout> build_zero_one_objective_v2(
    const PredictionMatrix& h, std::span<const int> labels, double lambda) {
  check_labels(h, labels);
  if (!(lambda >= 0.0)) throw std::invalid_argument("0-1 objective: lambda must be non-negative");
  const std::size_t S = h.samples();
  const std::size_t N = h.classifiers();
  const std::size_t K = ceil_log2(N);

  VariableLayout layout;
  const std::size_t w0 = layout.add("w", N);
  const std::size_t b0 = layout.add("ybar", S * K);
  const std::size_t p0 = layout.add("e_plus", S);
  const std::size_t m0 = layout.add("e_minus", S);
  PseudoBooleanProblem problem(layout.size());
  auto var = [](std::size_t i) { return Monomial{static_cast<std::uint32_t>(i)}; };

  for (std::size_t s = 0; s < S; ++s) {
    // ybar_s = 1 + sum_k b_{k,s} 2^k
    Polynomial ybar{{Monomial{}, 1.0}};
    for (std::size_t k = 0; k < K; ++k)
      ybar[var(b0 + s * K + k)] += static_cast<double>(std::size_t{1} << k);
    // (e+ - e-) y_s
    const Polynomial indicator{{var(p0 + s), double(labels[s])}, {var(m0 + s), -double(labels[s])}};
    // residual = f_s - (e+ - e-) y_s ybar_s
    Polynomial residual = multiply(indicator, ybar);
    for (auto& [m, c] : residual) c = -c;
    for (std::size_t i = 0; i < N; ++i) residual[var(w0 + i)] += h(s, i);

    for (const auto& [m, c] : multiply(residual, residual)) problem.add_term(m, c);
    problem.add_term(var(m0 + s), 1.0);
  }
  for (std::size_t i = 0; i < N; ++i) problem.add_term(var(w0 + i), lambda);
  return {std::move(problem), std::move(layout)};
}

}  // namespace qboost
