#include "qboost/lanczos.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qboost {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  if (n > 0.0)
    for (double& x : v) x /= n;
  return n;
}

// Two passes of classical Gram-Schmidt.
void orthogonalize(std::vector<double>& w, std::span<const std::vector<double>> basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) axpy(-dot(b, w), b, w);
}

}  // namespace

LanczosResult lowest_eigenpair(const LinearOperator& op, std::size_t dimension, std::vector<double> start,
                               std::span<const std::vector<double>> deflate, const LanczosOptions& options) {
  if (dimension == 0) throw std::invalid_argument("lanczos: empty operator");
  if (start.size() != dimension) throw std::invalid_argument("lanczos: start vector has the wrong length");
  if (deflate.size() >= dimension) throw std::invalid_argument("lanczos: deflation leaves no space");
  for (const auto& d : deflate)
    if (d.size() != dimension) throw std::invalid_argument("lanczos: deflation vector has the wrong length");

  orthogonalize(start, deflate);
  if (normalize(start) < 1e-12) {
    // The start lies in the deflated span; fall back to a fixed generic vector.
    for (std::size_t i = 0; i < dimension; ++i) start[i] = 1.0 + 1e-3 * static_cast<double>((i * 7919) % 101);
    orthogonalize(start, deflate);
    if (normalize(start) < 1e-12) throw std::runtime_error("lanczos: cannot build a start vector");
  }

  const std::size_t krylov_limit = std::min(options.max_krylov, dimension - deflate.size());
  LanczosResult result;
  std::vector<double> w(dimension);

  for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
    std::vector<std::vector<double>> basis{start};
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXd ritz;
    double theta = 0.0;
    bool done = false;

    for (std::size_t j = 0; j < krylov_limit; ++j) {
      op(basis[j], w);
      ++result.matvecs;
      const double a = dot(basis[j], w);
      alpha.push_back(a);
      axpy(-a, basis[j], w);
      if (j > 0) axpy(-beta[j - 1], basis[j - 1], w);
      orthogonalize(w, basis);
      orthogonalize(w, deflate);
      const double b = std::sqrt(dot(w, w));

      const auto m = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      theta = tri.eigenvalues()(0);
      ritz = tri.eigenvectors().col(0);
      const double residual = b * std::abs(ritz(m - 1));
      if (residual <= options.tolerance * std::max(1.0, std::abs(theta)) || j + 1 == krylov_limit) {
        done = residual <= options.tolerance * std::max(1.0, std::abs(theta)) ||
               alpha.size() == dimension - deflate.size();
        break;
      }
      beta.push_back(b);
      std::vector<double> next(w);
      for (double& x : next) x /= b;
      basis.push_back(std::move(next));
    }

    std::vector<double> x(dimension, 0.0);
    for (std::size_t k = 0; k < static_cast<std::size_t>(ritz.size()); ++k) axpy(ritz(static_cast<Eigen::Index>(k)), basis[k], x);
    orthogonalize(x, deflate);
    normalize(x);
    result.value = theta;
    result.vector = std::move(x);
    if (done) {
      result.converged = true;
      return result;
    }
    start = result.vector;
  }
  return result;
}

}  // namespace qboost
