#include "bmlab/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace bmlab {

namespace {

GaussHermiteRule build_rule(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");

  // Jacobi matrix of the monic (probabilists') Hermite polynomials:
  // diagonal 0, off-diagonal beta_k = sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite: eigen decomposition failed");

  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;  // mu_0 = 1 for the N(0,1) measure
  }

  // The spectrum of the Jacobi matrix is symmetric; enforce it exactly so
  // that quadrature of odd functions vanishes to machine precision.
  for (int i = 0, j = order - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;

  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(order));
  return *slot;
}

}  // namespace bmlab
