#ifndef BMLAB_QUADRATURE_HPP
#define BMLAB_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace bmlab {

/// Gauss-Hermite rule in probabilists' normalization: sum_i w_i f(x_i)
/// approximates E[f(N)] for N ~ N(0,1) and is exact for polynomials of
/// degree <= 2*order - 1. Weights sum to 1, nodes are symmetric about 0.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes/weights via the Golub-Welsch eigenvalue method on the Jacobi matrix
/// of the monic Hermite recurrence (off-diagonal sqrt(k)). Results are cached
/// per order; safe for concurrent use.
const GaussHermiteRule& gauss_hermite(int order);

}  // namespace bmlab

#endif  // BMLAB_QUADRATURE_HPP
