#ifndef BMLAB_PARTIAL_SUM_HPP
#define BMLAB_PARTIAL_SUM_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/simulate.hpp"

namespace bmlab {

enum class PathKind { cadlag_Y, interpolated_Z };

/// A normalized partial-sum process sampled on a grid in [0,1].
/// cadlag_Y jumps at the times k/n; interpolated_Z is piecewise linear and
/// agrees with Y at integer multiples of 1/n.
struct PartialSumPath {
  std::vector<double> grid;
  std::vector<double> values;
  Normalization normalization = Normalization::sqrt_n;
  std::size_t n = 0;
  PathKind kind = PathKind::cadlag_Y;
};

/// floor(n*t) with a one-sided guard against k/n -> k*1-ulp roundoff.
std::size_t floor_index(double t, std::size_t n);

/// Y(t) = (sum of the first floor(n t) values phi(X_i)) / a_n with a_n =
/// sqrt(n) or sqrt(n log n) (natural log; requires n >= 2). phi is evaluated
/// through the truncated expansion so that simulation and the theoretical
/// variance refer to the same function.
PartialSumPath build_Y(const GaussianPath& path, const HermiteExpansion& e,
                       std::span<const double> grid, Normalization norm);

/// Z(t) = Y(t) + (n t - floor(n t)) phi(X_{floor(n t)}) / a_n.
PartialSumPath build_Z(const GaussianPath& path, const HermiteExpansion& e,
                       std::span<const double> grid, Normalization norm);

/// Value at a grid point (within 1e-12); throws GridOutOfRange otherwise.
double path_value(const PartialSumPath& p, double t);

/// p(t) - p(s) per pair; s and t must be grid points of p.
std::vector<double> increments(
    const PartialSumPath& p,
    std::span<const std::pair<double, double>> pairs);

}  // namespace bmlab

#endif  // BMLAB_PARTIAL_SUM_HPP
