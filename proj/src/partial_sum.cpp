#include "bmlab/partial_sum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmlab/errors.hpp"

namespace bmlab {

namespace {

void check_expansion(const HermiteExpansion& e) {
  if (e.rank < 1) throw ZeroRank("partial sum: expansion has rank 0");
  if (std::abs(e.mean) > rank_tolerance(e))
    throw NonCenteredExpansion(
        "partial sum: expansion has a nonzero mean part (center it first)");
}

void check_grid(std::span<const double> grid) {
  double prev = -1.0;
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0))
      throw GridOutOfRange("partial sum: grid point " + std::to_string(t) +
                           " outside [0,1]");
    if (t < prev)
      throw GridOutOfRange("partial sum: grid must be nondecreasing");
    prev = t;
  }
}

double norm_factor(Normalization norm, std::size_t n) {
  if (norm == Normalization::sqrt_n_log_n) {
    if (n < 2)
      throw ConfigError("partial sum: sqrt(n log n) normalization needs n >= 2");
    return std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
  }
  return std::sqrt(static_cast<double>(n));
}

// prefix[k] = sum_{i<k} phi(X_i); the recurrence runs only up to the last
// nonzero coefficient, which matters for sparse expansions at large n.
std::vector<double> phi_prefix_sums(const GaussianPath& path,
                                    const HermiteExpansion& e) {
  int q_eff = 0;
  for (int q = 1; q <= e.truncation(); ++q)
    if (e.coeffs[static_cast<std::size_t>(q)] != 0.0) q_eff = q;

  std::vector<double> prefix(path.samples.size() + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    const double x = path.samples[i];
    double value = e.mean;
    if (q_eff >= 1) {
      double prev = 1.0;
      double cur = x;
      value += e.coeffs[1] * cur;
      for (int k = 1; k < q_eff; ++k) {
        const double next = x * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
        value += e.coeffs[static_cast<std::size_t>(k) + 1] * cur;
      }
    }
    acc += value;
    prefix[i + 1] = acc;
  }
  return prefix;
}

}  // namespace

std::size_t floor_index(double t, std::size_t n) {
  const double x = t * static_cast<double>(n);
  const double guarded = std::floor(x + 1e-9);
  return static_cast<std::size_t>(std::max(0.0, guarded));
}

PartialSumPath build_Y(const GaussianPath& path, const HermiteExpansion& e,
                       std::span<const double> grid, Normalization norm) {
  check_expansion(e);
  check_grid(grid);
  const std::size_t n = path.samples.size();
  const double a_n = norm_factor(norm, n);
  const std::vector<double> prefix = phi_prefix_sums(path, e);

  PartialSumPath out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  out.normalization = norm;
  out.n = n;
  out.kind = PathKind::cadlag_Y;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t k = std::min(floor_index(grid[i], n), n);
    out.values[i] = prefix[k] / a_n;
  }
  return out;
}

PartialSumPath build_Z(const GaussianPath& path, const HermiteExpansion& e,
                       std::span<const double> grid, Normalization norm) {
  check_expansion(e);
  check_grid(grid);
  const std::size_t n = path.samples.size();
  const double a_n = norm_factor(norm, n);
  const std::vector<double> prefix = phi_prefix_sums(path, e);

  PartialSumPath out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  out.normalization = norm;
  out.n = n;
  out.kind = PathKind::interpolated_Z;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t k = std::min(floor_index(grid[i], n), n);
    const double frac = grid[i] * static_cast<double>(n) - static_cast<double>(k);
    double value = prefix[k];
    if (frac > 1e-9) {
      if (k >= path.samples.size())
        throw PathTooShort("build_Z: fractional term needs sample " +
                           std::to_string(k));
      value += frac * e.eval(path.samples[k]);
    }
    out.values[i] = value / a_n;
  }
  return out;
}

namespace {

std::size_t locate(const PartialSumPath& p, double t) {
  const auto it = std::lower_bound(p.grid.begin(), p.grid.end(), t - 1e-12);
  if (it == p.grid.end() || std::abs(*it - t) > 1e-12)
    throw GridOutOfRange("increments: time " + std::to_string(t) +
                         " is not a grid point of the path");
  return static_cast<std::size_t>(it - p.grid.begin());
}

}  // namespace

double path_value(const PartialSumPath& p, double t) {
  return p.values[locate(p, t)];
}

std::vector<double> increments(
    const PartialSumPath& p,
    std::span<const std::pair<double, double>> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [s, t] : pairs) {
    if (s > t) throw GridOutOfRange("increments: pair with s > t");
    out.push_back(p.values[locate(p, t)] - p.values[locate(p, s)]);
  }
  return out;
}

}  // namespace bmlab
