#include "bmlab/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bmlab/errors.hpp"
#include "bmlab/quadrature.hpp"

namespace bmlab {

double hermite_eval(int q, double x) {
  if (q < 0) throw std::invalid_argument("hermite_eval: q must be >= 0");
  if (q == 0) return 1.0;
  double prev = 1.0;  // H_0
  double cur = x;     // H_1
  for (int k = 1; k < q; ++k) {
    const double next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double factorial(int q) {
  if (q < 0) throw std::invalid_argument("factorial: q must be >= 0");
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (int k = 1; k <= 170; ++k) t[k] = t[k - 1] * k;
    return t;
  }();
  if (q <= 170) return table[q];
  return std::numeric_limits<double>::infinity();
}

double factorial_times_sq(int q, double c) {
  if (c == 0.0) return 0.0;
  if (q <= 170) return factorial(q) * c * c;
  return std::exp(std::lgamma(q + 1.0) + 2.0 * std::log(std::abs(c)));
}

double HermiteExpansion::eval(double x) const {
  const int q_max = truncation();
  double acc = mean;
  if (q_max < 1) return acc;
  double prev = 1.0;
  double cur = x;
  acc += coeffs[1] * cur;
  for (int k = 1; k < q_max; ++k) {
    const double next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
    acc += coeffs[k + 1] * cur;
  }
  return acc;
}

double rank_tolerance(const HermiteExpansion& e) {
  double sum_abs = 0.0;
  for (std::size_t q = 1; q < e.coeffs.size(); ++q) sum_abs += std::abs(e.coeffs[q]);
  return 1e-10 * std::max(1.0, sum_abs);
}

int recompute_rank(const HermiteExpansion& e) {
  const double tol = rank_tolerance(e);
  for (std::size_t q = 1; q < e.coeffs.size(); ++q)
    if (std::abs(e.coeffs[q]) > tol) return static_cast<int>(q);
  return 0;
}

HermiteExpansion make_expansion(std::vector<double> levels) {
  if (levels.empty()) levels.push_back(0.0);
  HermiteExpansion e;
  e.mean = levels[0];
  levels[0] = 0.0;
  e.coeffs = std::move(levels);
  e.rank = recompute_rank(e);
  return e;
}

double chaos_l2_norm_sq(const HermiteExpansion& e) {
  double acc = 0.0;
  for (std::size_t q = 1; q < e.coeffs.size(); ++q)
    acc += factorial_times_sq(static_cast<int>(q), e.coeffs[q]);
  return acc;
}

HermiteExpansion expand(const std::function<double(double)>& f, int trunc,
                        int quad_order) {
  if (trunc < 1) throw ConfigError("expand: truncation must be >= 1");
  if (quad_order < trunc + 1)
    throw ConfigError("expand: quad_order must be >= truncation + 1");

  const GaussHermiteRule& rule = gauss_hermite(quad_order);

  std::vector<double> raw(static_cast<std::size_t>(trunc) + 1, 0.0);
  double l2 = 0.0;
  for (int i = 0; i < quad_order; ++i) {
    const double x = rule.nodes[i];
    const double w = rule.weights[i];
    const double fx = f(x);
    if (!std::isfinite(fx))
      throw NonFiniteQuadrature("expand: f non-finite at node x=" + std::to_string(x));
    l2 += w * fx * fx;

    // accumulate w * f(x) * H_q(x) across all q in one recurrence pass
    double prev = 1.0;
    double cur = x;
    raw[0] += w * fx;
    if (trunc >= 1) raw[1] += w * fx * cur;
    for (int q = 1; q < trunc; ++q) {
      const double next = x * cur - static_cast<double>(q) * prev;
      prev = cur;
      cur = next;
      raw[q + 1] += w * fx * cur;
    }
  }
  for (int q = 2; q <= trunc; ++q) raw[q] /= factorial(q);

  HermiteExpansion e = make_expansion(std::move(raw));
  if (e.rank == 0)
    throw RankNotFound("expand: no coefficient c_1..c_Q above the rank tolerance");
  e.discarded_l2 =
      std::max(0.0, l2 - e.mean * e.mean - chaos_l2_norm_sq(e));
  return e;
}

HermiteExpansion shift_operator(const HermiteExpansion& e) {
  if (e.rank < 1) throw ZeroRank("shift_operator: expansion has rank 0");
  if (std::abs(e.mean) > rank_tolerance(e))
    throw NonCenteredExpansion("shift_operator: mean part must be zero");

  const int d = e.rank;
  std::vector<double> levels(e.coeffs.size() - static_cast<std::size_t>(d), 0.0);
  for (std::size_t q = static_cast<std::size_t>(d); q < e.coeffs.size(); ++q)
    levels[q - static_cast<std::size_t>(d)] = e.coeffs[q];
  return make_expansion(std::move(levels));
}

ShiftedExpansion to_shifted(const HermiteExpansion& e) {
  ShiftedExpansion s;
  s.coeffs = e.coeffs;
  if (!s.coeffs.empty()) s.coeffs[0] = e.mean;
  s.tensor_power = 0;
  return s;
}

ShiftedExpansion shift_down(const ShiftedExpansion& s) {
  double sum_abs = 0.0;
  for (double c : s.coeffs) sum_abs += std::abs(c);
  const double tol = 1e-10 * std::max(1.0, sum_abs);
  if (!s.coeffs.empty() && std::abs(s.coeffs[0]) > tol)
    throw NonzeroConstant("shift_down: level-0 coefficient is nonzero");

  ShiftedExpansion out;
  if (s.coeffs.size() > 1)
    out.coeffs.assign(s.coeffs.begin() + 1, s.coeffs.end());
  else
    out.coeffs.assign(1, 0.0);
  out.tensor_power = s.tensor_power + 1;
  return out;
}

HermiteExpansion ou_semigroup(const HermiteExpansion& e, double t) {
  if (t < 0.0) throw NegativeTime("ou_semigroup: t must be >= 0");
  HermiteExpansion out = e;
  for (std::size_t q = 1; q < out.coeffs.size(); ++q)
    out.coeffs[q] *= std::exp(-t * static_cast<double>(q));
  out.rank = recompute_rank(out);
  return out;
}

HermiteExpansion neg_L_power(const HermiteExpansion& e, double r) {
  if (r < 0.0 && std::abs(e.mean) > rank_tolerance(e))
    throw NonzeroConstant("neg_L_power: negative power needs zero mean part");
  HermiteExpansion out = e;
  for (std::size_t q = 1; q < out.coeffs.size(); ++q)
    out.coeffs[q] *= std::pow(static_cast<double>(q), r);
  out.rank = recompute_rank(out);
  return out;
}

double derivative_norm_sq(const HermiteExpansion& e, int k) {
  if (k < 0) throw std::invalid_argument("derivative_norm_sq: k must be >= 0");
  if (e.rank < 1) throw ZeroRank("derivative_norm_sq: expansion has rank 0");

  const int d = e.rank;
  double acc = 0.0;
  for (int q = d; q <= e.truncation(); ++q) {
    const int j = q - d;
    if (j - k < 0) continue;
    double falling = 1.0;
    for (int i = 0; i < k; ++i) falling *= static_cast<double>(j - i);
    const double c = e.coeffs[static_cast<std::size_t>(q)];
    acc += c * c * falling * falling * factorial(j - k);
  }
  return acc;
}

}  // namespace bmlab
