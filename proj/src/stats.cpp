#include "bmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bmlab/errors.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/simulate.hpp"

namespace bmlab {

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 64) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double pairwise_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("pairwise_mean: empty input");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

namespace {

// mean and (unbiased) variance with fixed association
std::pair<double, double> mean_and_var(std::span<const double> values) {
  const double mean = pairwise_mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double denom = values.size() > 1 ? static_cast<double>(values.size() - 1)
                                         : 1.0;
  return {mean, pairwise_sum(sq) / denom};
}

}  // namespace

SigmaSquared sigma_squared(const HermiteExpansion& e, const CovarianceModel& m,
                           int Q, std::int64_t lag_cutoff) {
  if (e.rank < 1) throw ZeroRank("sigma_squared: expansion has rank 0");
  const int d = e.rank;

  PowerSum abs_d = power_sum_abs(m, d, lag_cutoff);
  if (!abs_d.convergent())
    throw ConditionH1Violated(
        "sigma_squared: sum |rho|^d has no finite tail bound for " +
        m.describe() + " at rank d=" + std::to_string(d));

  const int q_top = Q <= 0 ? e.truncation() : std::min(Q, e.truncation());

  SigmaSquared out;
  out.terms_used = q_top;
  out.lag_cutoff = lag_cutoff;

  double tail = 0.0;
  for (int q = d; q <= q_top; ++q) {
    const double c = e.coeffs[static_cast<std::size_t>(q)];
    if (c == 0.0) continue;
    const double weight = factorial_times_sq(q, c);
    const PowerSum s = power_sum(m, q, lag_cutoff);
    out.value += weight * s.value;
    tail += weight * s.tail_bound;
  }

  // chaos mass beyond q_top: every neglected lag sum is dominated by the
  // absolute rank-d sum since |rho(k)| <= 1
  double discarded = e.discarded_l2;
  for (int q = q_top + 1; q <= e.truncation(); ++q)
    discarded += factorial_times_sq(q, e.coeffs[static_cast<std::size_t>(q)]);
  tail += discarded * (abs_d.value + abs_d.tail_bound);

  out.tail_bound = tail;
  if (out.value < -out.tail_bound)
    throw Error("sigma_squared: negative value beyond the certified tail (" +
                std::to_string(out.value) + ")");
  return out;
}

double critical_sigma_squared(int d) {
  if (d < 2)
    throw CriticalRankOne(
        "critical_sigma_squared: defined for rank d >= 2 only");
  const double r =
      (2.0 * d - 1.0) * (d - 1.0) / (2.0 * static_cast<double>(d) * d);
  double r_pow = 1.0;
  for (int i = 0; i < d; ++i) r_pow *= r;
  return 2.0 * factorial(d) * r_pow;
}

BenHarizSum ben_hariz_sum(const HermiteExpansion& e, const CovarianceModel& m,
                          double R, int Q, std::int64_t lag_cutoff) {
  if (!(R > 1.0)) throw ConfigError("ben_hariz_sum: R must exceed 1");
  if (e.rank < 1) throw ZeroRank("ben_hariz_sum: expansion has rank 0");
  const int d = e.rank;
  const int q_top = Q <= 0 ? e.truncation() : std::min(Q, e.truncation());

  // |rho| <= 1 makes the absolute power sums nonincreasing in q, so
  // summability at the rank settles it for every later term as well
  if (!power_sum_abs(m, d, lag_cutoff).convergent())
    throw ConditionH1Violated(
        "ben_hariz_sum: sum |rho|^d has no finite tail bound for " +
        m.describe() + " at rank d=" + std::to_string(d));

  BenHarizSum out;
  out.first_q = d;
  double r_pow = std::pow(R, d);
  for (int q = d; q <= q_top; ++q, r_pow *= R) {
    const double c = e.coeffs[static_cast<std::size_t>(q)];
    double term = 0.0;
    if (c != 0.0) {
      const PowerSum s = power_sum_abs(m, q, lag_cutoff);
      term = std::sqrt(factorial(q)) * std::abs(c) * std::sqrt(s.value) * r_pow;
    }
    out.per_term.push_back(term);
  }
  out.partial = pairwise_sum(out.per_term);
  return out;
}

double kolmogorov_tail(double x) {
  if (x < 0.04) return 1.0;  // below this the 100-term series is saturated
  double acc = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    acc += (k % 2 == 1) ? term : -term;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

KsResult ks_normality(std::span<const double> samples, double sigma) {
  if (samples.size() < 20)
    throw InsufficientReplications("ks_normality: need at least 20 samples");
  if (!(sigma > 0.0)) throw ConfigError("ks_normality: sigma must be > 0");

  std::vector<double> z(samples.begin(), samples.end());
  for (double& v : z) v /= sigma;
  std::sort(z.begin(), z.end());
  if (z.front() == z.back())
    throw DegenerateSample("ks_normality: all samples identical");

  const auto m = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = normal_cdf(z[i]);
    d = std::max(d, cdf - static_cast<double>(i) / m);
    d = std::max(d, static_cast<double>(i + 1) / m - cdf);
  }

  KsResult out;
  out.statistic = d;
  out.p_value = kolmogorov_tail(std::sqrt(m) * d);
  return out;
}

FddCheck fdd_covariance_check(std::span<const PartialSumPath> batch,
                              std::span<const double> times, double sigma2) {
  if (batch.size() < 200)
    throw InsufficientReplications(
        "fdd_covariance_check: need at least 200 replications");
  if (times.empty()) throw ConfigError("fdd_covariance_check: no times");

  const std::size_t reps = batch.size();
  const std::size_t k = times.size();

  // values[j][rep]
  std::vector<std::vector<double>> values(k, std::vector<double>(reps));
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t j = 0; j < k; ++j)
      values[j][r] = path_value(batch[r], times[j]);

  std::vector<double> means(k);
  for (std::size_t j = 0; j < k; ++j) means[j] = pairwise_mean(values[j]);

  FddCheck out;
  std::vector<double> prod(reps);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      for (std::size_t r = 0; r < reps; ++r)
        prod[r] = (values[i][r] - means[i]) * (values[j][r] - means[j]);
      const auto [pm, pv] = mean_and_var(prod);
      CovEntry e;
      e.t1 = times[i];
      e.t2 = times[j];
      e.empirical = pm * static_cast<double>(reps) / static_cast<double>(reps - 1);
      e.target = sigma2 * std::min(times[i], times[j]);
      e.se = std::sqrt(pv / static_cast<double>(reps));
      e.dev_se = e.se > 0.0 ? std::abs(e.empirical - e.target) / e.se
                            : std::abs(e.empirical - e.target) > 0.0
                                  ? std::numeric_limits<double>::infinity()
                                  : 0.0;
      out.max_abs_dev = std::max(out.max_abs_dev, std::abs(e.empirical - e.target));
      out.max_se_multiple = std::max(out.max_se_multiple, e.dev_se);
      out.entries.push_back(e);
    }
  }
  return out;
}

TightnessResult tightness_diagnostic(
    std::span<const PartialSumPath> batch, double p,
    std::span<const std::pair<double, double>> pair_grid) {
  if (!(p > 2.0)) throw ConfigError("tightness_diagnostic: p must exceed 2");
  if (batch.size() < 500)
    throw InsufficientReplications(
        "tightness_diagnostic: need at least 500 replications for p-th moments");

  const std::size_t reps = batch.size();
  const std::size_t n = batch.front().n;
  for (const auto& path : batch)
    if (path.n != n)
      throw ConfigError("tightness_diagnostic: batch mixes different n");

  TightnessResult out;
  std::vector<double> powed(reps);
  for (const auto& [s, t] : pair_grid) {
    const std::size_t lo = floor_index(s, n);
    const std::size_t hi = floor_index(t, n);
    if (hi <= lo) continue;  // empty increment, excluded by precondition
    const double span =
        static_cast<double>(hi - lo) / static_cast<double>(n);

    for (std::size_t r = 0; r < reps; ++r) {
      const double diff = path_value(batch[r], t) - path_value(batch[r], s);
      powed[r] = std::pow(std::abs(diff), p);
    }
    const auto [a, va] = mean_and_var(powed);
    TightnessRow row;
    row.s = s;
    row.t = t;
    row.span = span;
    row.lp_norm = std::pow(a, 1.0 / p);
    row.ratio = row.lp_norm / std::sqrt(span);
    // delta method: d(a^{1/p})/da = a^{1/p-1}/p
    row.se = a > 0.0 ? std::sqrt(va / static_cast<double>(reps)) *
                           std::pow(a, 1.0 / p - 1.0) / p
                     : 0.0;
    out.max_ratio = std::max(out.max_ratio, row.ratio);
    out.table.push_back(row);
  }
  if (out.table.empty())
    throw ConfigError("tightness_diagnostic: no pair with a nonempty increment");
  return out;
}

HyperResult hypercontractivity_check(int q, double p, const CovarianceModel& m,
                                     std::size_t n, double s, double t,
                                     std::size_t replications,
                                     std::uint64_t master_seed, int threads) {
  if (q < 1) throw ConfigError("hypercontractivity_check: q must be >= 1");
  if (!(p > 2.0)) throw ConfigError("hypercontractivity_check: p must exceed 2");
  if (replications < 500)
    throw InsufficientReplications(
        "hypercontractivity_check: need at least 500 replications");
  if (!(0.0 <= s && s <= t && t <= 1.0))
    throw GridOutOfRange("hypercontractivity_check: need 0 <= s <= t <= 1");

  const std::size_t lo = floor_index(s, n);
  const std::size_t hi = floor_index(t, n);
  if (hi <= lo)
    throw ConfigError("hypercontractivity_check: empty increment window");

  PathSampler sampler(m, n, SimulateOptions{});
  std::vector<double> sums(replications);
  parallel_for_index(replications, threads, [&](std::size_t r) {
    const GaussianPath path = sampler.sample(split_stream(master_seed, r));
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      acc += hermite_eval(q, path.samples[i]);
    sums[r] = acc / std::sqrt(static_cast<double>(n));
  });

  std::vector<double> abs_p(replications), sq(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    abs_p[r] = std::pow(std::abs(sums[r]), p);
    sq[r] = sums[r] * sums[r];
  }
  const auto [ap, vap] = mean_and_var(abs_p);
  const auto [a2, va2] = mean_and_var(sq);

  HyperResult out;
  out.lhs = std::pow(ap, 1.0 / p);
  out.rhs = std::pow(p - 1.0, 0.5 * q) * std::sqrt(a2);
  const double reps = static_cast<double>(replications);
  out.lhs_rel_se = ap > 0.0 ? std::sqrt(vap / reps) / (p * ap) : 0.0;
  out.rhs_rel_se = a2 > 0.0 ? std::sqrt(va2 / reps) / (2.0 * a2) : 0.0;
  out.slack =
      4.0 * std::sqrt(out.lhs_rel_se * out.lhs_rel_se +
                      out.rhs_rel_se * out.rhs_rel_se);
  out.ok = out.lhs <= out.rhs * (1.0 + out.slack);
  return out;
}

}  // namespace bmlab
