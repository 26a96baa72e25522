#ifndef BMLAB_STATS_HPP
#define BMLAB_STATS_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/partial_sum.hpp"

namespace bmlab {

/// Cascade summation; fixed association independent of the caller's thread
/// count, accurate to O(log n) rounding.
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);

/// Limiting variance sum_{q=d}^{Q} q! c_q^2 sum_k rho(k)^q with a certified
/// truncation error. tail_bound combines the per-q lag tails with an upper
/// bound on the discarded chaos mass (every lag sum beyond Q is dominated by
/// the absolute rank-d sum since |rho| <= 1).
struct SigmaSquared {
  double value = 0.0;
  double tail_bound = 0.0;
  int terms_used = 0;
  std::int64_t lag_cutoff = 0;
};

/// Q <= 0 means "use the expansion's truncation". Throws ConditionH1Violated
/// when the absolute rank-d power sum has no finite tail bound.
SigmaSquared sigma_squared(const HermiteExpansion& e, const CovarianceModel& m,
                           int Q = 0, std::int64_t lag_cutoff = 10000);

/// Brownian variance constant of the critical fGn case H = 1 - 1/(2d) under
/// the sqrt(n log n) normalization, for a pure H_d functional:
///   2 d! ((2d-1)(d-1) / (2 d^2))^d.
/// Throws CriticalRankOne for d = 1 (the formula degenerates; fgn(1/2) is
/// white noise).
double critical_sigma_squared(int d);

/// Partial sums of the tightness criterion
///   sum_q sqrt(q!) |c_q| (sum_k |rho(k)|^q)^{1/2} R^q,  R > 1,
/// with the per-term breakdown so divergence is visible.
struct BenHarizSum {
  double partial = 0.0;
  std::vector<double> per_term;  // q = rank .. Q
  int first_q = 0;
};

BenHarizSum ben_hariz_sum(const HermiteExpansion& e, const CovarianceModel& m,
                          double R, int Q = 0, std::int64_t lag_cutoff = 10000);

/// Two-sided Kolmogorov-Smirnov test of samples/sigma against N(0,1);
/// p-value from the asymptotic Kolmogorov series (100 terms).
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_normality(std::span<const double> samples, double sigma);

/// Upper tail 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 x^2} of the Kolmogorov
/// distribution, clamped to [0,1].
double kolmogorov_tail(double x);

/// Empirical covariance of (Y(t_1)..Y(t_k)) across a batch versus the
/// Brownian target sigma2 * min(t_i, t_j).
struct CovEntry {
  double t1 = 0.0, t2 = 0.0;
  double empirical = 0.0;
  double target = 0.0;
  double se = 0.0;       // standard error of the empirical entry
  double dev_se = 0.0;   // |empirical - target| / se
};

struct FddCheck {
  std::vector<CovEntry> entries;  // upper triangle including the diagonal
  double max_abs_dev = 0.0;
  double max_se_multiple = 0.0;
};

FddCheck fdd_covariance_check(std::span<const PartialSumPath> batch,
                              std::span<const double> times, double sigma2);

/// Empirical L^p norm of Y(t)-Y(s) over the batch divided by the increment
/// scale ((floor(nt)-floor(ns))/n)^{1/2}, per pair and maximized. Bounded in
/// n when E|phi(N)|^p is finite; pairs with an empty increment are skipped.
struct TightnessRow {
  double s = 0.0, t = 0.0;
  double span = 0.0;      // (floor(nt) - floor(ns)) / n
  double lp_norm = 0.0;
  double ratio = 0.0;
  double se = 0.0;        // standard error of lp_norm (delta method)
};

struct TightnessResult {
  double max_ratio = 0.0;
  std::vector<TightnessRow> table;
};

TightnessResult tightness_diagnostic(
    std::span<const PartialSumPath> batch, double p,
    std::span<const std::pair<double, double>> pair_grid);

/// Monte Carlo check of the chaos moment bound
///   || n^{-1/2} sum_{i in [ns, nt)} H_q(X_i) ||_p <= (p-1)^{q/2} || . ||_2.
/// ok allows a slack of 4 combined relative standard errors.
struct HyperResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_rel_se = 0.0;
  double rhs_rel_se = 0.0;
  double slack = 0.0;
  bool ok = false;
};

HyperResult hypercontractivity_check(int q, double p, const CovarianceModel& m,
                                     std::size_t n, double s, double t,
                                     std::size_t replications,
                                     std::uint64_t master_seed,
                                     int threads = 1);

}  // namespace bmlab

#endif  // BMLAB_STATS_HPP
