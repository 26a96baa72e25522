#ifndef BMLAB_COVARIANCE_HPP
#define BMLAB_COVARIANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace bmlab {

enum class CovFamily { fgn, exponential, finite_table, white_noise };

/// Stationary covariance rho(k) with rho(0) = 1, symmetric in k. Families:
///   fgn(H)          rho(k) = ((k+1)^{2H} + |k-1|^{2H} - 2 k^{2H}) / 2
///   exponential(a)  rho(k) = a^{|k|},  0 < a < 1
///   finite_table    tabulated |rho| <= 1, zero-extended beyond the last lag
///   white_noise     rho(k) = 1{k = 0}
/// Positive semidefiniteness of table models is checked at simulation time.
class CovarianceModel {
 public:
  static CovarianceModel fgn(double hurst);
  static CovarianceModel exponential(double a);
  static CovarianceModel finite_table(std::vector<double> values);
  static CovarianceModel white_noise();

  double rho(std::int64_t k) const;

  CovFamily family() const { return family_; }
  double hurst() const { return hurst_; }
  double decay() const { return decay_; }
  const std::vector<double>& table() const { return table_; }
  std::string describe() const;

 private:
  CovarianceModel() = default;
  CovFamily family_ = CovFamily::white_noise;
  double hurst_ = 0.0;               // fgn
  double decay_ = 0.0;               // exponential
  std::vector<double> table_;        // finite_table
};

/// Truncated power sum with a certified bound on the neglected tail.
/// tail_bound is a rigorous overestimate of |sum_{|k| > cutoff} .|, or +inf
/// when no finite bound exists (the divergent-series sentinel).
struct PowerSum {
  double value = 0.0;
  double tail_bound = 0.0;

  bool convergent() const;
};

/// Signed sum_{|k| <= cutoff} rho(k)^q  (the limiting-variance inner sum).
/// With require_finite, throws DivergentSeries on the +inf sentinel.
PowerSum power_sum(const CovarianceModel& m, int q, std::int64_t lag_cutoff,
                   bool require_finite = false);

/// Absolute variant sum_{|k| <= cutoff} |rho(k)|^q  (the summability check).
PowerSum power_sum_abs(const CovarianceModel& m, int q, std::int64_t lag_cutoff,
                       bool require_finite = false);

enum class Regime { subcritical, critical, supercritical, summable };

/// Which normalization makes the partial sums converge.
enum class Normalization { sqrt_n, sqrt_n_log_n };

struct RegimeVerdict {
  Regime regime = Regime::summable;
  Normalization normalization = Normalization::sqrt_n;
  bool has_hurst = false;
  double hurst = 0.0;
  int rank = 0;

  std::string describe() const;
};

/// Regime trichotomy for rank-d functionals: fgn is subcritical when
/// H < 1 - 1/(2d), critical at equality (d >= 2, sqrt(n log n) scaling),
/// supercritical above; the remaining families are summable. The
/// boundary combination fgn(1/2) with d = 1 is refused (CriticalRankOne):
/// that model is plain white noise and should be requested as such.
RegimeVerdict classify_regime(const CovarianceModel& m, int d);

std::string to_string(Regime r);
std::string to_string(Normalization n);

}  // namespace bmlab

#endif  // BMLAB_COVARIANCE_HPP
