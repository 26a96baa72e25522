#include "bmlab/covariance.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bmlab/errors.hpp"

namespace bmlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCriticalWindow = 1e-12;
}  // namespace

CovarianceModel CovarianceModel::fgn(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw ConfigError("fgn: Hurst index must lie in (0,1)");
  CovarianceModel m;
  m.family_ = CovFamily::fgn;
  m.hurst_ = hurst;
  return m;
}

CovarianceModel CovarianceModel::exponential(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw ConfigError("exponential: base must lie in (0,1)");
  CovarianceModel m;
  m.family_ = CovFamily::exponential;
  m.decay_ = a;
  return m;
}

CovarianceModel CovarianceModel::finite_table(std::vector<double> values) {
  if (values.empty() || std::abs(values[0] - 1.0) > 1e-12)
    throw ConfigError("finite_table: rho(0) must equal 1");
  for (double v : values)
    if (!(std::abs(v) <= 1.0 + 1e-12))
      throw ConfigError("finite_table: |rho(k)| must be <= 1");
  CovarianceModel m;
  m.family_ = CovFamily::finite_table;
  m.table_ = std::move(values);
  m.table_[0] = 1.0;
  return m;
}

CovarianceModel CovarianceModel::white_noise() { return CovarianceModel(); }

double CovarianceModel::rho(std::int64_t k) const {
  const std::int64_t a = k < 0 ? -k : k;
  switch (family_) {
    case CovFamily::white_noise:
      return a == 0 ? 1.0 : 0.0;
    case CovFamily::exponential:
      return std::pow(decay_, static_cast<double>(a));
    case CovFamily::finite_table:
      return a < static_cast<std::int64_t>(table_.size())
                 ? table_[static_cast<std::size_t>(a)]
                 : 0.0;
    case CovFamily::fgn: {
      if (a == 0) return 1.0;
      const double x = static_cast<double>(a);
      const double e = 2.0 * hurst_;
      return 0.5 * (std::pow(x + 1.0, e) + std::pow(x - 1.0, e) -
                    2.0 * std::pow(x, e));
    }
  }
  return 0.0;
}

std::string CovarianceModel::describe() const {
  std::ostringstream os;
  switch (family_) {
    case CovFamily::white_noise: os << "white"; break;
    case CovFamily::exponential: os << "exponential(a=" << decay_ << ")"; break;
    case CovFamily::finite_table: os << "table(" << table_.size() << " lags)"; break;
    case CovFamily::fgn: os << "fgn(H=" << hurst_ << ")"; break;
  }
  return os.str();
}

bool PowerSum::convergent() const { return std::isfinite(tail_bound); }

namespace {

// Tail of 2 * sum_{k > K} |rho(k)|^q by family.
//
// fgn: |rho(k)| = |g''(xi)|/2 for g(x) = x^{2H} and some xi in (k-1, k+1),
// and |g''| decreases, so |rho(k)| <= H|2H-1| (k-1)^{2H-2} for k >= 2. With
// s = q(2-2H) an integral comparison gives
//   sum_{j >= K} j^{-s} <= K^{-s} + K^{1-s}/(s-1)   (s > 1),
// and no finite bound when s <= 1.
double tail_bound_abs(const CovarianceModel& m, int q, std::int64_t cutoff) {
  switch (m.family()) {
    case CovFamily::white_noise:
      return 0.0;
    case CovFamily::finite_table: {
      double acc = 0.0;
      const auto len = static_cast<std::int64_t>(m.table().size());
      for (std::int64_t k = cutoff + 1; k < len; ++k)
        acc += std::pow(std::abs(m.rho(k)), q);
      return 2.0 * acc;
    }
    case CovFamily::exponential: {
      const double aq = std::pow(m.decay(), q);
      return 2.0 * std::pow(aq, static_cast<double>(cutoff + 1)) / (1.0 - aq);
    }
    case CovFamily::fgn: {
      const double H = m.hurst();
      const double c = H * std::abs(2.0 * H - 1.0);
      if (c == 0.0) return 0.0;  // H = 1/2 is white noise
      const double s = q * (2.0 - 2.0 * H);
      if (s <= 1.0) return kInf;
      const double K = static_cast<double>(cutoff);
      const double sum_js =
          std::pow(K, -s) + std::pow(K, 1.0 - s) / (s - 1.0);
      return 2.0 * std::pow(c, q) * sum_js;
    }
  }
  return kInf;
}

PowerSum power_sum_impl(const CovarianceModel& m, int q, std::int64_t cutoff,
                        bool absolute, bool require_finite) {
  if (q < 1) throw ConfigError("power_sum: q must be >= 1");
  if (cutoff < 1) throw ConfigError("power_sum: lag_cutoff must be >= 1");

  std::int64_t top = cutoff;
  if (m.family() == CovFamily::white_noise) top = 0;
  if (m.family() == CovFamily::finite_table)
    top = std::min<std::int64_t>(top, static_cast<std::int64_t>(m.table().size()) - 1);

  double acc = 1.0;  // k = 0 term, rho(0)^q = 1
  for (std::int64_t k = top; k >= 1; --k) {
    const double r = m.rho(k);
    const double term = absolute ? std::pow(std::abs(r), q) : std::pow(r, q);
    acc += 2.0 * term;
  }

  PowerSum out;
  out.value = acc;
  out.tail_bound = tail_bound_abs(m, q, cutoff);
  if (require_finite && !out.convergent())
    throw DivergentSeries("power_sum: no finite tail bound for " + m.describe() +
                          " at q=" + std::to_string(q));
  return out;
}

}  // namespace

PowerSum power_sum(const CovarianceModel& m, int q, std::int64_t lag_cutoff,
                   bool require_finite) {
  return power_sum_impl(m, q, lag_cutoff, /*absolute=*/false, require_finite);
}

PowerSum power_sum_abs(const CovarianceModel& m, int q, std::int64_t lag_cutoff,
                       bool require_finite) {
  return power_sum_impl(m, q, lag_cutoff, /*absolute=*/true, require_finite);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::supercritical: return "supercritical";
    case Regime::summable: return "summable";
  }
  return "?";
}

std::string to_string(Normalization n) {
  return n == Normalization::sqrt_n ? "sqrt(n)" : "sqrt(n log n)";
}

std::string RegimeVerdict::describe() const {
  std::ostringstream os;
  os << to_string(regime) << ", normalization " << to_string(normalization);
  return os.str();
}

RegimeVerdict classify_regime(const CovarianceModel& m, int d) {
  if (d < 1) throw ConfigError("classify_regime: rank must be >= 1");

  RegimeVerdict v;
  v.rank = d;

  if (m.family() != CovFamily::fgn) {
    v.regime = Regime::summable;
    v.normalization = Normalization::sqrt_n;
    return v;
  }

  const double H = m.hurst();
  const double boundary = 1.0 - 1.0 / (2.0 * d);
  v.has_hurst = true;
  v.hurst = H;

  if (std::abs(H - boundary) < kCriticalWindow) {
    if (d == 1)
      throw CriticalRankOne(
          "classify_regime: fgn(1/2) with rank 1 is white noise; use the "
          "white-noise family instead of the critical treatment");
    v.regime = Regime::critical;
    v.normalization = Normalization::sqrt_n_log_n;
  } else if (H < boundary) {
    v.regime = Regime::subcritical;
    v.normalization = Normalization::sqrt_n;
  } else {
    v.regime = Regime::supercritical;
    v.normalization = Normalization::sqrt_n;  // no Brownian scaling exists
  }
  return v;
}

}  // namespace bmlab
