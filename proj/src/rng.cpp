#include "bmlab/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <stdexcept>

namespace bmlab {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;  // 2^64 / golden ratio
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += kGamma;
  return mix64(state_);
}

double SplitMix64::next_double() {
  // 53 mantissa bits, offset by half an ulp to stay inside (0,1)
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::next_gaussian() { return normal_quantile(next_double()); }

std::uint64_t split_stream(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed + (index + 1) * kGamma);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must lie in (0,1)");
  // Phi^{-1}(p) = -sqrt(2) erfc^{-1}(2p)
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace bmlab
