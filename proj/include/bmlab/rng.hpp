#ifndef BMLAB_RNG_HPP
#define BMLAB_RNG_HPP

#include <cstdint>

namespace bmlab {

/// Counter-based 64-bit generator (SplitMix64): output k is
/// mix(seed + (k+1)*GAMMA) with the Stafford/Vigna finalizer, so streams
/// support O(1) random access and never share mutable state.
///
/// Stream derivation for parallel batches is split_stream(master, i) =
/// raw output i of SplitMix64(master); replication i of a batch always sees
/// the same stream regardless of scheduling. Gaussian variates use the
/// inverse-CDF map (one uniform per normal), recorded in path provenance as
/// "splitmix64/inverse-cdf".
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Uniform on (0,1), 53-bit mantissa, never exactly 0 or 1.
  double next_double();

  /// Standard normal via the inverse CDF.
  double next_gaussian();

 private:
  std::uint64_t state_;
};

/// SplitMix64 finalizer (full-avalanche 64-bit mix).
std::uint64_t mix64(std::uint64_t z);

/// Derived seed for stream `index` of a batch under `master_seed`.
std::uint64_t split_stream(std::uint64_t master_seed, std::uint64_t index);

/// Inverse standard-normal CDF, accurate to double precision.
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace bmlab

#endif  // BMLAB_RNG_HPP
