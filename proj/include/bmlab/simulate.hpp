#ifndef BMLAB_SIMULATE_HPP
#define BMLAB_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bmlab/covariance.hpp"

namespace bmlab {

struct SimulateOptions {
  std::size_t cholesky_max = 2048;  // largest n for the dense fallback
  double eps_eig_rel = 1e-9;        // negative-eigenvalue clamp, relative
};

/// One realization X_0..X_{n-1} of the stationary sequence, with the
/// provenance needed to regenerate it bit-exactly within a build.
struct GaussianPath {
  std::vector<double> samples;
  CovarianceModel model = CovarianceModel::white_noise();
  std::uint64_t seed = 0;
  std::string method;  // "circulant" | "cholesky"
};

/// Spectral amplitudes of the circulant extension of Toeplitz(rho, n).
///
/// The first row rho(0..m/2) mirrored into a circulant of power-of-two size
/// m >= 2(n-1) is diagonalized by the FFT; sampling synthesizes complex
/// Gaussian amplitudes per frequency and transforms back, which is exact in
/// law whenever all eigenvalues are nonnegative. Eigenvalues in
/// [-eps, 0] with eps = eps_eig_rel * max eigenvalue are clamped to zero;
/// anything below -eps marks the embedding as unusable.
class CirculantEmbedding {
 public:
  CirculantEmbedding(const CovarianceModel& m, std::size_t n,
                     double eps_eig_rel = 1e-9);

  bool ok() const { return ok_; }
  double min_eigenvalue() const { return min_eig_; }
  double max_eigenvalue() const { return max_eig_; }
  std::size_t circulant_size() const { return m_; }

  /// n samples; requires ok(). One fixed-order Gaussian draw per frequency
  /// (m draws total), so the result depends on the seed alone.
  std::vector<double> sample(std::uint64_t seed) const;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  bool ok_ = false;
  double min_eig_ = 0.0;
  double max_eig_ = 0.0;
  std::vector<double> amp_;  // per-frequency synthesis amplitudes
};

/// Dense Cholesky of Toeplitz(rho, n); the exact-law fallback for models
/// whose circulant extension is indefinite.
class ToeplitzCholesky {
 public:
  ToeplitzCholesky(const CovarianceModel& m, std::size_t n);
  bool ok() const { return ok_; }
  std::vector<double> sample(std::uint64_t seed) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  bool ok_ = false;
};

/// Reusable sampler for a fixed (model, n): picks circulant embedding, or
/// the Cholesky fallback when the embedding fails and n <= cholesky_max.
/// Throws NotEmbeddable when neither applies.
class PathSampler {
 public:
  PathSampler(const CovarianceModel& m, std::size_t n,
              const SimulateOptions& opt = {});

  GaussianPath sample(std::uint64_t seed) const;
  const std::string& method() const { return method_; }

 private:
  CovarianceModel model_ = CovarianceModel::white_noise();
  std::size_t n_ = 0;
  std::string method_;
  std::shared_ptr<const CirculantEmbedding> circulant_;
  std::shared_ptr<const ToeplitzCholesky> cholesky_;
};

/// One path, exact in law N(0, Toeplitz(rho)).
GaussianPath simulate(const CovarianceModel& m, std::size_t n,
                      std::uint64_t seed, const SimulateOptions& opt = {});

/// Replication i uses stream split_stream(master_seed, i); contents are
/// independent of evaluation order and thread count.
std::vector<GaussianPath> simulate_batch(const CovarianceModel& m,
                                         std::size_t n,
                                         std::size_t replications,
                                         std::uint64_t master_seed,
                                         int threads = 1,
                                         const SimulateOptions& opt = {});

/// Static partition of [0, count) over `threads` workers; fn(i) must only
/// touch slot i of its output. Used wherever replications run concurrently.
void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn);

}  // namespace bmlab

#endif  // BMLAB_SIMULATE_HPP
