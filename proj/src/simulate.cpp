#include "bmlab/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>

#include "bmlab/errors.hpp"
#include "bmlab/rng.hpp"
#include "fft_utils.hpp"

namespace bmlab {

namespace {

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

CirculantEmbedding::CirculantEmbedding(const CovarianceModel& model,
                                       std::size_t n, double eps_eig_rel)
    : n_(n) {
  if (n < 1) throw ConfigError("CirculantEmbedding: n must be >= 1");

  if (n == 1) {
    // single N(0,1) draw, no transform needed
    m_ = 1;
    ok_ = true;
    min_eig_ = max_eig_ = 1.0;
    return;
  }

  m_ = next_pow2(std::max<std::size_t>(2 * (n - 1), 2));
  std::vector<double> row(m_);
  for (std::size_t j = 0; j < m_; ++j) {
    const std::size_t lag = std::min(j, m_ - j);
    row[j] = model.rho(static_cast<std::int64_t>(lag));
  }

  const auto spectrum = detail::real_fft_half(row);
  std::vector<double> eig(spectrum.size());
  for (std::size_t j = 0; j < spectrum.size(); ++j) eig[j] = spectrum[j].real();

  max_eig_ = *std::max_element(eig.begin(), eig.end());
  min_eig_ = *std::min_element(eig.begin(), eig.end());
  const double eps = eps_eig_rel * std::max(max_eig_, 0.0);
  if (min_eig_ < -eps) {
    ok_ = false;
    return;
  }
  ok_ = true;

  // Fold the 1/sqrt(m) normalization and the half-spectrum variance split
  // into per-frequency amplitudes.
  const std::size_t half = m_ / 2;
  amp_.resize(half + 1);
  const double inv_m = 1.0 / static_cast<double>(m_);
  for (std::size_t j = 0; j <= half; ++j) {
    const double lambda = std::max(eig[j], 0.0);
    const bool endpoint = (j == 0 || j == half);
    amp_[j] = std::sqrt(lambda * inv_m * (endpoint ? 1.0 : 0.5));
  }
}

std::vector<double> CirculantEmbedding::sample(std::uint64_t seed) const {
  if (!ok_) throw NotEmbeddable("CirculantEmbedding: indefinite embedding");
  SplitMix64 rng(seed);

  if (n_ == 1) return {rng.next_gaussian()};

  const std::size_t half = m_ / 2;
  std::vector<std::complex<double>> spec(half + 1);
  spec[0] = {amp_[0] * rng.next_gaussian(), 0.0};
  for (std::size_t j = 1; j < half; ++j) {
    const double re = rng.next_gaussian();
    const double im = rng.next_gaussian();
    spec[j] = {amp_[j] * re, amp_[j] * im};
  }
  spec[half] = {amp_[half] * rng.next_gaussian(), 0.0};

  std::vector<double> full = detail::halfcomplex_backward(spec);
  full.resize(n_);
  return full;
}

struct ToeplitzCholesky::Impl {
  Eigen::MatrixXd lower;
};

ToeplitzCholesky::ToeplitzCholesky(const CovarianceModel& m, std::size_t n) {
  if (n < 1) throw ConfigError("ToeplitzCholesky: n must be >= 1");
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m.rho(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    ok_ = false;
    return;
  }
  auto impl = std::make_shared<Impl>();
  impl->lower = llt.matrixL();
  impl_ = std::move(impl);
  ok_ = true;
}

std::vector<double> ToeplitzCholesky::sample(std::uint64_t seed) const {
  if (!ok_) throw NotEmbeddable("ToeplitzCholesky: matrix not positive definite");
  const Eigen::Index n = impl_->lower.rows();
  SplitMix64 rng(seed);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.next_gaussian();
  Eigen::VectorXd x = impl_->lower.triangularView<Eigen::Lower>() * z;
  return std::vector<double>(x.data(), x.data() + n);
}

PathSampler::PathSampler(const CovarianceModel& m, std::size_t n,
                         const SimulateOptions& opt)
    : model_(m), n_(n) {
  auto ce = std::make_shared<CirculantEmbedding>(m, n, opt.eps_eig_rel);
  if (ce->ok()) {
    circulant_ = std::move(ce);
    method_ = "circulant";
    return;
  }
  if (n <= opt.cholesky_max) {
    auto tc = std::make_shared<ToeplitzCholesky>(m, n);
    if (tc->ok()) {
      cholesky_ = std::move(tc);
      method_ = "cholesky";
      return;
    }
    throw NotEmbeddable("simulate: circulant embedding indefinite (min eig " +
                        std::to_string(ce->min_eigenvalue()) +
                        ") and Toeplitz matrix not positive definite");
  }
  throw NotEmbeddable("simulate: circulant embedding indefinite (min eig " +
                      std::to_string(ce->min_eigenvalue()) + ") and n=" +
                      std::to_string(n) + " exceeds cholesky_max=" +
                      std::to_string(opt.cholesky_max));
}

GaussianPath PathSampler::sample(std::uint64_t seed) const {
  GaussianPath path;
  path.model = model_;
  path.seed = seed;
  path.method = method_;
  path.samples = circulant_ ? circulant_->sample(seed) : cholesky_->sample(seed);
  return path;
}

GaussianPath simulate(const CovarianceModel& m, std::size_t n,
                      std::uint64_t seed, const SimulateOptions& opt) {
  return PathSampler(m, n, opt).sample(seed);
}

void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const int workers = std::max(1, threads);
  if (workers == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
          fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<GaussianPath> simulate_batch(const CovarianceModel& m,
                                         std::size_t n,
                                         std::size_t replications,
                                         std::uint64_t master_seed, int threads,
                                         const SimulateOptions& opt) {
  if (replications < 1)
    throw ConfigError("simulate_batch: replications must be >= 1");
  PathSampler sampler(m, n, opt);

  std::vector<GaussianPath> out(replications);
  parallel_for_index(replications, threads, [&](std::size_t i) {
    try {
      out[i] = sampler.sample(split_stream(master_seed, i));
    } catch (const Error& e) {
      throw Error("replication " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace bmlab
