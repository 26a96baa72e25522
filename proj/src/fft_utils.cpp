#include "fft_utils.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace bmlab::detail {

namespace {

// FFTW planning is not thread-safe; executions through the new-array
// interface are. Plans are cached per transform size and created with
// FFTW_ESTIMATE so that the chosen algorithm, and hence the exact floating
// point result, is a function of the size alone.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(std::size_t m) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(m);
    if (it != plans_.end()) return it->second;

    double* re = fftw_alloc_real(m);
    fftw_complex* cx = fftw_alloc_complex(m / 2 + 1);
    if (!re || !cx) throw std::bad_alloc();
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_1d(static_cast<int>(m), re, cx, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_1d(static_cast<int>(m), cx, re, FFTW_ESTIMATE);
    fftw_free(re);
    fftw_free(cx);
    if (!p.r2c || !p.c2r) throw std::runtime_error("fftw: planning failed");
    plans_[m] = p;
    return p;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [m, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

struct FftwRealBuf {
  explicit FftwRealBuf(std::size_t n) : p(fftw_alloc_real(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwRealBuf() { fftw_free(p); }
  FftwRealBuf(const FftwRealBuf&) = delete;
  FftwRealBuf& operator=(const FftwRealBuf&) = delete;
  double* p;
};

struct FftwComplexBuf {
  explicit FftwComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwComplexBuf() { fftw_free(p); }
  FftwComplexBuf(const FftwComplexBuf&) = delete;
  FftwComplexBuf& operator=(const FftwComplexBuf&) = delete;
  fftw_complex* p;
};

}  // namespace

std::vector<std::complex<double>> real_fft_half(const std::vector<double>& in) {
  const std::size_t m = in.size();
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("real_fft_half: size must be even and >= 2");
  PlanPair plans = PlanCache::instance().get(m);

  FftwRealBuf re(m);
  FftwComplexBuf cx(m / 2 + 1);
  for (std::size_t i = 0; i < m; ++i) re.p[i] = in[i];
  fftw_execute_dft_r2c(plans.r2c, re.p, cx.p);

  std::vector<std::complex<double>> out(m / 2 + 1);
  for (std::size_t j = 0; j <= m / 2; ++j)
    out[j] = std::complex<double>(cx.p[j][0], cx.p[j][1]);
  return out;
}

std::vector<double> halfcomplex_backward(
    const std::vector<std::complex<double>>& half) {
  if (half.size() < 2)
    throw std::invalid_argument("halfcomplex_backward: need >= 2 bins");
  const std::size_t m = 2 * (half.size() - 1);
  PlanPair plans = PlanCache::instance().get(m);

  FftwRealBuf re(m);
  FftwComplexBuf cx(m / 2 + 1);
  for (std::size_t j = 0; j <= m / 2; ++j) {
    cx.p[j][0] = half[j].real();
    cx.p[j][1] = half[j].imag();
  }
  fftw_execute_dft_c2r(plans.c2r, cx.p, re.p);

  return std::vector<double>(re.p, re.p + m);
}

}  // namespace bmlab::detail
