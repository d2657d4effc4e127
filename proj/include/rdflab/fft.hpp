#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "rdflab/dyadic.hpp"

namespace rdflab::fft {

using cd = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe; execution on fresh arrays is, provided the
// plan was made with FFTW_UNALIGNED.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto& slot = plans_[{n, sign}];
    if (slot == nullptr) {
      std::vector<cd> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
      slot = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(b.data()),
                              sign, FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    }
    return slot;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void execute(std::span<const cd> in, std::span<cd> out, int sign) {
  const int n = static_cast<int>(in.size());
  rdflab::detail::require(is_power_of_two(n), "transform length must be a power of two");
  rdflab::detail::require(out.size() == in.size(), "transform output length mismatch");
  fftw_plan plan = PlanCache::instance().get(n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

// hat f(xi) = (1/N) sum_m f(m/N) exp(-2 pi i xi m / N)
inline std::vector<cd> forward(std::span<const cd> values) {
  std::vector<cd> out(values.size());
  detail::execute(values, out, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(values.size());
  for (auto& c : out) c *= scale;
  return out;
}

// f(m/N) = sum_xi hat f(xi) exp(2 pi i xi m / N)
inline void inverse(std::span<const cd> coeffs, std::span<cd> out) { detail::execute(coeffs, out, FFTW_BACKWARD); }

inline std::vector<cd> inverse(std::span<const cd> coeffs) {
  std::vector<cd> out(coeffs.size());
  inverse(coeffs, out);
  return out;
}

}  // namespace rdflab::fft
