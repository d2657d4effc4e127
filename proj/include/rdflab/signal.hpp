#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "rdflab/dyadic.hpp"
#include "rdflab/fft.hpp"

namespace rdflab {

using cd = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

struct SpectrumCache {
  std::once_flag once;
  std::vector<cd> coeffs;
};

}  // namespace detail

/// Complex samples f(m/N), m = 0..N-1, on the unit torus, with a lazily
/// computed spectrum hat f(xi), xi = 0..N-1. Immutable; copies share the
/// spectrum cache.
class Signal {
 public:
  Signal() = default;

  explicit Signal(std::vector<cd> values)
      : values_(std::move(values)), cache_(std::make_shared<detail::SpectrumCache>()) {
    detail::require(is_power_of_two(static_cast<std::int64_t>(values_.size())),
                    "signal length " + std::to_string(values_.size()) + " is not a power of two");
  }

  static Signal zeros(int N) { return Signal(std::vector<cd>(static_cast<std::size_t>(N))); }
  static Signal constant(int N, cd c) { return Signal(std::vector<cd>(static_cast<std::size_t>(N), c)); }

  // Single frequency c exp(2 pi i xi x).
  static Signal tone(int N, int xi, cd c = 1.0) {
    std::vector<cd> v(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m)
      v[static_cast<std::size_t>(m)] = c * std::polar(1.0, 2.0 * std::numbers::pi * positive_mod(
                                                                 static_cast<std::int64_t>(xi) * m, N) / N);
    return Signal(std::move(v));
  }

  static Signal from_spectrum(std::vector<cd> coeffs) {
    detail::require(is_power_of_two(static_cast<std::int64_t>(coeffs.size())),
                    "spectrum length is not a power of two");
    Signal s(fft::inverse(coeffs));
    std::call_once(s.cache_->once, [&] { s.cache_->coeffs = std::move(coeffs); });
    return s;
  }

  int size() const { return static_cast<int>(values_.size()); }
  int L() const { return exact_log2(size()); }
  std::span<const cd> values() const { return values_; }
  const cd& operator[](std::size_t m) const { return values_[m]; }

  std::span<const cd> spectrum() const {
    std::call_once(cache_->once, [this] { cache_->coeffs = fft::forward(values_); });
    return cache_->coeffs;
  }

  std::vector<double> magnitudes() const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::abs(values_[i]);
    return out;
  }

 private:
  std::vector<cd> values_;
  std::shared_ptr<detail::SpectrumCache> cache_;
};

inline std::vector<cd> spectrum(const Signal& f) {
  const auto s = f.spectrum();
  return {s.begin(), s.end()};
}

inline Signal synthesize(std::vector<cd> coeffs) { return Signal::from_spectrum(std::move(coeffs)); }

// pi_I applied to a spectrum, returned in physical space.
inline std::vector<cd> project_spectrum(std::span<const cd> coeffs, const CyclicInterval& I) {
  std::vector<cd> masked(coeffs.size());
  const int N = static_cast<int>(coeffs.size());
  if (I.is_full()) {
    masked.assign(coeffs.begin(), coeffs.end());
  } else {
    for (int i = 0; i < I.length; ++i) {
      const auto xi = static_cast<std::size_t>(positive_mod(I.start + i, N));
      masked[xi] = coeffs[xi];
    }
  }
  return fft::inverse(masked);
}

inline std::vector<cd> project_spectrum(std::span<const cd> coeffs, const DyadicInterval& I) {
  return project_spectrum(coeffs, CyclicInterval::from(I));
}

/// Sharp frequency projection: hat(pi_I f) = 1_I hat f.
inline Signal project(const Signal& f, const CyclicInterval& I) {
  detail::require(I.N == f.size(), "projection interval lives on a different grid");
  return Signal(project_spectrum(f.spectrum(), I));
}

inline Signal project(const Signal& f, const DyadicInterval& I) { return project(f, CyclicInterval::from(I)); }

/// pi_omega(f, g) = pi_{omega1} f * pi_{omega2} g pointwise.
inline Signal bilinear_project(const Signal& f, const Signal& g, const DyadicSquare& w) {
  detail::require(f.size() == g.size() && w.omega1.grid_size() == f.size(), "bilinear_project: grid mismatch");
  auto a = project_spectrum(f.spectrum(), w.omega1);
  const auto b = project_spectrum(g.spectrum(), w.omega2);
  for (std::size_t m = 0; m < a.size(); ++m) a[m] *= b[m];
  return Signal(std::move(a));
}

/// Smooth cutoff chi_{omega3}: one on a plateau covering -omega1 - omega2,
/// zero outside dual_support, raised-cosine taper between.
struct BumpMask {
  std::vector<double> weights;
  CyclicInterval plateau;
  CyclicInterval support;
};

/// `ramp` in (0, 1] is the taper length as a fraction of |omega|; the plateau
/// has half-width (2 - ramp) |omega| about the reflected centre.
inline BumpMask smooth_bump(const DyadicSquare& w, int N, double ramp = 1.0) {
  detail::require(ramp > 0.0 && ramp <= 1.0, "bump ramp fraction must lie in (0, 1]");
  BumpMask mask;
  mask.weights.assign(static_cast<std::size_t>(N), 0.0);
  mask.support = dual_support(w, N);
  if (mask.support.is_full()) {
    std::fill(mask.weights.begin(), mask.weights.end(), 1.0);
    mask.plateau = mask.support;
    return mask;
  }
  const double side = w.side();
  const double ramp_len = ramp * side;
  const double half_plateau = 2.0 * side - ramp_len;
  const int c = reflected_centre(w, N);
  for (int xi = 0; xi < N; ++xi) {
    int d = positive_mod(xi - c, N);
    if (d > N / 2) d -= N;
    const double a = std::abs(static_cast<double>(d));
    double v = 0.0;
    if (a <= half_plateau)
      v = 1.0;
    else if (a < 2.0 * side)
      v = 0.5 * (1.0 + std::cos(std::numbers::pi * (a - half_plateau) / ramp_len));
    mask.weights[static_cast<std::size_t>(xi)] = v;
  }
  const int hp = static_cast<int>(std::floor(half_plateau));
  mask.plateau = {positive_mod(c - hp, N), 2 * hp + 1, N};
  return mask;
}

/// h_omega * check chi_{omega3}: spectrum of h_omega weighted by the bump.
inline Signal mollified_component(const Signal& h, const DyadicSquare& w, double ramp = 1.0) {
  const auto mask = smooth_bump(w, h.size(), ramp);
  const auto s = h.spectrum();
  std::vector<cd> coeffs(s.begin(), s.end());
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= mask.weights[i];
  return Signal::from_spectrum(std::move(coeffs));
}

/// ((1/N) sum |v_m|^p)^(1/p); the maximum for p = inf. Quasi-norms for p < 1.
inline double lp_norm(std::span<const double> magnitudes, double p) {
  detail::require(p > 0.0, "lp_norm needs p > 0");
  if (magnitudes.empty()) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : magnitudes) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (double v : magnitudes) sum += std::pow(std::abs(v), p);
  return std::pow(sum / static_cast<double>(magnitudes.size()), 1.0 / p);
}

inline double lp_norm(std::span<const cd> values, double p) {
  std::vector<double> mags(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mags[i] = std::abs(values[i]);
  return lp_norm(mags, p);
}

inline double lp_norm(const Signal& f, double p) { return lp_norm(f.values(), p); }

/// (mean over grid points m in [begin, end) of |v_m|^r0)^(1/r0).
inline double local_average(std::span<const cd> values, int begin, int end, double r0) {
  detail::require(begin < end, "local_average over an empty interval");
  detail::require(begin >= 0 && end <= static_cast<int>(values.size()), "local_average interval outside grid");
  detail::require(r0 > 0.0, "local_average needs r0 > 0");
  double sum = 0.0;
  for (int m = begin; m < end; ++m) sum += std::pow(std::abs(values[static_cast<std::size_t>(m)]), r0);
  return std::pow(sum / (end - begin), 1.0 / r0);
}

inline double local_average(std::span<const cd> values, const DyadicInterval& I, double r0) {
  return local_average(values, I.begin(), I.end(), r0);
}

inline double local_average(const Signal& f, const DyadicInterval& I, double r0) {
  return local_average(f.values(), I, r0);
}

/// Family {h_omega} indexed by squares of a collection (an element of
/// L^s(l^t)); squares without an entry are zero components.
class VectorFunction {
 public:
  VectorFunction() = default;
  VectorFunction(const SquareCollection& omega, std::map<DyadicSquare, Signal> entries)
      : N_(omega.N()), entries_(std::move(entries)) {
    for (const auto& [w, s] : entries_) {
      detail::require(omega.index_of(w).has_value(), "vector function key " + describe(w) + " not in collection");
      detail::require(s.size() == N_, "vector function component on the wrong grid");
    }
  }

  int N() const { return N_; }
  const std::map<DyadicSquare, Signal>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const Signal* find(const DyadicSquare& w) const {
    const auto it = entries_.find(w);
    return it == entries_.end() ? nullptr : &it->second;
  }

 private:
  int N_ = 0;
  std::map<DyadicSquare, Signal> entries_;
};

/// L^s(l^t) norm: lp_norm with exponent s of x -> (sum_omega |h_omega(x)|^t)^(1/t).
inline double mixed_norm(const VectorFunction& h, double s, double t) {
  detail::require(s > 0.0 && t > 0.0, "mixed_norm needs positive exponents");
  if (h.size() == 0) return 0.0;
  std::vector<double> pointwise(static_cast<std::size_t>(h.N()), 0.0);
  for (const auto& [w, sig] : h.entries()) {
    const auto v = sig.values();
    for (std::size_t m = 0; m < pointwise.size(); ++m) {
      const double a = std::abs(v[m]);
      pointwise[m] = std::isinf(t) ? std::max(pointwise[m], a) : pointwise[m] + std::pow(a, t);
    }
  }
  if (!std::isinf(t))
    for (auto& v : pointwise) v = std::pow(v, 1.0 / t);
  return lp_norm(pointwise, s);
}

}  // namespace rdflab
