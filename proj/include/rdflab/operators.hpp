#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "rdflab/dyadic.hpp"
#include "rdflab/signal.hpp"

namespace rdflab {

/// Modulated prefix sums S_j(x_m) = sum_{xi < j} hat f(xi) e^{2 pi i xi m / N},
/// j = 0..N, so that pi_{[a,b)} f = S_b - S_a. Row-major per grid point.
class PrefixSums {
 public:
  explicit PrefixSums(const Signal& f) : N_(f.size()), data_(static_cast<std::size_t>(N_) * (N_ + 1)) {
    const auto c = f.spectrum();
    std::vector<cd> roots(static_cast<std::size_t>(N_));
    for (int t = 0; t < N_; ++t) roots[static_cast<std::size_t>(t)] = std::polar(1.0, 2.0 * std::numbers::pi * t / N_);
    for (int m = 0; m < N_; ++m) {
      cd* row = &data_[static_cast<std::size_t>(m) * (N_ + 1)];
      row[0] = 0.0;
      for (int xi = 0; xi < N_; ++xi) {
        const auto t = static_cast<std::size_t>((static_cast<std::int64_t>(xi) * m) % N_);
        row[xi + 1] = row[xi] + c[static_cast<std::size_t>(xi)] * roots[t];
      }
    }
  }

  int N() const { return N_; }
  std::span<const cd> at(int m) const {
    return {&data_[static_cast<std::size_t>(m) * (N_ + 1)], static_cast<std::size_t>(N_ + 1)};
  }
  cd operator()(int m, int j) const { return data_[static_cast<std::size_t>(m) * (N_ + 1) + j]; }

 private:
  int N_;
  std::vector<cd> data_;
};

enum class CarlesonMode { calipers, brute_force };

namespace detail {

inline double cross(cd o, cd a, cd b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// Andrew monotone chain, counter-clockwise, collinear points dropped.
inline std::vector<cd> convex_hull(std::vector<cd> pts) {
  std::sort(pts.begin(), pts.end(), [](cd a, cd b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<cd> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Rotating calipers over the antipodal pairs of a convex polygon.
inline double hull_diameter(const std::vector<cd>& hull) {
  const std::size_t h = hull.size();
  if (h < 2) return 0.0;
  if (h == 2) return std::abs(hull[1] - hull[0]);
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t ni = (i + 1) % h;
    while (std::abs(cross(hull[i], hull[ni], hull[(j + 1) % h])) > std::abs(cross(hull[i], hull[ni], hull[j])))
      j = (j + 1) % h;
    best = std::max({best, std::abs(hull[i] - hull[j]), std::abs(hull[ni] - hull[j])});
  }
  return best;
}

}  // namespace detail

/// Diameter of a planar point set.
inline double point_set_diameter(std::span<const cd> pts, CarlesonMode mode = CarlesonMode::calipers) {
  if (mode == CarlesonMode::brute_force) {
    double best = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) best = std::max(best, std::abs(pts[b] - pts[a]));
    return best;
  }
  return detail::hull_diameter(detail::convex_hull({pts.begin(), pts.end()}));
}

/// Cf(x) = max over frequency intervals [a, b) of |pi_{[a,b)} f(x)|.
inline std::vector<double> carleson(const PrefixSums& S, CarlesonMode mode = CarlesonMode::calipers) {
  std::vector<double> out(static_cast<std::size_t>(S.N()));
  for (int m = 0; m < S.N(); ++m) out[static_cast<std::size_t>(m)] = point_set_diameter(S.at(m), mode);
  return out;
}

inline std::vector<double> carleson(const Signal& f, CarlesonMode mode = CarlesonMode::calipers) {
  return carleson(PrefixSums(f), mode);
}

enum class CutMode { full, dyadic, custom };

/// Strictly increasing frequency cuts containing 0 and N.
class CutGrid {
 public:
  static CutGrid full(int N) {
    std::vector<int> c(static_cast<std::size_t>(N + 1));
    for (int i = 0; i <= N; ++i) c[static_cast<std::size_t>(i)] = i;
    return {N, std::move(c), CutMode::full};
  }

  // Endpoints of the dyadic intervals of length 2^k.
  static CutGrid dyadic(int N, int k) {
    detail::require(k >= 0 && (1 << k) <= N, "dyadic cut scale out of range");
    std::vector<int> c;
    for (int i = 0; i <= N; i += 1 << k) c.push_back(i);
    return {N, std::move(c), CutMode::dyadic};
  }

  static CutGrid custom(int N, std::vector<int> points) {
    points.push_back(0);
    points.push_back(N);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    detail::require(points.front() >= 0 && points.back() <= N, "cut point outside [0, N]");
    return {N, std::move(points), CutMode::custom};
  }

  // base plus the endpoints of every omega_j in the collection.
  static CutGrid with_edges(const CutGrid& base, const SquareCollection& omega, int j) {
    std::vector<int> pts = base.cuts_;
    for (const auto& w : omega) {
      pts.push_back(w.omega(j).begin());
      pts.push_back(w.omega(j).end());
    }
    CutGrid g = custom(base.N_, std::move(pts));
    if (g.cuts_ == base.cuts_) g.mode_ = base.mode_;
    return g;
  }

  // Full grid up to N = 256; beyond that 256 dyadic cells plus the omega_j edges.
  static CutGrid default_for(const SquareCollection& omega, int j) {
    const int N = omega.N();
    if (N <= 256) return full(N);
    return with_edges(dyadic(N, exact_log2(N) - 8), omega, j);
  }

  int N() const { return N_; }
  CutMode mode() const { return mode_; }
  const std::vector<int>& cuts() const { return cuts_; }
  std::size_t size() const { return cuts_.size(); }

 private:
  CutGrid(int N, std::vector<int> cuts, CutMode mode) : N_(N), cuts_(std::move(cuts)), mode_(mode) {}

  int N_;
  std::vector<int> cuts_;
  CutMode mode_;
};

namespace detail {

inline double pow_abs(cd z, double r) {
  const double n = std::norm(z);
  if (n == 0.0) return 0.0;
  if (r == 2.0) return n;
  return std::pow(n, 0.5 * r);
}

// max over increasing index chains of sum |v_{i_{t+1}} - v_{i_t}|^r.
inline double variation_dp(std::span<const cd> v, double r, std::vector<double>& D) {
  const std::size_t M = v.size();
  D.assign(M, 0.0);
  for (std::size_t j = 1; j < M; ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < j; ++i) best = std::max(best, D[i] + pow_abs(v[j] - v[i], r));
    D[j] = best;
  }
  return *std::max_element(D.begin(), D.end());
}

}  // namespace detail

/// V^r f(x) = sup over increasing cut chains of (sum_t |pi_{[c_t, c_{t+1})} f(x)|^r)^(1/r), exact on the grid.
inline std::vector<double> var_carleson(const PrefixSums& S, double r, const CutGrid& cuts) {
  detail::require(r > 1.0, "var_carleson needs r > 1");
  detail::require(cuts.N() == S.N(), "cut grid on a different torus");
  std::vector<double> out(static_cast<std::size_t>(S.N()));
  std::vector<cd> v(cuts.size());
  std::vector<double> D;
  for (int m = 0; m < S.N(); ++m) {
    const auto row = S.at(m);
    for (std::size_t i = 0; i < cuts.size(); ++i) v[i] = row[static_cast<std::size_t>(cuts.cuts()[i])];
    out[static_cast<std::size_t>(m)] = std::pow(detail::variation_dp(v, r, D), 1.0 / r);
  }
  return out;
}

inline std::vector<double> var_carleson(const Signal& f, double r, const CutGrid& cuts) {
  return var_carleson(PrefixSums(f), r, cuts);
}

/// Pointwise l^r aggregate of sharp projections over pairwise disjoint intervals.
inline std::vector<double> rdf(const Signal& f, const std::vector<CyclicInterval>& intervals, double r) {
  detail::require(r >= 1.0, "rdf needs r >= 1");
  const int N = f.size();
  std::vector<char> used(static_cast<std::size_t>(N), 0);
  for (const auto& I : intervals) {
    detail::require(I.N == N, "rdf interval on a different grid");
    for (int x : I.points()) {
      detail::require(!used[static_cast<std::size_t>(x)], "rdf intervals overlap at frequency " + std::to_string(x));
      used[static_cast<std::size_t>(x)] = 1;
    }
  }
  std::vector<double> acc(static_cast<std::size_t>(N), 0.0);
  for (const auto& I : intervals) {
    const auto p = project_spectrum(f.spectrum(), I);
    for (std::size_t m = 0; m < acc.size(); ++m) {
      const double a = std::abs(p[m]);
      acc[m] = std::isinf(r) ? std::max(acc[m], a) : acc[m] + std::pow(a, r);
    }
  }
  if (!std::isinf(r))
    for (auto& a : acc) a = std::pow(a, 1.0 / r);
  return acc;
}

inline std::vector<double> rdf(const Signal& f, const std::vector<DyadicInterval>& intervals, double r) {
  std::vector<CyclicInterval> cyc;
  for (const auto& I : intervals) cyc.push_back(CyclicInterval::from(I));
  return rdf(f, cyc, r);
}

/// Memoized sharp projections of one spectrum onto dyadic intervals.
class ProjectionCache {
 public:
  explicit ProjectionCache(const Signal& f) : f_(f) {}

  const std::vector<cd>& get(const DyadicInterval& I) {
    auto it = cache_.find(I);
    if (it == cache_.end()) it = cache_.emplace(I, project_spectrum(f_.spectrum(), I)).first;
    return it->second;
  }

 private:
  Signal f_;
  std::map<DyadicInterval, std::vector<cd>> cache_;
};

/// T^r_Omega(f, g)(x) = (sum_omega |pi_omega(f, g)(x)|^r)^(1/r); the supremum for r = inf.
inline std::vector<double> t_r(const Signal& f, const Signal& g, const SquareCollection& omega, double r) {
  detail::require(r >= 1.0, "t_r needs r >= 1");
  detail::require(f.size() == g.size() && (omega.empty() || omega.N() == f.size()), "t_r: grid mismatch");
  std::vector<double> acc(static_cast<std::size_t>(f.size()), 0.0);
  ProjectionCache pf(f), pg(g);
  for (const auto& w : omega) {
    const auto& a = pf.get(w.omega1);
    const auto& b = pg.get(w.omega2);
    for (std::size_t m = 0; m < acc.size(); ++m) {
      const double v = std::abs(a[m]) * std::abs(b[m]);
      acc[m] = std::isinf(r) ? std::max(acc[m], v) : acc[m] + std::pow(v, r);
    }
  }
  if (!std::isinf(r))
    for (auto& a : acc) a = std::pow(a, 1.0 / r);
  return acc;
}

/// Mf(x) = max over dyadic spatial intervals I containing x of the mean of |f| on I.
inline std::vector<double> dyadic_maximal(std::span<const double> values) {
  const std::size_t N = values.size();
  detail::require(is_power_of_two(static_cast<std::int64_t>(N)), "dyadic_maximal needs a power-of-two grid");
  std::vector<double> level(N), out(N);
  for (std::size_t m = 0; m < N; ++m) out[m] = level[m] = std::abs(values[m]);
  for (std::size_t len = 2; len <= N; len *= 2) {
    // level holds block sums of the previous length; fold pairs.
    const std::size_t blocks = N / len;
    for (std::size_t b = 0; b < blocks; ++b) level[b] = level[2 * b] + level[2 * b + 1];
    for (std::size_t m = 0; m < N; ++m) out[m] = std::max(out[m], level[m / len] / static_cast<double>(len));
  }
  return out;
}

inline std::vector<double> dyadic_maximal(const Signal& f) { return dyadic_maximal(f.magnitudes()); }

using Mask = std::vector<char>;

inline int mask_count(const Mask& m) { return static_cast<int>(std::count(m.begin(), m.end(), char{1})); }
inline double mask_measure(const Mask& m) { return m.empty() ? 0.0 : static_cast<double>(mask_count(m)) / m.size(); }

struct ExceptionalParams {
  double p_exp = 0.0;  // exponent on Cf; 4 r0 when left at 0
  double q_exp = 0.0;  // exponent on Cg; 4 r0 when left at 0
  double r0 = 2.5;
  double K = 4.0;
  int max_rounds = 8;
  std::optional<CutGrid> cuts;  // full grid when unset
};

struct ExceptionalSetReport {
  Mask E;
  Mask H_prime;
  std::array<Mask, 4> parts;  // M|Cf|^p, M|Cg|^q, M(V f)^r0, M(V g)^r0 threshold sets
  double measure_E = 0.0;
  double measure_H = 0.0;
  double measure_H_prime = 0.0;
  double K = 0.0;
  int rounds = 0;
  bool success = false;
};

namespace detail {

inline void require_dominated(const Signal& f, const Mask& F, const char* name) {
  for (int m = 0; m < f.size(); ++m) {
    const double bound = F[static_cast<std::size_t>(m)] ? 1.0 : 0.0;
    require(std::abs(f[static_cast<std::size_t>(m)]) <= bound + 1e-12,
            std::string("|") + name + "| is not dominated by its indicator at grid point " + std::to_string(m));
  }
}

inline std::vector<double> powered(const std::vector<double>& v, double p) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::pow(v[i], p);
  return out;
}

}  // namespace detail

/// E = union of the four super-level sets at K|F|/|H| and K|G|/|H|; H' = H \ E.
/// K doubles while |H'| <= |H|/2, for at most max_rounds rounds.
inline ExceptionalSetReport exceptional_set(const Signal& f, const Signal& g, const Mask& F, const Mask& G,
                                            const Mask& H, const ExceptionalParams& params = {}) {
  const int N = f.size();
  detail::require(g.size() == N && F.size() == static_cast<std::size_t>(N) && G.size() == F.size() &&
                      H.size() == F.size(),
                  "exceptional_set: grid mismatch");
  detail::require(mask_count(F) > 0 && mask_count(G) > 0 && mask_count(H) > 0, "exceptional_set needs nonempty F, G, H");
  detail::require(params.r0 > 1.0 && params.K > 0.0 && params.max_rounds >= 1, "exceptional_set: bad parameters");
  detail::require_dominated(f, F, "f");
  detail::require_dominated(g, G, "g");

  const double pe = params.p_exp > 0 ? params.p_exp : 4.0 * params.r0;
  const double qe = params.q_exp > 0 ? params.q_exp : 4.0 * params.r0;
  const CutGrid cuts = params.cuts.value_or(CutGrid::full(N));
  const PrefixSums Sf(f), Sg(g);
  const std::array<std::vector<double>, 4> maximal = {
      dyadic_maximal(detail::powered(carleson(Sf), pe)),
      dyadic_maximal(detail::powered(carleson(Sg), qe)),
      dyadic_maximal(detail::powered(var_carleson(Sf, params.r0, cuts), params.r0)),
      dyadic_maximal(detail::powered(var_carleson(Sg, params.r0, cuts), params.r0)),
  };
  const double ratioF = static_cast<double>(mask_count(F)) / mask_count(H);
  const double ratioG = static_cast<double>(mask_count(G)) / mask_count(H);
  const std::array<double, 4> ratios = {ratioF, ratioG, ratioF, ratioG};

  ExceptionalSetReport rep;
  rep.measure_H = mask_measure(H);
  double K = params.K;
  for (int round = 1; round <= params.max_rounds; ++round, K *= 2.0) {
    rep.E.assign(static_cast<std::size_t>(N), 0);
    for (int i = 0; i < 4; ++i) {
      auto& part = rep.parts[static_cast<std::size_t>(i)];
      part.assign(static_cast<std::size_t>(N), 0);
      const double thr = K * ratios[static_cast<std::size_t>(i)];
      for (std::size_t m = 0; m < part.size(); ++m)
        if (maximal[static_cast<std::size_t>(i)][m] > thr) part[m] = rep.E[m] = 1;
    }
    rep.H_prime.assign(static_cast<std::size_t>(N), 0);
    for (std::size_t m = 0; m < H.size(); ++m) rep.H_prime[m] = H[m] && !rep.E[m];
    rep.measure_E = mask_measure(rep.E);
    rep.measure_H_prime = mask_measure(rep.H_prime);
    rep.K = K;
    rep.rounds = round;
    if (2 * mask_count(rep.H_prime) > mask_count(H)) {
      rep.success = true;
      break;
    }
  }
  return rep;
}

}  // namespace rdflab
