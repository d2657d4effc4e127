#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rdflab/exponents.hpp"
#include "rdflab/fft.hpp"
#include "rdflab/generators.hpp"
#include "rdflab/operators.hpp"
#include "rdflab/signal.hpp"

namespace rdflab {

struct SearchConfig {
  int restarts = 20;
  int iterations = 400;  // per restart; one iteration perturbs f, then g
  double step0 = 0.5;    // relative spectral step, decays geometrically to step_min
  double step_min = 1e-3;
  std::uint64_t seed = 1;
  int N = 512;
  CutMode cuts = CutMode::full;  // grid for the variational companion checks in verify
  int threads = 0;               // 0: hardware concurrency
};

struct ExperimentRecord {
  std::string generator;
  int K = 0;
  int N = 0;
  ExponentTuple tuple;
  double ratio = 0.0;
  int restarts = 0;
  int iterations = 0;  // accepted plus rejected proposals, summed over restarts
  std::uint64_t seed = 0;
  double millis = 0.0;
  std::vector<double> restart_best;  // best ratio of restart i alone
};

/// ||T^r_Omega(f, g)||_s / (||f||_p ||g||_q) evaluated directly.
inline double norm_ratio(const Signal& f, const Signal& g, const SquareCollection& omega, const ExponentTuple& t) {
  const double den = lp_norm(f, t.p) * lp_norm(g, t.q);
  if (omega.empty() || den == 0.0) return 0.0;
  return lp_norm(t_r(f, g, omega, t.r), t.s) / den;
}

namespace detail {

// Cached |pi_I u| over the distinct intervals of one side of Omega.
struct SideState {
  std::vector<cd> spectrum;
  std::vector<std::vector<double>> proj;
  double norm = 0.0;
};

class RatioObjective {
 public:
  RatioObjective(const SquareCollection& omega, const ExponentTuple& t) : t_(t), N_(omega.N()) {
    std::map<DyadicInterval, std::size_t> i1, i2;
    for (const auto& w : omega) {
      const auto a = i1.emplace(w.omega1, i1.size()).first->second;
      const auto b = i2.emplace(w.omega2, i2.size()).first->second;
      pairs_.emplace_back(a, b);
    }
    side1_.resize(i1.size());
    side2_.resize(i2.size());
    for (const auto& [I, k] : i1) side1_[k] = I;
    for (const auto& [I, k] : i2) side2_[k] = I;
    shadow1_ = shadow(side1_);
    shadow2_ = shadow(side2_);
  }

  int N() const { return N_; }
  const std::vector<int>& shadow(int j) const { return j == 1 ? shadow1_ : shadow2_; }

  SideState state(int j, std::vector<cd> spec) const {
    const auto& ivs = j == 1 ? side1_ : side2_;
    SideState s;
    s.proj.reserve(ivs.size());
    for (const auto& I : ivs) {
      const auto v = project_spectrum(spec, I);
      std::vector<double> mag(v.size());
      for (std::size_t m = 0; m < v.size(); ++m) mag[m] = std::abs(v[m]);
      s.proj.push_back(std::move(mag));
    }
    s.norm = lp_norm(fft::inverse(spec), j == 1 ? t_.p : t_.q);
    s.spectrum = std::move(spec);
    return s;
  }

  double ratio(const SideState& f, const SideState& g) const {
    const double den = f.norm * g.norm;
    if (pairs_.empty() || den == 0.0) return 0.0;
    std::vector<double> acc(static_cast<std::size_t>(N_), 0.0);
    for (const auto& [a, b] : pairs_) {
      const auto& A = f.proj[a];
      const auto& B = g.proj[b];
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += std::pow(A[m] * B[m], t_.r);
    }
    for (auto& v : acc) v = std::pow(v, 1.0 / t_.r);
    return lp_norm(acc, t_.s) / den;
  }

  // A frequency in the largest number of intervals on side j.
  int best_covered(int j) const {
    const auto& ivs = j == 1 ? side1_ : side2_;
    std::vector<int> cover(static_cast<std::size_t>(N_), 0);
    for (const auto& I : ivs)
      for (int x = I.begin(); x < I.end(); ++x) ++cover[static_cast<std::size_t>(x)];
    return static_cast<int>(std::max_element(cover.begin(), cover.end()) - cover.begin());
  }

 private:
  std::vector<int> shadow(const std::vector<DyadicInterval>& ivs) const {
    std::vector<char> in(static_cast<std::size_t>(N_), 0);
    for (const auto& I : ivs)
      for (int x = I.begin(); x < I.end(); ++x) in[static_cast<std::size_t>(x)] = 1;
    std::vector<int> out;
    for (int x = 0; x < N_; ++x)
      if (in[static_cast<std::size_t>(x)]) out.push_back(x);
    return out;
  }

  ExponentTuple t_;
  int N_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<DyadicInterval> side1_, side2_;
  std::vector<int> shadow1_, shadow2_;
};

inline std::vector<cd> random_spectrum(const std::vector<int>& support, int N, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<cd> spec(static_cast<std::size_t>(N));
  for (int x : support) spec[static_cast<std::size_t>(x)] = {gauss(rng), gauss(rng)};
  return spec;
}

inline std::vector<cd> tone_spectrum(int xi, int N) {
  std::vector<cd> spec(static_cast<std::size_t>(N));
  spec[static_cast<std::size_t>(xi)] = 1.0;
  return spec;
}

inline std::vector<cd> flat_spectrum(const std::vector<int>& support, int N) {
  std::vector<cd> spec(static_cast<std::size_t>(N));
  for (int x : support) spec[static_cast<std::size_t>(x)] = 1.0;
  return spec;
}

// Restart 0: tones at the best-covered frequencies. Restarts 1-3: tone/flat
// combinations over the shadows. Later restarts: Gaussian spectra on the shadows.
inline std::vector<cd> initial_spectrum(const RatioObjective& obj, int j, int restart, std::mt19937_64& rng) {
  const int N = obj.N();
  const bool flat = (restart == 1 && j == 2) || (restart == 2 && j == 1) || restart == 3;
  if (restart <= 3) return flat ? flat_spectrum(obj.shadow(j), N) : tone_spectrum(obj.best_covered(j), N);
  return random_spectrum(obj.shadow(j), N, rng);
}

inline double spectral_l2(const std::vector<cd>& spec) {
  double s = 0.0;
  for (const auto& c : spec) s += std::norm(c);
  return std::sqrt(s);
}

struct RestartResult {
  double best = 0.0;
  int proposals = 0;
};

inline RestartResult run_restart(const RatioObjective& obj, const SearchConfig& cfg, int restart) {
  std::mt19937_64 rng(splitmix64(cfg.seed, static_cast<std::uint64_t>(restart) + 1000));
  SideState f = obj.state(1, initial_spectrum(obj, 1, restart, rng));
  SideState g = obj.state(2, initial_spectrum(obj, 2, restart, rng));
  RestartResult out;
  out.best = obj.ratio(f, g);
  const int iters = std::max(cfg.iterations, 0);
  const double decay = iters > 1 ? std::pow(cfg.step_min / cfg.step0, 1.0 / (iters - 1)) : 1.0;
  double step = cfg.step0;
  for (int it = 0; it < iters; ++it, step *= decay) {
    for (int j = 1; j <= 2; ++j) {
      SideState& cur = j == 1 ? f : g;
      auto dir = random_spectrum(obj.shadow(j), obj.N(), rng);
      const double scale = step * spectral_l2(cur.spectrum) / std::max(spectral_l2(dir), 1e-300);
      auto spec = cur.spectrum;
      for (std::size_t x = 0; x < spec.size(); ++x) spec[x] += scale * dir[x];
      SideState cand = obj.state(j, std::move(spec));
      const double v = j == 1 ? obj.ratio(cand, g) : obj.ratio(f, cand);
      ++out.proposals;
      if (v > out.best) {
        out.best = v;
        cur = std::move(cand);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Best ratio ||T^r_Omega(f, g)||_s / (||f||_p ||g||_q) found by restarted
/// perturb-and-accept ascent. A lower bound for the operator norm only.
/// Restart i draws from its own stream, so results do not depend on the
/// thread count and the best ratio is non-decreasing in the restart count.
inline ExperimentRecord estimate_ratio(const SquareCollection& omega, const ExponentTuple& tuple,
                                       const SearchConfig& cfg, const std::string& generator = "") {
  detail::require(tuple.p > 0 && tuple.q > 0 && tuple.s > 0 && tuple.r >= 1, "invalid exponent tuple");
  detail::require(std::abs(1 / tuple.p + 1 / tuple.q - 1 / tuple.s) <= 1e-12, "exponent tuple violates Hoelder");
  detail::require(cfg.restarts >= 0 && cfg.step0 > 0 && cfg.step_min > 0, "invalid search configuration");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.generator = generator;
  rec.K = static_cast<int>(omega.size());
  rec.N = omega.empty() ? cfg.N : omega.N();
  rec.tuple = tuple;
  rec.restarts = cfg.restarts;
  rec.seed = cfg.seed;
  if (!omega.empty() && cfg.restarts > 0) {
    const detail::RatioObjective obj(omega, tuple);
    std::vector<detail::RestartResult> res(static_cast<std::size_t>(cfg.restarts));
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int workers = std::clamp(cfg.threads > 0 ? cfg.threads : hw, 1, cfg.restarts);
    if (workers == 1) {
      for (int i = 0; i < cfg.restarts; ++i) res[static_cast<std::size_t>(i)] = detail::run_restart(obj, cfg, i);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (int i = w; i < cfg.restarts; i += workers)
            res[static_cast<std::size_t>(i)] = detail::run_restart(obj, cfg, i);
        });
      for (auto& th : pool) th.join();
    }
    for (const auto& r : res) {
      rec.restart_best.push_back(r.best);
      rec.ratio = std::max(rec.ratio, r.best);
      rec.iterations += r.proposals;
    }
  }
  rec.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace rdflab
