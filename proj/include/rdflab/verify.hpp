#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rdflab/decompose.hpp"
#include "rdflab/generators.hpp"
#include "rdflab/multiplier.hpp"
#include "rdflab/operators.hpp"
#include "rdflab/tile_analysis.hpp"
#include "rdflab/trilinear.hpp"

namespace rdflab {

/// Outcome of one self-check suite. Checks are seeded and deterministic.
struct SuiteResult {
  std::string name;
  int checks = 0;
  std::vector<std::string> failures;
  double worst = 0.0;  // largest observed error or excess

  bool ok() const { return failures.empty(); }

  void expect(bool cond, const std::string& what) {
    ++checks;
    if (!cond && failures.size() < 20) failures.push_back(what);
  }
  void expect_le(double value, double bound, const std::string& what) {
    worst = std::max(worst, value - bound > 0 ? value - bound : 0.0);
    std::ostringstream os;
    os << what << ": " << value << " > " << bound;
    expect(value <= bound, os.str());
  }
};

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"projections", "carleson-oracle", "variation-oracle",
                                                 "tiles",       "decompositions",  "multiplier"};
  return names;
}

namespace detail {

inline std::vector<cd> gaussian_values(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cd> v(static_cast<std::size_t>(N));
  for (auto& x : v) x = {nd(rng), nd(rng)};
  return v;
}

inline cd twiddle(std::int64_t xi, int m, int N) {
  return std::polar(1.0, 2.0 * std::numbers::pi * positive_mod(xi * m, N) / N);
}

inline double max_diff(std::span<const cd> a, std::span<const cd> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Disjoint squares with omega1 drawn from a few columns, so tiles relate.
inline SquareCollection clustered_squares(int L, int attempts, int max_k, std::mt19937_64& rng) {
  std::vector<DyadicSquare> out;
  for (int a = 0; a < attempts; ++a) {
    const int k = static_cast<int>(rng() % static_cast<unsigned>(max_k + 1));
    const int slots = 1 << (L - k);
    const auto w = make_square(k, static_cast<int>(rng() % static_cast<unsigned>(std::min(slots, 4))),
                               static_cast<int>(rng() % static_cast<unsigned>(slots)), L);
    bool ok = true;
    for (const auto& o : out) ok = ok && !o.intersects(w);
    if (ok) out.push_back(w);
  }
  return validate_collection(std::move(out), L);
}

inline VectorFunction gaussian_h(const SquareCollection& omega, std::mt19937_64& rng) {
  std::map<DyadicSquare, Signal> e;
  for (const auto& w : omega) e.emplace(w, Signal(gaussian_values(omega.N(), rng)));
  return VectorFunction(omega, std::move(e));
}

inline TilePopulation sampled_population(const SquareCollection& omega, std::size_t max_tiles, std::mt19937_64& rng) {
  auto full = tiles_for(omega);
  std::vector<std::size_t> idx = all_indices(full.size());
  std::shuffle(idx.begin(), idx.end(), rng);
  if (idx.size() > max_tiles) idx.resize(max_tiles);
  std::sort(idx.begin(), idx.end());
  return full.subset(idx);
}

inline SuiteResult suite_projections(std::uint64_t seed, int trials) {
  SuiteResult r;
  r.name = "projections";
  std::mt19937_64 rng(splitmix64(seed, 11));
  const int N = 64, L = 6;
  for (int t = 0; t < trials; ++t) {
    const auto v = gaussian_values(N, rng);
    const Signal f(v);
    const auto spec = f.spectrum();
    std::vector<cd> naive(static_cast<std::size_t>(N));
    for (int xi = 0; xi < N; ++xi) {
      for (int m = 0; m < N; ++m) naive[static_cast<std::size_t>(xi)] += v[static_cast<std::size_t>(m)] * twiddle(-xi, m, N);
      naive[static_cast<std::size_t>(xi)] /= N;
    }
    r.expect_le(max_diff(spec, naive), 1e-12, "forward transform vs direct sum");
    r.expect_le(max_diff(fft::inverse(spec), v), 1e-12, "round trip");
    double e1 = 0, e2 = 0;
    for (const auto& x : v) e1 += std::norm(x);
    for (const auto& c : spec) e2 += std::norm(c);
    r.expect_le(std::abs(e1 / N - e2), 1e-10 * e2, "Plancherel");
    // Random dyadic partition of the frequencies.
    std::vector<DyadicInterval> parts = {make_interval(L, 0, L)};
    for (int s = 0; s < 6; ++s) {
      const auto i = rng() % parts.size();
      if (parts[i].k == 0) continue;
      const auto I = parts[i];
      parts[i] = {I.k - 1, 2 * I.n, L};
      parts.push_back({I.k - 1, 2 * I.n + 1, L});
    }
    std::vector<cd> sum(static_cast<std::size_t>(N));
    for (const auto& I : parts) {
      const auto p = project(f, I);
      r.expect_le(max_diff(project(p, I).values(), p.values()), 1e-10, "idempotence on " + describe(I));
      for (int m = 0; m < N; ++m) sum[static_cast<std::size_t>(m)] += p[static_cast<std::size_t>(m)];
    }
    r.expect_le(max_diff(sum, v), 1e-10, "partition completeness");
    const Signal g(gaussian_values(N, rng));
    const int k = static_cast<int>(rng() % 4);
    const auto w = make_square(k, static_cast<int>(rng() % (1u << (L - k))), static_cast<int>(rng() % (1u << (L - k))), L);
    const auto bp = bilinear_project(f, g, w);
    const auto gs = g.spectrum();
    double d = 0.0;
    for (int m = 0; m < N; ++m) {
      cd acc = 0;
      for (int xi = w.omega1.begin(); xi < w.omega1.end(); ++xi)
        for (int eta = w.omega2.begin(); eta < w.omega2.end(); ++eta)
          acc += spec[static_cast<std::size_t>(xi)] * gs[static_cast<std::size_t>(eta)] * twiddle(xi + eta, m, N);
      d = std::max(d, std::abs(acc - bp[static_cast<std::size_t>(m)]));
    }
    r.expect_le(d, 1e-10, "bilinear projection vs double sum on " + describe(w));
  }
  return r;
}

inline SuiteResult suite_carleson(std::uint64_t seed, int trials) {
  SuiteResult r;
  r.name = "carleson-oracle";
  std::mt19937_64 rng(splitmix64(seed, 12));
  const int N = 32;
  for (int t = 0; t < trials; ++t) {
    const Signal f(gaussian_values(N, rng));
    const auto C = carleson(f);
    const auto spec = f.spectrum();
    for (int m = 0; m < N; ++m) {
      double best = 0.0;
      for (int a = 0; a < N; ++a) {
        cd acc = 0;
        for (int b = a; b < N; ++b) {
          acc += spec[static_cast<std::size_t>(b)] * twiddle(b, m, N);
          best = std::max(best, std::abs(acc));
        }
      }
      r.expect_le(std::abs(C[static_cast<std::size_t>(m)] - best), 1e-12 * std::max(1.0, best),
                  "Carleson at x = " + std::to_string(m));
    }
  }
  return r;
}

inline SuiteResult suite_variation(std::uint64_t seed, int trials) {
  SuiteResult r;
  r.name = "variation-oracle";
  std::mt19937_64 rng(splitmix64(seed, 13));
  const int N = 64;
  for (int t = 0; t < trials; ++t) {
    const Signal f(gaussian_values(N, rng));
    std::vector<int> pts;
    for (int i = 0; i < 9; ++i) pts.push_back(1 + static_cast<int>(rng() % (N - 1)));
    const auto grid = CutGrid::custom(N, pts);
    const double rr = 2.0 + (t % 3) * 0.75;
    const auto V = var_carleson(f, rr, grid);
    const auto spec = f.spectrum();
    const int K = static_cast<int>(grid.size());
    for (int m = 0; m < N; m += 7) {
      std::vector<cd> v(static_cast<std::size_t>(K));
      for (int i = 0; i < K; ++i)
        for (int xi = 0; xi < grid.cuts()[static_cast<std::size_t>(i)]; ++xi)
          v[static_cast<std::size_t>(i)] += spec[static_cast<std::size_t>(xi)] * twiddle(xi, m, N);
      double best = 0.0;
      for (unsigned mask = 0; mask < (1u << K); ++mask) {
        double s = 0.0;
        int prev = -1;
        for (int i = 0; i < K; ++i) {
          if (!(mask >> i & 1u)) continue;
          if (prev >= 0) s += std::pow(std::abs(v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(prev)]), rr);
          prev = i;
        }
        best = std::max(best, s);
      }
      best = std::pow(best, 1.0 / rr);
      r.expect_le(std::abs(V[static_cast<std::size_t>(m)] - best), 1e-10 * std::max(1.0, best),
                  "variation at x = " + std::to_string(m));
    }
  }
  return r;
}

inline SuiteResult suite_tiles(std::uint64_t seed, int trials) {
  SuiteResult r;
  r.name = "tiles";
  std::mt19937_64 rng(splitmix64(seed, 14));
  for (int t = 0; t < trials; ++t) {
    const auto omega = clustered_squares(6, 10, 4, rng);
    const auto pop = sampled_population(omega, 14, rng);
    for (auto o : {Orientation::column, Orientation::row}) {
      const int j = order_index(o);
      const int n = static_cast<int>(pop.size());
      // Tiles sharing a j-th tile are comparable both ways, so at most one is kept.
      std::int64_t best = 0;
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool anti = true;
        std::int64_t weight = 0;
        for (int u = 0; u < n && anti; ++u) {
          if (!(mask >> u & 1u)) continue;
          const auto& P = pop[static_cast<std::size_t>(u)];
          weight += P.I.length();
          for (int v = u + 1; v < n && anti; ++v) {
            const auto& Q = pop[static_cast<std::size_t>(v)];
            if ((mask >> v & 1u) && (tile_order(P, Q, j) || tile_order(Q, P, j))) anti = false;
          }
        }
        if (anti) best = std::max(best, weight);
      }
      const auto ac = heavy_antichain(pop, all_indices(pop.size()), o);
      r.expect(ac.first == best, "antichain weight " + std::to_string(ac.first) + " vs brute force " +
                                     std::to_string(best));
    }
    const Signal f(gaussian_values(omega.N(), rng)), g(gaussian_values(omega.N(), rng));
    const auto h = gaussian_h(omega, rng);
    const auto c = coefficients(f, g, h, pop, 2.5, 3.0);
    for (auto o : {Orientation::column, Orientation::row}) {
      const auto ex = energy12(pop, c, o, EnergyMode::exact);
      const auto gr = energy12(pop, c, o, EnergyMode::greedy);
      r.expect_le(gr.value, ex.value * (1 + 1e-12), "greedy energy exceeds exact");
      r.expect(!family_violation(pop, ex.family).has_value(), "exact energy family is not mutually disjoint");
    }
  }
  return r;
}

inline SuiteResult suite_decompositions(std::uint64_t seed, int trials) {
  SuiteResult r;
  r.name = "decompositions";
  std::mt19937_64 rng(splitmix64(seed, 15));
  for (int t = 0; t < trials; ++t) {
    const auto omega = clustered_squares(6, 12, 4, rng);
    const auto pop = sampled_population(omega, 120, rng);
    const Signal f(gaussian_values(omega.N(), rng)), g(gaussian_values(omega.N(), rng));
    const auto h = gaussian_h(omega, rng);
    const auto c = coefficients(f, g, h, pop, 2.5, 3.0);
    const Size3Evaluator ev(pop, h, 3.0);
    const auto d = global_decompose(pop, c, ev);
    std::vector<int> seen(pop.size(), 0);
    for (const auto& st : d.steps) {
      const auto v = family_violation(pop, st.family);
      r.expect(!v.has_value(), "step family at level " + std::to_string(st.level) + ": " + v.value_or(""));
      for (const auto& tr : st.family)
        for (auto m : tr.members) ++seen[m];
    }
    for (auto i : d.residual) ++seen[i];
    r.expect(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }),
             "levels and residual do not partition the population");
    if (d.report.E1 > 0) {
      const int n = static_cast<int>(std::floor(-std::log2(d.report.S1 / d.report.E1)));
      const auto d1 = decompose_size1(pop, c, n, d.report.E1);
      r.expect_le(size_j(c, Orientation::column, &d1.low), std::ldexp(d.report.E1, -n - 1) * (1 + 1e-12),
                  "Size1 of the low part");
      for (const auto& tr : d1.family)
        for (auto m : tr.members) r.expect(c.f[m] > d1.threshold, "extracted tile below threshold");
    }
  }
  return r;
}

inline SuiteResult suite_multiplier(std::uint64_t seed, int trials) {
  SuiteResult r;
  r.name = "multiplier";
  std::mt19937_64 rng(splitmix64(seed, 16));
  for (int t = 0; t < trials; ++t) {
    const double beta = 0.6 + 1.2 * (t % 5) / 5.0;
    const auto fam = random_family(7, 10, 4, beta, rng, 0.3, 1.0);
    const Signal f(gaussian_values(fam.N(), rng)), g(gaussian_values(fam.N(), rng));
    const auto a = apply_multiplier(f, g, fam, MultiplierMode::grouped);
    const auto b = apply_multiplier(f, g, fam, MultiplierMode::naive);
    double scale = 1.0;
    for (const auto& x : b.values()) scale = std::max(scale, std::abs(x));
    r.expect_le(max_diff(a.values(), b.values()), 1e-10 * scale, "grouped vs naive");
    const auto cc = check_carleson(fam);
    r.expect(cc.ok, "generated family fails the Carleson condition: " + cc.reason);
    for (const auto& [n, bin] : magnitude_partition(fam)) {
      r.expect_le(static_cast<double>(bin.size()), std::pow(2.0, beta * (n + 1)), "bin cardinality");
      r.expect_le(static_cast<double>(generational_decomposition(bin, fam.L()).size()),
                  std::ceil(cc.C * std::pow(2.0, beta)), "generational layers");
    }
    {
      const double rr = beta <= 1.0 ? 3.0 : 1.0 + 0.5 * beta / (beta - 1.0);
      const auto rep = bound_pipeline(f, g, fam, rr, 2.5, 2.5);
      r.expect_le(rep.max_pointwise_excess, 1e-9, "pointwise Hoelder chain");
      r.expect_le(rep.mean_abs, rep.majorant, "majorant");
    }
  }
  return r;
}

}  // namespace detail

/// Runs one named suite; throws ValidationError for an unknown name.
inline SuiteResult run_verify_suite(const std::string& name, std::uint64_t seed = 1, int trials = 10) {
  static const std::map<std::string, std::function<SuiteResult(std::uint64_t, int)>> table = {
      {"projections", detail::suite_projections}, {"carleson-oracle", detail::suite_carleson},
      {"variation-oracle", detail::suite_variation}, {"tiles", detail::suite_tiles},
      {"decompositions", detail::suite_decompositions}, {"multiplier", detail::suite_multiplier}};
  const auto it = table.find(name);
  if (it == table.end()) throw ValidationError("unknown verify suite '" + name + "'");
  return it->second(seed, trials);
}

}  // namespace rdflab
