#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "rdflab/decompose.hpp"
#include "rdflab/trilinear.hpp"

using namespace rdflab;

namespace {

std::vector<std::size_t> all_of(const TilePopulation& pop) { return detail::all_indices(pop.size()); }

TilePopulation single_square_population(const DyadicSquare& w, int L) {
  return tiles_for(validate_collection({w}, L));
}

// Best 2^{floor log2 min value} (sum |I_Top|)^{1/r'} over every family of
// mutually disjoint rows and columns of a tiny population.
double exhaustive_energy3(const Size3Evaluator& ev) {
  const auto& pop = ev.population();
  const int n = static_cast<int>(pop.size());
  double best = 0.0;
  std::vector<int> role(static_cast<std::size_t>(n), 0);  // 0 none, 1 column top, 2 row top
  std::function<void(int)> pick_tops = [&](int i) {
    if (i == n) {
      std::vector<std::size_t> tops;
      for (int t = 0; t < n; ++t)
        if (role[static_cast<std::size_t>(t)]) tops.push_back(static_cast<std::size_t>(t));
      if (tops.empty()) return;
      for (std::size_t a = 0; a < tops.size(); ++a)
        for (std::size_t b = a + 1; b < tops.size(); ++b) {
          const int ra = role[tops[a]], rb = role[tops[b]];
          if (ra == rb && tiles_intersect(pop[tops[a]], pop[tops[b]], ra)) return;
        }
      std::vector<TileTree> fam;
      for (auto t : tops) fam.push_back({t, {t}, role[t] == 1 ? Orientation::column : Orientation::row});
      std::vector<std::size_t> rest;
      for (int t = 0; t < n; ++t)
        if (!role[static_cast<std::size_t>(t)]) rest.push_back(static_cast<std::size_t>(t));
      std::function<void(std::size_t)> assign = [&](std::size_t k) {
        if (k == rest.size()) {
          double lo = kInfinity, measure = 0.0;
          for (const auto& tr : fam) {
            lo = std::min(lo, ev.tree_value(tr));
            measure += pop[tr.top].spatial_length();
          }
          if (lo > 0.0) best = std::max(best, std::ldexp(1.0, detail::floor_log2(lo)) * std::pow(measure, 1.0 / ev.dual()));
          return;
        }
        assign(k + 1);
        for (auto& tr : fam)
          if (tile_order(pop[rest[k]], pop[tr.top], tr.orientation)) {
            tr.members.push_back(rest[k]);
            assign(k + 1);
            tr.members.pop_back();
          }
      };
      assign(0);
      return;
    }
    for (int r : {0, 1, 2}) {
      role[static_cast<std::size_t>(i)] = r;
      pick_tops(i + 1);
    }
    role[static_cast<std::size_t>(i)] = 0;
  };
  pick_tops(0);
  return best;
}

}  // namespace

TEST(Coefficients, Examples) {
  const int L = 5, N = 32;
  const auto w = make_square(2, 0, 1, L);  // omega1 = [0,4) contains 0
  const auto pop = single_square_population(w, L);
  const auto h = inst::zero_h(pop.collection());
  const auto c = coefficients(Signal::constant(N, 1.0), Signal::tone(N, 9), h, pop, 2.5, 3.0);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    EXPECT_NEAR(c.f[i], 1.0, 1e-12);
    EXPECT_NEAR(c.g[i], 0.0, 1e-12);  // 9 is outside omega2 = [4,8)
    EXPECT_EQ(c.h[i], 0.0);
  }
}

TEST(Coefficients, MatchQuadrature) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 4; ++trial) {
    const auto in = inst::random_instance(5, 40, rng);
    const auto cf = spectrum(in.f), cg = spectrum(in.g);
    for (std::size_t i = 0; i < in.pop.size(); ++i) {
      const auto& P = in.pop[i];
      const double f1 = oracle::band_average(cf, P.square.omega1.begin(), P.square.omega1.end(), P.I.begin(), P.I.end(), 2.5);
      const double g2 = oracle::band_average(cg, P.square.omega2.begin(), P.square.omega2.end(), P.I.begin(), P.I.end(), 2.5);
      ASSERT_NEAR(in.c.f[i], f1, 1e-10 * (1 + f1));
      ASSERT_NEAR(in.c.g[i], g2, 1e-10 * (1 + g2));
    }
  }
}

TEST(Sizes, Size12Examples) {
  TileCoefficients c;
  EXPECT_EQ(size_j(c, Orientation::column), 0.0);
  c.f = {0.7};
  c.g = {0.2};
  EXPECT_EQ(size_j(c, Orientation::column), 0.7);
  EXPECT_EQ(size_j(c, Orientation::row), 0.2);
}

TEST(Sizes, Size1BelowCarlesonAverage) {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = inst::random_instance(6, 200, rng);
    const auto C = carleson(in.f);
    double rhs = 0.0;
    for (const auto& P : in.pop) {
      double s = 0.0;
      for (int x = P.I.begin(); x < P.I.end(); ++x) s += std::pow(C[static_cast<std::size_t>(x)], 2.5);
      rhs = std::max(rhs, std::pow(s / P.I.length(), 1 / 2.5));
    }
    EXPECT_LE(size1(in.pop, in.c), rhs * (1 + 1e-9));
  }
}

TEST(Phi, InsideAtLeastHalfAndOverlap) {
  const int L = 6, N = 64;
  const auto w = make_square(2, 1, 3, L);
  for (int k = 4; k <= L; ++k)
    for (int n = 0; n < (1 << (L - k)); ++n) {
      const DyadicInterval I{k, n, L};
      for (int z = I.begin(); z < I.end(); ++z) ASSERT_GE(phi_omega(I, w, z, 10), 0.5);
    }
  // Disjoint tiling by the smallest admissible intervals is the extreme case.
  for (int z = 0; z < N; ++z) {
    double s = 0.0;
    for (int n = 0; n < 4; ++n) s += phi_omega({4, n, L}, w, z, 10);
    EXPECT_LE(s, 4.0);
  }
}

TEST(Sizes, Size3Examples) {
  const int L = 5, N = 32;
  const auto w = make_square(3, 0, 1, L);
  const auto pop = single_square_population(w, L);
  EXPECT_EQ(size3(pop, inst::zero_h(pop.collection()), 3.0), 0.0);
  std::mt19937_64 rng(103);
  const auto h = inst::random_h(pop.collection(), rng);
  auto h2 = h.entries();
  for (auto& [sq, sig] : h2) {
    std::vector<cd> v(sig.values().begin(), sig.values().end());
    for (auto& x : v) x *= 2.0;
    sig = Signal(std::move(v));
  }
  EXPECT_NEAR(size3(pop, VectorFunction(pop.collection(), h2), 3.0), 2 * size3(pop, h, 3.0), 1e-12);

  // A single tile with h = indicator of I_P.
  const auto one = pop.subset({1});
  const auto& P = one[0];
  std::vector<cd> ind(N);
  for (int x = P.I.begin(); x < P.I.end(); ++x) ind[static_cast<std::size_t>(x)] = 1.0;
  const VectorFunction hi(one.collection(), {{w, Signal(ind)}});
  const double rp = dual_exponent(3.0);
  double quad = 0.0;
  for (int x = P.I.begin(); x < P.I.end(); ++x) quad += phi(P.I, x, 10);
  const double expect = std::pow(quad / P.I.length(), 1 / rp);
  EXPECT_NEAR(size3(one, hi, 3.0), expect, 1e-12);
  EXPECT_GE(expect, std::pow(0.5, 1 / rp));
}

TEST(Sizes, Size3MaximalDominatesSubFamilies) {
  std::mt19937_64 rng(104);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = inst::random_instance(5, 8, rng);
    const Size3Evaluator ev(in.pop, in.h, 3.0);
    const auto all = std::vector<char>(in.pop.size(), 1);
    double best = 0.0;
    for (std::size_t t = 0; t < in.pop.size(); ++t)
      for (auto o : {Orientation::column, Orientation::row}) {
        std::vector<std::size_t> below;
        for (std::size_t q = 0; q < in.pop.size(); ++q)
          if (q != t && tile_order(in.pop[q], in.pop[t], o)) below.push_back(q);
        const double maximal = ev.value(t, o, all);
        for (unsigned mask = 0; mask < (1u << below.size()); ++mask) {
          TileTree tr{t, {t}, o};
          for (std::size_t b = 0; b < below.size(); ++b)
            if (mask >> b & 1u) tr.members.push_back(below[b]);
          const double v = ev.tree_value(tr);
          ASSERT_LE(v, maximal * (1 + 1e-12));
          best = std::max(best, v);
        }
      }
    EXPECT_NEAR(ev.size(), best, 1e-12 * (1 + best));
  }
}

TEST(Sizes, MonotoneUnderEnlargement) {
  std::mt19937_64 rng(105);
  const auto in = inst::random_instance(5, 60, rng);
  const Size3Evaluator ev(in.pop, in.h, 3.0);
  std::vector<std::size_t> part;
  for (std::size_t i = 0; i < in.pop.size(); i += 2) part.push_back(i);
  EXPECT_LE(size_j(in.c, Orientation::column, &part), size1(in.pop, in.c));
  EXPECT_LE(size_j(in.c, Orientation::row, &part), size2(in.pop, in.c));
  EXPECT_LE(ev.size(part), ev.size() * (1 + 1e-12));
}

TEST(Antichain, MatchesExhaustive) {
  std::mt19937_64 rng(106);
  for (int trial = 0; trial < 60; ++trial) {
    const auto in = inst::random_instance(5, 15, rng);
    for (auto o : {Orientation::column, Orientation::row}) {
      const int j = order_index(o);
      const auto [weight, members] = heavy_antichain(in.pop, all_of(in.pop), o);
      std::vector<std::size_t> reps;
      for (std::size_t p = 0; p < in.pop.size(); ++p) {
        bool dup = false;
        for (auto q : reps) dup = dup || same_tile(in.pop[p], in.pop[q], j);
        if (!dup) reps.push_back(p);
      }
      std::vector<std::int64_t> w;
      for (auto p : reps) w.push_back(in.pop[p].I.length());
      const auto brute = oracle::exhaustive_antichain(
          w, [&](int u, int v) { return tile_order(in.pop[reps[u]], in.pop[reps[v]], j); });
      ASSERT_EQ(weight, brute);
      std::int64_t got = 0;
      for (auto a : members) {
        got += in.pop[a].I.length();
        for (auto b : members)
          if (a != b) {
            ASSERT_FALSE(tiles_intersect(in.pop[a], in.pop[b], j));
          }
      }
      ASSERT_EQ(got, weight);
    }
  }
}

TEST(Energy12, SingleTileAndChain) {
  const int L = 4;
  const auto omega = validate_collection({make_square(2, 0, 0, L), make_square(1, 0, 2, L)}, L);
  const auto pop = tiles_for(omega);
  // Square [0,4)x[0,4) has 4 tiles of |I| = 1/4; [0,2)x[4,6) has 2 of |I| = 1/2.
  TileCoefficients c;
  c.r0 = 2.5;
  c.f.assign(pop.size(), 0.0);
  c.g.assign(pop.size(), 0.0);
  c.f[0] = 3.0;
  {
    const std::vector<std::size_t> one = {0};
    const auto e = energy12(pop, c, Orientation::column, EnergyMode::exact, &one);
    EXPECT_NEAR(e.value, 2.0 * std::pow(0.25, 1 / 2.5), 1e-14);
    EXPECT_EQ(e.level, 1);
  }
  // Tile 0 (I = [0,4), omega1 = [0,4)) <=_1 tile 4 (I = [0,8), omega1 = [0,2)).
  const auto& big = pop[4];
  ASSERT_TRUE(tile_order(pop[0], big, 1));
  c.f[4] = 3.0;
  const std::vector<std::size_t> chain = {0, 4};
  const auto e = energy12(pop, c, Orientation::column, EnergyMode::exact, &chain);
  EXPECT_NEAR(e.value, 2.0 * std::pow(0.5, 1 / 2.5), 1e-14);
  ASSERT_EQ(e.family.size(), 1u);
  EXPECT_EQ(e.family[0].top, 4u);
}

TEST(Energy12, ExactMatchesExhaustiveAndDominatesGreedy) {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 40; ++trial) {
    const auto in = inst::random_instance(5, 14, rng);
    for (auto o : {Orientation::column, Orientation::row}) {
      const int j = order_index(o);
      const auto& coef = in.c.of(o);
      const auto exact = energy12(in.pop, in.c, o, EnergyMode::exact);
      const auto greedy = energy12(in.pop, in.c, o, EnergyMode::greedy);
      double brute = 0.0;
      for (int n : detail::dyadic_levels(coef)) {
        std::vector<std::size_t> reps;
        for (std::size_t p = 0; p < in.pop.size(); ++p) {
          if (coef[p] < std::ldexp(1.0, n)) continue;
          bool dup = false;
          for (auto q : reps) dup = dup || same_tile(in.pop[p], in.pop[q], j);
          if (!dup) reps.push_back(p);
        }
        std::vector<std::int64_t> w;
        for (auto p : reps) w.push_back(in.pop[p].I.length());
        const auto W = oracle::exhaustive_antichain(
            w, [&](int u, int v) { return tile_order(in.pop[reps[u]], in.pop[reps[v]], j); });
        brute = std::max(brute, std::ldexp(1.0, n) * std::pow(static_cast<double>(W) / in.pop.N(), 1 / 2.5));
      }
      ASSERT_NEAR(exact.value, brute, 1e-12 * brute);
      ASSERT_LE(greedy.value, exact.value * (1 + 1e-12));
      ASSERT_FALSE(family_violation(in.pop, exact.family).has_value());
      ASSERT_FALSE(family_violation(in.pop, greedy.family).has_value());
    }
  }
}

TEST(Energy3, ZeroAndSingleTile) {
  const int L = 5;
  const auto w = make_square(3, 0, 1, L);
  const auto pop = single_square_population(w, L).subset({2});
  EXPECT_EQ(energy3(pop, inst::zero_h(pop.collection()), 3.0).value, 0.0);
  std::mt19937_64 rng(108);
  const auto h = inst::random_h(pop.collection(), rng);
  const Size3Evaluator ev(pop, h, 3.0);
  const double s = ev.size();
  const auto e = energy3(ev);
  EXPECT_NEAR(e.value, std::ldexp(1.0, detail::floor_log2(s)) * std::pow(pop[0].spatial_length(), 1 / ev.dual()),
              1e-14);
}

TEST(Energy3, GreedyBelowExhaustiveFamilies) {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 25; ++trial) {
    const auto in = inst::random_instance(5, 6, rng);
    const Size3Evaluator ev(in.pop, in.h, 3.0);
    const auto g = energy3(ev);
    ASSERT_FALSE(family_violation(in.pop, g.family).has_value());
    for (const auto& t : g.family) ASSERT_GE(ev.tree_value(t), std::ldexp(1.0, g.level) * (1 - 1e-12));
    ASSERT_LE(g.value, exhaustive_energy3(ev) * (1 + 1e-12));
  }
}

TEST(Energy3, ControlledByMixedNorm) {
  std::mt19937_64 rng(110);
  const double rp = dual_exponent(3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = inst::random_instance(6, 150, rng);
    const double e3 = energy3(Size3Evaluator(in.pop, in.h, 3.0)).value;
    EXPECT_LE(e3, std::pow(4.0, 1 / rp) * mixed_norm(in.h, rp, rp));
  }
}

TEST(Decompose, Size12Trivial) {
  std::mt19937_64 rng(111);
  const auto in = inst::random_instance(5, 30, rng);
  const double E1 = energy12(in.pop, in.c, Orientation::column).value;
  // Threshold 2^21 E1 is far above every coefficient: nothing extracted.
  const auto low = decompose_size1(in.pop, in.c, -22, E1);
  EXPECT_TRUE(low.family.empty());
  EXPECT_EQ(low.low.size(), in.pop.size());
  EXPECT_THROW(decompose_size12(in.pop, in.c, Orientation::column, 30, E1, all_of(in.pop)), ValidationError);
}

TEST(Decompose, SingleHeavyTile) {
  const int L = 4;
  const auto pop = single_square_population(make_square(2, 0, 0, L), L);
  TileCoefficients c;
  c.r0 = 2.5;
  c.f = {1.0, 0.0, 0.0, 0.0};
  c.g = {0.0, 0.0, 0.0, 0.0};
  const double E1 = energy12(pop, c, Orientation::column).value;
  // E1 = (1/4)^{1/r0} < 1, so the admissible level is n = -1.
  const auto d = decompose_size1(pop, c, -1, E1);
  ASSERT_EQ(d.family.size(), 1u);
  EXPECT_EQ(d.family[0].members, std::vector<std::size_t>{0});
  EXPECT_EQ(d.low.size(), 3u);
}

TEST(Decompose, Size12Postconditions) {
  std::mt19937_64 rng(112);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = inst::random_instance(6, 120, rng);
    for (auto o : {Orientation::column, Orientation::row}) {
      const double E = energy12(in.pop, in.c, o).value;
      const double S = size_j(in.c, o);
      const int n = static_cast<int>(std::floor(-std::log2(S / E)));
      const auto d = decompose_size12(in.pop, in.c, o, n, E, all_of(in.pop));
      const double thr = std::ldexp(E, -n - 1);
      EXPECT_LE(size_j(in.c, o, &d.low), thr);
      ASSERT_FALSE(family_violation(in.pop, d.family).has_value());
      std::size_t count = d.low.size();
      double measure = 0.0;
      for (const auto& t : d.family) {
        EXPECT_EQ(t.orientation, o);
        measure += in.pop[t.top].spatial_length();
        count += t.members.size();
        for (auto m : t.members) EXPECT_GT(in.c.of(o)[m], thr);
      }
      EXPECT_EQ(count, in.pop.size());
      // With dyadic-level energies the sharp counting bound has exponent n + 2.
      EXPECT_LE(measure, std::pow(2.0, in.c.r0 * (n + 2)) * (1 + 1e-12));
    }
  }
}

TEST(Decompose, CountingBoundNeedsTheExtraLevel) {
  // Thirteen frequency-disjoint full-length tiles with coefficient 1.99:
  // E1 = 13^{1/r0}, n = 0, and every tile is extracted, so the family
  // measure 13 exceeds 2^{r0} but not 2^{2 r0}.
  const int L = 4;
  std::vector<DyadicSquare> sq;
  for (int i = 0; i < 13; ++i) sq.push_back(make_square(0, i, i, L));
  const auto omega = validate_collection(sq, L);
  auto pop = tiles_for(omega);
  TileCoefficients c;
  c.r0 = 2.5;
  c.f.assign(pop.size(), 0.0);
  c.g.assign(pop.size(), 0.0);
  std::size_t full = 0;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (pop[i].I.length() == 16) c.f[i] = 1.99, ++full;
  ASSERT_EQ(full, 13u);
  const double E1 = energy12(pop, c, Orientation::column).value;
  EXPECT_NEAR(E1, std::pow(13.0, 1 / 2.5), 1e-12);
  const int n = static_cast<int>(std::floor(-std::log2(1.99 / E1)));
  ASSERT_EQ(n, 0);
  const auto d = decompose_size1(pop, c, n, E1);
  const double measure = detail::top_measure(pop, d.family);
  EXPECT_NEAR(measure, 13.0, 1e-12);
  EXPECT_GT(measure, std::pow(2.0, 2.5 * (n + 1)));
  EXPECT_LE(measure, std::pow(2.0, 2.5 * (n + 2)));
}

TEST(Decompose, Size3Postconditions) {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 15; ++trial) {
    const auto in = inst::random_instance(6, 100, rng);
    const Size3Evaluator ev(in.pop, in.h, 3.0);
    const double E3 = energy3(ev).value;
    const double gamma = size3_gamma(2.5, 3.0);
    const double S3 = ev.size();
    const int n = static_cast<int>(std::floor(-std::log(S3 / E3) / std::log(gamma)));
    const auto d = decompose_size3(ev, n, E3, gamma);
    const double thr = E3 * std::pow(gamma, -n - 1);
    EXPECT_LE(ev.size(d.low), thr * (1 + 1e-12));
    ASSERT_FALSE(family_violation(in.pop, d.family).has_value());
    for (const auto& t : d.family) EXPECT_GE(ev.tree_value(t), thr);
  }
  const auto in = inst::random_instance(5, 20, rng);
  const Size3Evaluator ev0(in.pop, inst::zero_h(in.omega), 3.0);
  EXPECT_TRUE(decompose_size3(ev0, 0, 1.0, 2.0).family.empty());
}

TEST(GlobalDecompose, EmptyAndSingle) {
  const int L = 4;
  const auto pop = single_square_population(make_square(2, 0, 0, L), L);
  std::mt19937_64 rng(114);
  const auto h = inst::random_h(pop.collection(), rng);
  const auto f = oracle::random_signal(16, rng), g = oracle::random_signal(16, rng);
  const auto none = pop.subset({});
  const auto c0 = coefficients(f, g, h, none, 2.5, 3.0);
  const auto g0 = global_decompose(none, c0, Size3Evaluator(none, h, 3.0));
  EXPECT_TRUE(g0.levels.empty());

  const auto one = pop.subset({1});
  const auto c1 = coefficients(f, g, h, one, 2.5, 3.0);
  const auto g1 = global_decompose(one, c1, Size3Evaluator(one, h, 3.0));
  ASSERT_EQ(g1.levels.size(), 1u);
  const auto& lv = g1.levels.begin()->second;
  EXPECT_EQ(lv.columns.size() + lv.rows.size(), 1u);
}

TEST(GlobalDecompose, PartitionAndEmptinessClauses) {
  std::mt19937_64 rng(115);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = inst::random_instance(6, 120, rng);
    const Size3Evaluator ev(in.pop, in.h, 3.0);
    const auto gd = global_decompose(in.pop, in.c, ev);
    const auto& rep = gd.report;
    const double gamma = rep.gamma(), rp = dual_exponent(rep.r);
    std::vector<int> seen(in.pop.size(), 0);
    for (const auto& [n, level] : gd.levels) {
      for (auto i : level.col_tiles()) ++seen[i];
      for (auto i : level.row_tiles()) ++seen[i];
      const double p3 = std::pow(2.0, -rep.r0 * n / rp);
      if (std::ldexp(1.0, -n) >= 2 * rep.S1 / rep.E1 && p3 >= gamma * rep.S3 / rep.E3) {
        EXPECT_TRUE(level.columns.empty());
      }
      if (std::ldexp(1.0, -n) >= 2 * rep.S2 / rep.E2 && p3 >= gamma * rep.S3 / rep.E3) {
        EXPECT_TRUE(level.rows.empty());
      }
    }
    for (auto i : gd.residual) ++seen[i];
    for (const auto& st : gd.steps) ASSERT_FALSE(family_violation(in.pop, st.family).has_value());
    for (auto s : seen) ASSERT_EQ(s, 1);
  }
}

TEST(Trilinear, Examples) {
  const int L = 4, N = 16;
  const auto w = make_square(2, 0, 0, L);
  const auto pop = single_square_population(w, L);
  TileCoefficients c;
  c.f = {1, 0, 0, 0};
  c.g = {1, 0, 0, 0};
  c.h = {1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(trilinear_discrete(pop, c), 0.25);
  const std::vector<std::size_t> none;
  EXPECT_EQ(trilinear_discrete(pop, c, &none), 0.0);

  const auto full = validate_collection({make_square(L, 0, 0, L)}, L);
  const auto one = Signal::constant(N, 1.0);
  const VectorFunction h(full, {{full[0], one}});
  EXPECT_NEAR(std::abs(trilinear_continuous(one, one, h, full) - 1.0), 0.0, 1e-12);
  EXPECT_EQ(trilinear_continuous(one, one, inst::zero_h(full), full), cd(0.0));
}

TEST(Trilinear, AdditiveOverDisjointPopulations) {
  std::mt19937_64 rng(116);
  const auto in = inst::random_instance(5, 50, rng);
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < in.pop.size(); ++i) (i % 3 ? a : b).push_back(i);
  EXPECT_NEAR(trilinear_discrete(in.pop, in.c), trilinear_discrete(in.pop, in.c, &a) + trilinear_discrete(in.pop, in.c, &b),
              1e-12);
}

TEST(Trilinear, DiscretizationDominates) {
  std::mt19937_64 rng(117);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = inst::random_instance(6, 100000, rng);
    const double lam = std::abs(trilinear_continuous(in.f, in.g, in.h, in.omega));
    ASSERT_LE(lam, trilinear_discrete(in.pop, in.c) + 1e-9);
  }
}

TEST(DualH, Identity) {
  std::mt19937_64 rng(118);
  for (int trial = 0; trial < 5; ++trial) {
    const auto in = inst::random_instance(6, 1, rng);
    const int N = in.f.size();
    const double r = 3.0;
    const auto h = dual_h(Signal::constant(N, 1.0), in.f, in.g, in.omega, r);
    const auto T = t_r(in.f, in.g, in.omega, r);
    double mean = 0.0;
    for (double v : T) mean += v / N;
    EXPECT_NEAR(trilinear_continuous(in.f, in.g, h, in.omega).real(), mean, 1e-9);
    // |eps(x)|_{l^r'} <= 1 pointwise.
    EXPECT_LE(mixed_norm(h, kInfinity, dual_exponent(r)), 1 + 1e-12);
  }
  // Single square: |eps| = 1 where t != 0.
  const int L = 5, N = 32;
  const auto omega = validate_collection({make_square(3, 0, 1, L)}, L);
  const auto f = oracle::random_signal(N, rng), g = oracle::random_signal(N, rng);
  const auto h = dual_h(Signal::constant(N, 1.0), f, g, omega, 3.0);
  const auto t = bilinear_project(f, g, omega[0]);
  for (int x = 0; x < N; ++x) {
    const cd e = (*h.find(omega[0]))[static_cast<std::size_t>(x)];
    EXPECT_NEAR(std::abs(e), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e * t[static_cast<std::size_t>(x)] - std::abs(t[static_cast<std::size_t>(x)])), 0.0, 1e-9);
  }
  const auto z = dual_h(Signal::constant(N, 1.0), Signal::zeros(N), g, omega, 3.0);
  for (const auto& v : z.find(omega[0])->values()) EXPECT_EQ(v, cd(0.0));
}

TEST(ColumnRow, SingletonAlgebraAndZero) {
  std::mt19937_64 rng(119);
  const auto in = inst::random_instance(5, 40, rng);
  const Size3Evaluator ev(in.pop, in.h, 3.0);
  for (std::size_t i = 0; i < in.pop.size(); ++i)
    for (auto o : {Orientation::column, Orientation::row}) {
      const TileTree t{i, {i}, o};
      const auto b = column_row_bound(in.pop, t, in.c, ev);
      const double len = in.pop[i].spatial_length();
      EXPECT_NEAR(b.lhs, in.c.f[i] * in.c.g[i] * in.c.h[i] * len, 1e-12);
      const double expect = in.c.f[i] * in.c.g[i] * ev.tree_value(t) * len;
      EXPECT_NEAR(b.rhs, expect, 1e-10 * (1 + expect));
    }
  const Size3Evaluator ev0(in.pop, inst::zero_h(in.omega), 3.0);
  auto c0 = in.c;
  std::fill(c0.h.begin(), c0.h.end(), 0.0);
  const auto b0 = column_row_bound(in.pop, {0, {0}, Orientation::column}, c0, ev0);
  EXPECT_EQ(b0.lhs, 0.0);
  EXPECT_EQ(b0.rhs, 0.0);
  EXPECT_THROW(column_row_bound(in.pop, {0, {}, Orientation::column}, in.c, ev), ValidationError);
}

TEST(ExtraTerm, BelowVariation) {
  std::mt19937_64 rng(120);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = inst::random_instance(6, 150, rng);
    for (auto o : {Orientation::column, Orientation::row}) {
      const int j = order_index(o);
      const auto cuts = CutGrid::with_edges(CutGrid::dyadic(in.pop.N(), 3), in.omega, j);
      std::vector<char> stock(in.pop.size(), 1);
      for (const auto& t : detail::stopping_time_trees(in.pop, stock, o)) {
        const auto b = extra_term(in.pop, t, o == Orientation::column ? in.g : in.f, 2.5, cuts);
        ASSERT_LE(b.lhs, b.rhs * (1 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST(EnergyControl, PointwiseVariationBound) {
  std::mt19937_64 rng(121);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = inst::random_instance(6, 150, rng);
    const auto cuts = CutGrid::with_edges(CutGrid::dyadic(in.pop.N(), 3), in.omega, 1);
    const auto V = var_carleson(in.f, 2.5, cuts);
    const auto e = energy12(in.pop, in.c, Orientation::column, EnergyMode::greedy);
    const auto mass = top_projection_mass(in.pop, e.family, in.f, 2.5);
    for (std::size_t x = 0; x < V.size(); ++x) ASSERT_LE(mass[x], std::pow(V[x], 2.5) * (1 + 1e-9) + 1e-12);
  }
}

TEST(GeneralEstimate, Examples) {
  SizeEnergyReport rep;
  rep.S1 = rep.S2 = rep.S3 = rep.E1 = rep.E2 = rep.E3 = 1.0;
  rep.r0 = 2.5;
  rep.r = 3.0;
  const std::array<double, 3> th = {0.3, 0.3, 0.4};
  EXPECT_NEAR(general_estimate_rhs(rep, th, th, 1.0, 1.0), 2.0, 1e-14);
  auto scaled = rep;
  scaled.S1 = 0.3, scaled.E1 = 2.0, scaled.S2 = 0.7, scaled.E2 = 1.3;
  scaled.S3 = 0.5, scaled.E3 = 0.9;
  auto lambda = scaled;
  lambda.S3 *= 3.0;
  lambda.E3 *= 3.0;
  EXPECT_NEAR(general_estimate_rhs(lambda, th, th, 0.4, 0.6), 3.0 * general_estimate_rhs(scaled, th, th, 0.4, 0.6),
              1e-12);
  EXPECT_THROW(general_estimate_rhs(rep, {0.1, 0.6, 0.3}, th, 1, 1), ValidationError);
  EXPECT_THROW(general_estimate_rhs(rep, {0.2, 0.2, 0.2}, th, 1, 1), ValidationError);
  EXPECT_THROW(general_estimate_rhs(rep, th, {0.5, 0.5, 0.0}, 1, 1), ValidationError);
}

TEST(DistancePartition, DegenerateMasks) {
  std::mt19937_64 rng(122);
  const auto in = inst::random_instance(5, 60, rng);
  const auto none = partition_by_distance(in.pop, Mask(32, 0));
  EXPECT_EQ(none.small.size(), in.pop.size());
  EXPECT_TRUE(none.bins.empty());
  const auto all = partition_by_distance(in.pop, Mask(32, 1));
  EXPECT_TRUE(all.small.empty());
  ASSERT_EQ(all.bins.size(), 1u);
  EXPECT_EQ(all.bins.begin()->first, kInfiniteBin);
}

TEST(DistancePartition, MatchesBruteForce) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = inst::random_instance(6, 200, rng);
    const int N = in.pop.N();
    Mask E(static_cast<std::size_t>(N), 0);
    const int a = static_cast<int>(rng() % N), len = 1 + static_cast<int>(rng() % (N - 1));
    for (int i = 0; i < len; ++i) E[static_cast<std::size_t>((a + i) % N)] = 1;
    const auto part = partition_by_distance(in.pop, E);
    std::vector<int> got(in.pop.size(), -1);
    for (auto i : part.small) got[i] = 0;
    for (const auto& [d, v] : part.bins)
      for (auto i : v) {
        ASSERT_EQ(got[i], -1);
        got[i] = d;
      }
    for (std::size_t i = 0; i < in.pop.size(); ++i) {
      const auto& I = in.pop[i].I;
      bool inside = true;
      int dist = N;
      for (int x = I.begin(); x < I.end(); ++x) inside = inside && E[static_cast<std::size_t>(x)];
      for (int z = 0; z < N; ++z) {
        if (E[static_cast<std::size_t>(z)]) continue;
        for (int x = I.begin(); x < I.end(); ++x) {
          const int dz = std::abs(z - x);
          dist = std::min(dist, std::min(dz, N - dz));
        }
      }
      if (!inside) {
        ASSERT_EQ(got[i], 0);
        continue;
      }
      int d = 0;
      while ((1 << d) < 1.0 + static_cast<double>(dist) / I.length()) ++d;
      ASSERT_EQ(got[i], d);
      ASSERT_GE(d, 1);
    }
  }
}
