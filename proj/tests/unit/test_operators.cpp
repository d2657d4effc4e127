#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rdflab/operators.hpp"

using namespace rdflab;

TEST(Carleson, ToneAndZero) {
  const auto c = carleson(Signal::tone(32, 5, cd(0.6, 0.8) * 2.0));
  for (double v : c) EXPECT_NEAR(v, 2.0, 1e-12);
  for (double v : carleson(Signal::zeros(32))) EXPECT_EQ(v, 0.0);
}

TEST(Carleson, CalipersMatchOracle) {
  std::mt19937_64 rng(21);
  const int N = 64;
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = oracle::random_signal(N, rng);
    const PrefixSums S(f);
    const auto fast = carleson(S, CarlesonMode::calipers);
    const auto brute = carleson(S, CarlesonMode::brute_force);
    const auto c = spectrum(f);
    for (int m = 0; m < N; ++m) {
      ASSERT_NEAR(fast[m], brute[m], 1e-12 * brute[m]);
      ASSERT_NEAR(brute[m], oracle::carleson_at(c, m), 1e-10 * brute[m]);
    }
  }
}

TEST(Carleson, DegenerateHulls) {
  // Collinear and duplicate points.
  std::vector<cd> pts = {0.0, 1.0, 2.0, 2.0, 1.0, 0.5};
  EXPECT_NEAR(point_set_diameter(pts), 2.0, 1e-15);
  pts = {cd(1, 1)};
  EXPECT_EQ(point_set_diameter(pts), 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 500; ++t) {
    std::vector<cd> p(3 + rng() % 40);
    for (auto& z : p) z = {std::round(nd(rng) * 3), std::round(nd(rng) * 3)};
    ASSERT_NEAR(point_set_diameter(p), point_set_diameter(p, CarlesonMode::brute_force), 1e-12);
  }
}

TEST(Carleson, DominatesProjections) {
  std::mt19937_64 rng(22);
  const int N = 128;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = oracle::random_signal(N, rng);
    const auto C = carleson(f);
    const int a = static_cast<int>(rng() % N);
    const int b = a + 1 + static_cast<int>(rng() % (N - a));
    const auto p = project(f, CyclicInterval{a, b - a, N});
    for (int m = 0; m < N; ++m) ASSERT_LE(std::abs(p[m]), C[m] + 1e-9);
  }
}

TEST(VarCarleson, ToneAndTwoTones) {
  const int N = 32;
  for (double v : var_carleson(Signal::tone(N, 7, 1.5), 2.5, CutGrid::full(N))) EXPECT_NEAR(v, 1.5, 1e-12);
  std::vector<cd> c(N);
  c[3] = cd(0.5, 0.2);
  c[20] = cd(-1.0, 0.4);
  const auto f = Signal::from_spectrum(c);
  const double r = 3.0;
  // Either the two jumps separately or one increment spanning both.
  const double split = std::pow(std::pow(std::abs(c[3]), r) + std::pow(std::abs(c[20]), r), 1.0 / r);
  const auto V = var_carleson(f, r, CutGrid::full(N));
  int split_wins = 0;
  for (int m = 0; m < N; ++m) {
    const double joint = std::abs(f[m]);
    split_wins += split >= joint;
    EXPECT_NEAR(V[m], std::max(split, joint), 1e-12);
  }
  EXPECT_GT(split_wins, 0);
  EXPECT_THROW(var_carleson(f, 1.0, CutGrid::full(N)), ValidationError);
}

TEST(VarCarleson, DpMatchesExhaustive) {
  std::mt19937_64 rng(23);
  const int N = 64;
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = oracle::random_signal(N, rng);
    std::vector<int> pts;
    while (pts.size() < 10) pts.push_back(1 + static_cast<int>(rng() % (N - 1)));
    const auto grid = CutGrid::custom(N, pts);
    ASSERT_LE(grid.size(), 12u);
    const double r = 1.5 + (rng() % 100) / 40.0;
    const auto V = var_carleson(f, r, grid);
    const auto c = spectrum(f);
    for (int m = 0; m < N; ++m) ASSERT_NEAR(V[m], oracle::variation_exhaustive(c, grid.cuts(), r, m), 1e-10 * V[m]);
  }
}

TEST(VarCarleson, DominatesCarlesonAndDecreasesInR) {
  std::mt19937_64 rng(24);
  const int N = 64;
  const auto f = oracle::random_signal(N, rng);
  const PrefixSums S(f);
  const auto C = carleson(S);
  const auto V2 = var_carleson(S, 2.0, CutGrid::full(N));
  const auto V3 = var_carleson(S, 3.0, CutGrid::full(N));
  const auto V6 = var_carleson(S, 6.0, CutGrid::full(N));
  for (int m = 0; m < N; ++m) {
    ASSERT_GE(V6[m] + 1e-9, C[m]);
    ASSERT_GE(V2[m] + 1e-9, V3[m]);
    ASSERT_GE(V3[m] + 1e-9, V6[m]);
  }
}

TEST(CutGrid, Construction) {
  const auto g = CutGrid::custom(16, {5, 3, 5});
  EXPECT_EQ(g.cuts(), (std::vector<int>{0, 3, 5, 16}));
  EXPECT_EQ(CutGrid::dyadic(16, 2).cuts(), (std::vector<int>{0, 4, 8, 12, 16}));
  EXPECT_THROW(CutGrid::custom(16, {17}), ValidationError);
  const auto omega = validate_collection({make_square(0, 5, 3, 10)}, 10);
  const auto d = CutGrid::default_for(omega, 1);
  EXPECT_EQ(d.size(), 257u + 2u);
}

TEST(Rdf, Examples) {
  std::mt19937_64 rng(25);
  const int N = 64;
  const auto f = oracle::random_signal(N, rng);
  const auto I = make_interval(3, 2, 6);
  const auto one = rdf(f, std::vector<DyadicInterval>{I}, 2.0);
  const auto p = project(f, I);
  for (int m = 0; m < N; ++m) EXPECT_NEAR(one[m], std::abs(p[m]), 1e-12);

  std::vector<DyadicInterval> part;
  for (int n = 0; n < 8; ++n) part.push_back(make_interval(3, n, 6));
  for (double v : rdf(Signal::tone(N, 9, 0.3), part, 3.0)) EXPECT_NEAR(v, 0.3, 1e-12);
  const auto sq = rdf(f, part, 2.0);
  EXPECT_NEAR(lp_norm(sq, 2.0), lp_norm(f, 2.0), 1e-10 * lp_norm(f, 2.0));
  EXPECT_THROW(rdf(f, std::vector<DyadicInterval>{make_interval(3, 0, 6), make_interval(2, 1, 6)}, 2.0),
               ValidationError);
}

TEST(TR, Examples) {
  std::mt19937_64 rng(26);
  const int N = 64;
  const auto f = oracle::random_signal(N, rng), g = oracle::random_signal(N, rng);
  const auto full = validate_collection({make_square(6, 0, 0, 6)}, 6);
  const auto t = t_r(f, g, full, 2.0);
  for (int m = 0; m < N; ++m) EXPECT_NEAR(t[m], std::abs(f[m] * g[m]), 1e-10);
  const auto single = validate_collection({make_square(2, 3, 1, 6)}, 6);
  const auto ts = t_r(f, g, single, 5.0);
  const auto pf = project(f, single[0].omega1), pg = project(g, single[0].omega2);
  for (int m = 0; m < N; ++m) EXPECT_NEAR(ts[m], std::abs(pf[m]) * std::abs(pg[m]), 1e-12);
  for (double v : t_r(f, g, validate_collection({}, 6), 2.0)) EXPECT_EQ(v, 0.0);
}

TEST(TR, MonotoneInR) {
  std::mt19937_64 rng(27);
  const int N = 64;
  const auto omega = validate_collection(
      {make_square(2, 0, 1, 6), make_square(3, 2, 0, 6), make_square(1, 7, 9, 6), make_square(0, 40, 3, 6)}, 6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = oracle::random_signal(N, rng), g = oracle::random_signal(N, rng);
    const auto t1 = t_r(f, g, omega, 1.0), t2 = t_r(f, g, omega, 2.5), ti = t_r(f, g, omega, kInfinity);
    for (int m = 0; m < N; ++m) {
      ASSERT_LE(ti[m], t2[m] + 1e-12);
      ASSERT_LE(t2[m], t1[m] + 1e-12);
    }
  }
}

TEST(DyadicMaximal, Examples) {
  for (double v : dyadic_maximal(Signal::constant(16, cd(0, -2)))) EXPECT_NEAR(v, 2.0, 1e-14);
  std::vector<cd> ind(16);
  for (int m = 4; m < 8; ++m) ind[m] = 1.0;
  const auto M = dyadic_maximal(Signal(ind));
  for (int m = 0; m < 16; ++m) {
    if (m >= 4 && m < 8) {
      EXPECT_EQ(M[m], 1.0);
    }
    EXPECT_GE(M[m], 0.25);
  }
}

TEST(DyadicMaximal, MatchesExhaustiveAndWeakType) {
  std::mt19937_64 rng(28);
  std::exponential_distribution<double> ex;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(64);
    for (auto& x : v) x = ex(rng) * (rng() % 4 == 0);
    const auto fast = dyadic_maximal(v);
    const auto brute = oracle::dyadic_maximal(v);
    for (int m = 0; m < 64; ++m) ASSERT_NEAR(fast[m], brute[m], 1e-14 * (1 + brute[m]));
    double l1 = 0;
    for (double x : v) l1 += x;
    l1 /= 64;
    for (double lambda : {0.1, 0.5, 1.0, 2.0}) {
      int cnt = 0;
      for (double x : fast) cnt += x > lambda;
      ASSERT_LE(cnt / 64.0, l1 / lambda + 1e-12);
    }
  }
}

TEST(DyadicMaximal, ExactOnDyadicRationals) {
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(64);
    for (auto& x : v) x = static_cast<double>(rng() % 17) / 8.0;
    const auto fast = dyadic_maximal(v);
    const auto brute = oracle::dyadic_maximal(v);
    for (int m = 0; m < 64; ++m) ASSERT_EQ(fast[m], brute[m]);
  }
}

TEST(ExceptionalSet, TrivialCases) {
  const int N = 64;
  const Mask full(N, 1);
  const auto one = Signal::constant(N, 1.0);
  const auto rep = exceptional_set(one, one, full, full, full);
  EXPECT_TRUE(rep.success);
  EXPECT_EQ(mask_count(rep.E), 0);
  EXPECT_EQ(rep.H_prime, full);
  EXPECT_EQ(rep.K, 4.0);

  Mask F(N, 0);
  for (int m = 0; m < 8; ++m) F[m] = 1;
  const auto zero = Signal::zeros(N);
  const auto rep0 = exceptional_set(zero, zero, F, F, full);
  EXPECT_EQ(mask_count(rep0.E), 0);
  EXPECT_THROW(exceptional_set(one, one, F, full, full), ValidationError);
  EXPECT_THROW(exceptional_set(zero, zero, Mask(N, 0), full, full), ValidationError);
}

TEST(ExceptionalSet, ConcentratedBump) {
  std::mt19937_64 rng(29);
  const int N = 128;
  Mask H(N, 1), F(N, 0);
  for (int m = 40; m < 48; ++m) F[m] = 1;  // |F| = |H| / 16
  std::vector<cd> v(N);
  std::uniform_real_distribution<double> u(0, 1);
  for (int m = 40; m < 48; ++m) v[m] = std::polar(u(rng), 6.28 * u(rng));
  const Signal f(v);
  const auto rep = exceptional_set(f, f, F, F, H);
  EXPECT_TRUE(rep.success);
  EXPECT_GT(2 * mask_count(rep.H_prime), mask_count(H));
  for (int m = 0; m < N; ++m) EXPECT_LE(rep.H_prime[m], H[m]);
}
