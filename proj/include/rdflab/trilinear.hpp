#pragma once

#include <array>
#include <climits>
#include <cmath>
#include <map>
#include <vector>

#include "rdflab/decompose.hpp"
#include "rdflab/operators.hpp"
#include "rdflab/tile_analysis.hpp"

namespace rdflab {

/// Lambda_P = sum_P f(P1) g(P2) h(P3) |I_P|, |I_P| in physical units.
inline double trilinear_discrete(const TilePopulation& pop, const TileCoefficients& c,
                                 const std::vector<std::size_t>* subset = nullptr) {
  double s = 0.0;
  auto add = [&](std::size_t i) { s += c.f[i] * c.g[i] * c.h[i] * pop[i].spatial_length(); };
  if (subset) {
    for (auto i : *subset) add(i);
  } else {
    for (std::size_t i = 0; i < pop.size(); ++i) add(i);
  }
  return s;
}

/// Lambda = (1/N) sum_x sum_omega pi_{omega1} f(x) pi_{omega2} g(x) h_omega(x).
inline cd trilinear_continuous(const Signal& f, const Signal& g, const VectorFunction& h,
                               const SquareCollection& omega) {
  cd s = 0.0;
  ProjectionCache pf(f), pg(g);
  for (const auto& w : omega) {
    const Signal* hw = h.find(w);
    if (hw == nullptr) continue;
    const auto& a = pf.get(w.omega1);
    const auto& b = pg.get(w.omega2);
    for (std::size_t m = 0; m < a.size(); ++m) s += a[m] * b[m] * (*hw)[m];
  }
  return s / static_cast<double>(f.size());
}

/// h_omega = h_scalar * eps_omega with eps the l^r-dual unit vector of
/// t_omega = pi_omega(f, g): sum_omega t_omega eps_omega = |t(x)|_{l^r}.
inline VectorFunction dual_h(const Signal& h_scalar, const Signal& f, const Signal& g, const SquareCollection& omega,
                             double r) {
  detail::require(r > 1.0, "dual_h needs r > 1");
  const int N = f.size();
  std::vector<std::vector<cd>> t;
  ProjectionCache pf(f), pg(g);
  for (const auto& w : omega) {
    const auto& a = pf.get(w.omega1);
    const auto& b = pg.get(w.omega2);
    std::vector<cd> v(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m) v[static_cast<std::size_t>(m)] = a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(m)];
    t.push_back(std::move(v));
  }
  std::vector<double> norm(static_cast<std::size_t>(N), 0.0);
  for (const auto& v : t)
    for (int m = 0; m < N; ++m) norm[static_cast<std::size_t>(m)] += std::pow(std::abs(v[static_cast<std::size_t>(m)]), r);
  for (auto& x : norm) x = std::pow(x, 1.0 / r);
  std::map<DyadicSquare, Signal> entries;
  for (std::size_t s = 0; s < omega.size(); ++s) {
    std::vector<cd> e(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m) {
      const auto i = static_cast<std::size_t>(m);
      const double a = std::abs(t[s][i]);
      if (norm[i] == 0.0 || a == 0.0) continue;
      e[i] = h_scalar[i] * std::conj(t[s][i]) * std::pow(a, r - 2.0) / std::pow(norm[i], r - 1.0);
    }
    entries.emplace(omega[s], Signal(std::move(e)));
  }
  return VectorFunction(omega, std::move(entries));
}

struct BoundPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

namespace detail {

inline void require_tree(const TilePopulation& pop, const TileTree& tree) {
  require(is_valid_tree(pop, tree), "not a valid column or row");
}

// sum_{P in tree} int_{I_P} |pi_{omega_j(P)} u|^r0 via the coefficients.
inline double tree_power_mass(const TilePopulation& pop, const std::vector<double>& coef, const TileTree& tree,
                              double r0) {
  double s = 0.0;
  for (auto m : tree.members) s += std::pow(coef[m], r0) * pop[m].spatial_length();
  return s;
}

}  // namespace detail

/// Single-tree bound: lhs = Lambda restricted to the tree, rhs = the product
/// (|I_T|^-1 sum int_{I_P} |pi u|^r0)^{1/r} S_a S_b^sigma S3 |I_T|, with
/// (u, a, b) = (g, 1, 2) for a column and (f, 2, 1) for a row.
inline BoundPair column_row_bound(const TilePopulation& pop, const TileTree& tree, const TileCoefficients& c,
                                  const Size3Evaluator& ev) {
  detail::require_tree(pop, tree);
  const double r0 = c.r0, r = c.r;
  const double sigma = (r - r0) / r;
  const double IT = pop[tree.top].spatial_length();
  BoundPair out;
  out.lhs = trilinear_discrete(pop, c, &tree.members);
  const bool column = tree.orientation == Orientation::column;
  const auto& extra = column ? c.g : c.f;
  const double mass = detail::tree_power_mass(pop, extra, tree, r0) / IT;
  const double s1 = size_j(c, Orientation::column, &tree.members);
  const double s2 = size_j(c, Orientation::row, &tree.members);
  const double s3 = ev.size(tree.members);
  out.rhs = std::pow(mass, 1.0 / r) * (column ? s1 * std::pow(s2, sigma) : std::pow(s1, sigma) * s2) * s3 * IT;
  return out;
}

/// lhs = |I_T|^-1 sum_P int_{I_P} |pi_{omega_2(P)} g|^r0 (omega_1 and f for a
/// row); rhs = mean over I_T of (V^r0 g)^r0.
inline BoundPair extra_term(const TilePopulation& pop, const TileTree& tree, const Signal& u, double r0,
                            const CutGrid& cuts) {
  detail::require_tree(pop, tree);
  const int j = tree.orientation == Orientation::column ? 2 : 1;
  const auto& T = pop[tree.top];
  ProjectionCache pu(u);
  BoundPair out;
  double s = 0.0;
  for (auto m : tree.members) {
    const auto& P = pop[m];
    const auto& p = pu.get(P.omega(j));
    for (int x = P.I.begin(); x < P.I.end(); ++x) s += std::pow(std::abs(p[static_cast<std::size_t>(x)]), r0);
  }
  out.lhs = s / T.I.length();
  const auto V = var_carleson(u, r0, cuts);
  double v = 0.0;
  for (int x = T.I.begin(); x < T.I.end(); ++x) v += std::pow(V[static_cast<std::size_t>(x)], r0);
  out.rhs = v / T.I.length();
  return out;
}

/// Pointwise sum over trees of |pi_{omega_j(Top)} u(x)|^r0 1_{I_Top}(x).
inline std::vector<double> top_projection_mass(const TilePopulation& pop, const std::vector<TileTree>& family,
                                               const Signal& u, double r0) {
  std::vector<double> acc(static_cast<std::size_t>(pop.N()), 0.0);
  ProjectionCache pu(u);
  for (const auto& t : family) {
    const auto& T = pop[t.top];
    const auto& p = pu.get(T.omega(t.orientation));
    for (int x = T.I.begin(); x < T.I.end(); ++x)
      acc[static_cast<std::size_t>(x)] += std::pow(std::abs(p[static_cast<std::size_t>(x)]), r0);
  }
  return acc;
}

/// The two-term right-hand side of the general estimate, evaluated verbatim.
/// supF, supG are sup_P mean_{I_P} (V^r0 f)^r0 and the same for g.
inline double general_estimate_rhs(const SizeEnergyReport& rep, const std::array<double, 3>& theta,
                                   const std::array<double, 3>& xi, double supF, double supG) {
  const double sigma = rep.sigma();
  const double q = dual_exponent(rep.r) / rep.r0;
  const double lim = std::min(1.0, 1.0 / (2.0 * sigma));
  constexpr double eps = 1e-12;
  auto sum_is_one = [](const std::array<double, 3>& a) { return std::abs(a[0] + a[1] + a[2] - 1.0) <= 1e-12; };
  detail::require(sigma > 0.0 && sigma < 1.0, "general estimate needs r0 < r");
  detail::require(sum_is_one(theta) && sum_is_one(xi), "theta and xi must each sum to 1");
  detail::require(theta[0] >= -eps && theta[0] <= lim + eps && theta[1] >= -eps && theta[1] <= 0.5 + eps &&
                      theta[2] > 0.0 && theta[2] <= 1.0 + eps,
                  "theta outside its admissible range");
  detail::require(xi[0] >= -eps && xi[0] <= 0.5 + eps && xi[1] >= -eps && xi[1] <= lim + eps && xi[2] > 0.0 &&
                      xi[2] <= 1.0 + eps,
                  "xi outside its admissible range");
  const double t1 = std::pow(supG, 1.0 / rep.r) * std::pow(rep.S1, 2 * sigma * theta[0]) *
                    std::pow(rep.E1, 1 - 2 * sigma * theta[0]) * std::pow(rep.S2, 2 * sigma * theta[1]) *
                    std::pow(rep.E2, sigma - 2 * sigma * theta[1]) * std::pow(rep.S3, 2 * sigma * theta[2] * q) *
                    std::pow(rep.E3, 1 - 2 * sigma * theta[2] * q);
  const double t2 = std::pow(supF, 1.0 / rep.r) * std::pow(rep.S1, 2 * sigma * xi[0]) *
                    std::pow(rep.E1, sigma - 2 * sigma * xi[0]) * std::pow(rep.S2, 2 * sigma * xi[1]) *
                    std::pow(rep.E2, 1 - 2 * sigma * xi[1]) * std::pow(rep.S3, 2 * sigma * xi[2] * q) *
                    std::pow(rep.E3, 1 - 2 * sigma * xi[2] * q);
  return t1 + t2;
}

/// sup over tiles of the mean of (V^r0 u)^r0 on I_P.
inline double sup_variation_average(const TilePopulation& pop, const std::vector<double>& V, double r0) {
  double best = 0.0;
  for (const auto& t : pop) {
    double s = 0.0;
    for (int x = t.I.begin(); x < t.I.end(); ++x) s += std::pow(V[static_cast<std::size_t>(x)], r0);
    best = std::max(best, s / t.I.length());
  }
  return best;
}

inline constexpr int kInfiniteBin = INT_MAX;

struct DistancePartition {
  std::vector<std::size_t> small;                   // I_P not inside E
  std::map<int, std::vector<std::size_t>> bins;     // d -> P_d
};

/// P_small = {I_P not inside E}; the rest sorted by
/// d = ceil(log2(1 + dist(I_P, E^c) / |I_P|)) >= 1, circular grid distance.
/// With E the whole torus every tile lands in the kInfiniteBin bin.
inline DistancePartition partition_by_distance(const TilePopulation& pop, const Mask& E) {
  const int N = pop.N();
  detail::require(E.size() == static_cast<std::size_t>(N), "partition_by_distance: mask on wrong grid");
  std::vector<int> outside;
  for (int x = 0; x < N; ++x)
    if (!E[static_cast<std::size_t>(x)]) outside.push_back(x);
  DistancePartition out;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& I = pop[i].I;
    bool inside = true;
    for (int x = I.begin(); x < I.end() && inside; ++x) inside = E[static_cast<std::size_t>(x)] != 0;
    if (!inside) {
      out.small.push_back(i);
      continue;
    }
    if (outside.empty()) {
      out.bins[kInfiniteBin].push_back(i);
      continue;
    }
    int dist = INT_MAX;
    for (int z : outside) dist = std::min(dist, circular_distance(z, I.begin(), I.end(), N));
    const int d = static_cast<int>(std::ceil(std::log2(1.0 + static_cast<double>(dist) / I.length())));
    out.bins[d].push_back(i);
  }
  return out;
}

}  // namespace rdflab
