#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rdflab/tile_analysis.hpp"

namespace rdflab {

struct Decomposition {
  std::vector<std::size_t> low;   // tiles left in P_low
  std::vector<TileTree> family;   // organizes P_high
  double threshold = 0.0;
};

namespace detail {

inline std::vector<char> to_mask(std::size_t n, const std::vector<std::size_t>& subset) {
  std::vector<char> m(n, 0);
  for (auto i : subset) m[i] = 1;
  return m;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

inline constexpr double kPrecondSlack = 1e-12;

}  // namespace detail

/// Size^1 (column) or Size^2 (row) decomposition at level n: tiles with
/// coefficient > 2^{-n-1} E are organized into mutually disjoint maximal
/// trees; the rest is P_low.
inline Decomposition decompose_size12(const TilePopulation& pop, const TileCoefficients& c, Orientation o, int n,
                                      double energy, const std::vector<std::size_t>& subset) {
  const auto& coef = c.of(o);
  const double bound = std::ldexp(energy, -n);
  detail::require(size_j(c, o, &subset) <= bound * (1.0 + detail::kPrecondSlack),
                  "decomposition precondition Size <= 2^-n Energy fails");
  Decomposition out;
  out.threshold = std::ldexp(energy, -n - 1);
  std::vector<char> stock(pop.size(), 0);
  for (auto i : subset) {
    if (coef[i] > out.threshold)
      stock[i] = 1;
    else
      out.low.push_back(i);
  }
  out.family = detail::stopping_time_trees(pop, stock, o);
  return out;
}

inline Decomposition decompose_size1(const TilePopulation& pop, const TileCoefficients& c, int n, double E1) {
  return decompose_size12(pop, c, Orientation::column, n, E1, detail::all_indices(pop.size()));
}

inline Decomposition decompose_size2(const TilePopulation& pop, const TileCoefficients& c, int n, double E2) {
  return decompose_size12(pop, c, Orientation::row, n, E2, detail::all_indices(pop.size()));
}

inline double size3_gamma(double r0, double r) { return std::pow(2.0, r0 / dual_exponent(r)); }

/// Size^3 decomposition at level n with gamma = 2^{r0/r'}: extracts rows and
/// columns of value > gamma^{-n-1} E3 until none is left.
inline Decomposition decompose_size3(const Size3Evaluator& ev, int n, double E3, double gamma,
                                     const std::vector<std::size_t>& subset) {
  const auto& pop = ev.population();
  auto stock = detail::to_mask(pop.size(), subset);
  detail::require(ev.size(stock) <= E3 * std::pow(gamma, -n) * (1.0 + detail::kPrecondSlack),
                  "decomposition precondition Size3 <= gamma^-n Energy3 fails");
  Decomposition out;
  out.threshold = E3 * std::pow(gamma, -n - 1);
  const double thr = out.threshold;
  out.family = detail::size3_extract(ev, stock, [thr](double v) { return v > thr; });
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (stock[i]) out.low.push_back(i);
  return out;
}

inline Decomposition decompose_size3(const Size3Evaluator& ev, int n, double E3, double gamma) {
  return decompose_size3(ev, n, E3, gamma, detail::all_indices(ev.population().size()));
}

struct DecompositionStep {
  int lemma = 0;  // 1, 2 or 3
  int level = 0;
  double ratio = 0.0;
  std::size_t extracted = 0;
  std::vector<TileTree> family;  // mutually disjoint within one step
};

// Union over the steps at one level; a level gets at most one step per lemma,
// and disjointness holds within each step's family.
struct DecompositionLevel {
  std::vector<TileTree> columns;
  std::vector<TileTree> rows;

  std::vector<std::size_t> col_tiles() const { return tiles_of(columns); }
  std::vector<std::size_t> row_tiles() const { return tiles_of(rows); }

 private:
  static std::vector<std::size_t> tiles_of(const std::vector<TileTree>& fam) {
    std::vector<std::size_t> v;
    for (const auto& t : fam) v.insert(v.end(), t.members.begin(), t.members.end());
    return v;
  }
};

struct SizeEnergyReport {
  double S1 = 0, S2 = 0, S3 = 0;
  double E1 = 0, E2 = 0, E3 = 0;
  EnergyMode mode1 = EnergyMode::exact, mode2 = EnergyMode::exact, mode3 = EnergyMode::greedy;
  double r0 = 0, r = 0;

  double sigma() const { return (r - r0) / r; }
  double gamma() const { return size3_gamma(r0, r); }
};

struct GlobalDecomposition {
  SizeEnergyReport report;
  std::map<int, DecompositionLevel> levels;
  std::vector<std::size_t> residual;  // tiles on which every size vanishes
  std::vector<DecompositionStep> steps;
};

inline SizeEnergyReport size_energy_report(const TilePopulation& pop, const TileCoefficients& c,
                                           const Size3Evaluator& ev, EnergyMode mode = EnergyMode::exact) {
  SizeEnergyReport rep;
  rep.r0 = c.r0;
  rep.r = c.r;
  rep.S1 = size1(pop, c);
  rep.S2 = size2(pop, c);
  rep.S3 = ev.size();
  rep.E1 = energy12(pop, c, Orientation::column, mode).value;
  rep.E2 = energy12(pop, c, Orientation::row, mode).value;
  rep.E3 = energy3(ev).value;
  rep.mode1 = rep.mode2 = mode;
  return rep;
}

/// Iterates the three decomposition lemmas, each time on whichever of
/// S1(stock)/E1, S2(stock)/E2, (S3(stock)/E3)^{r'/r0} is largest, at the level
/// n = floor(-log2 ratio). Columns go to P_n^col, rows to P_n^row.
inline GlobalDecomposition global_decompose(const TilePopulation& pop, const TileCoefficients& c,
                                            const Size3Evaluator& ev) {
  GlobalDecomposition out;
  out.report = size_energy_report(pop, c, ev);
  const auto& rep = out.report;
  const double rp = dual_exponent(c.r);
  const double gamma = rep.gamma();
  std::vector<std::size_t> stock = detail::all_indices(pop.size());
  while (!stock.empty()) {
    const double s1 = size_j(c, Orientation::column, &stock);
    const double s2 = size_j(c, Orientation::row, &stock);
    const double s3 = ev.size(stock);
    const double rho1 = rep.E1 > 0 ? s1 / rep.E1 : 0.0;
    const double rho2 = rep.E2 > 0 ? s2 / rep.E2 : 0.0;
    const double rho3 = rep.E3 > 0 ? std::pow(s3 / rep.E3, rp / c.r0) : 0.0;
    const double rho = std::max({rho1, rho2, rho3});
    if (rho <= 0.0) {
      out.residual = stock;
      break;
    }
    const int lemma = rho == rho1 ? 1 : rho == rho2 ? 2 : 3;
    const int n = static_cast<int>(std::floor(-std::log2(rho)));
    Decomposition d;
    if (lemma == 1)
      d = decompose_size12(pop, c, Orientation::column, n, rep.E1, stock);
    else if (lemma == 2)
      d = decompose_size12(pop, c, Orientation::row, n, rep.E2, stock);
    else
      d = decompose_size3(ev, n, rep.E3, gamma, stock);
    auto& level = out.levels[n];
    std::size_t moved = 0;
    for (const auto& t : d.family) {
      moved += t.members.size();
      (t.orientation == Orientation::column ? level.columns : level.rows).push_back(t);
    }
    detail::require(moved > 0, "global decomposition stalled");
    out.steps.push_back({lemma, n, rho, moved, std::move(d.family)});
    stock = std::move(d.low);
  }
  return out;
}

}  // namespace rdflab
