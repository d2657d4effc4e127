#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rdflab/maxflow.hpp"
#include "rdflab/operators.hpp"
#include "rdflab/signal.hpp"
#include "rdflab/tiles.hpp"

namespace rdflab {

inline double dual_exponent(double r) {
  detail::require(r > 1.0, "dual exponent needs r > 1");
  return std::isinf(r) ? 1.0 : r / (r - 1.0);
}

/// Per-tile coefficients f(P1), g(P2), h(P3).
struct TileCoefficients {
  std::vector<double> f;
  std::vector<double> g;
  std::vector<double> h;
  double r0 = 0.0;
  double r = 0.0;

  const std::vector<double>& of(Orientation o) const { return o == Orientation::column ? f : g; }
};

/// f(P1) = (mean over I_P of |pi_{omega1} f|^r0)^(1/r0), g(P2) likewise with
/// omega2, h(P3) = max over I_P of |h_omega * check chi_{omega3}|. Squares
/// without an h entry contribute zero.
inline TileCoefficients coefficients(const Signal& f, const Signal& g, const VectorFunction& h,
                                     const TilePopulation& pop, double r0, double r, double ramp = 1.0) {
  detail::require(r0 >= 1.0, "coefficients need r0 >= 1");
  detail::require(f.size() == pop.N() && g.size() == pop.N(), "coefficients: grid mismatch");
  TileCoefficients out;
  out.r0 = r0;
  out.r = r;
  ProjectionCache pf(f), pg(g);
  std::map<DyadicSquare, std::vector<cd>> moll;
  for (const auto& t : pop) {
    out.f.push_back(local_average(pf.get(t.square.omega1), t.I, r0));
    out.g.push_back(local_average(pg.get(t.square.omega2), t.I, r0));
    const Signal* hw = h.find(t.square);
    if (hw == nullptr) {
      out.h.push_back(0.0);
      continue;
    }
    auto it = moll.find(t.square);
    if (it == moll.end()) {
      const auto m = mollified_component(*hw, t.square, ramp);
      it = moll.emplace(t.square, std::vector<cd>(m.values().begin(), m.values().end())).first;
    }
    double sup = 0.0;
    for (int x = t.I.begin(); x < t.I.end(); ++x) sup = std::max(sup, std::abs(it->second[static_cast<std::size_t>(x)]));
    out.h.push_back(sup);
  }
  return out;
}

/// Circular grid distance from point z to the points of [begin, end).
inline int circular_distance(int z, int begin, int end, int N) {
  if (z >= begin && z < end) return 0;
  return std::min(positive_mod(begin - z, N), positive_mod(z - (end - 1), N));
}

/// Phi_J(z) = (1 + dist(z, J) / |J|)^(-M) with circular distance.
inline double phi(const DyadicInterval& J, int z, double M) {
  const double d = circular_distance(z, J.begin(), J.end(), J.grid_size());
  return std::pow(1.0 + d / J.length(), -M);
}

/// Phi^omega_I(z): sum of Phi_J over dyadic J inside I with |J| |omega| = 1.
inline double phi_omega(const DyadicInterval& I, const DyadicSquare& w, int z, double M) {
  const int k = w.L() - w.scale();
  detail::require(k <= I.k, "phi_omega needs |I| >= |omega|^-1");
  double s = 0.0;
  for (int n = I.begin() >> k; n < I.end() >> k; ++n) s += phi({k, n, I.L}, z, M);
  return s;
}

inline double size_j(const TileCoefficients& c, Orientation o, const std::vector<std::size_t>* subset = nullptr) {
  const auto& v = c.of(o);
  double m = 0.0;
  if (subset == nullptr) {
    for (double x : v) m = std::max(m, x);
  } else {
    for (auto i : *subset) m = std::max(m, v[i]);
  }
  return m;
}

inline double size1(const TilePopulation&, const TileCoefficients& c) { return size_j(c, Orientation::column); }
inline double size2(const TilePopulation&, const TileCoefficients& c) { return size_j(c, Orientation::row); }

/// Evaluates the Size^3 functional of rows and columns over sub-populations.
///
/// A(omega, J) = (1/N) sum_x |h_omega(x)|^{r'} Phi_J(x) is tabulated once per
/// square and spatial interval of scale |omega|^-1; prefix sums over J give
/// the integral against Phi^omega_I in O(1).
class Size3Evaluator {
 public:
  Size3Evaluator(const TilePopulation& pop, const VectorFunction& h, double r, double M = 10.0)
      : pop_(&pop), rp_(dual_exponent(r)), M_(M) {
    const int N = pop.N();
    for (std::size_t s = 0; s < pop.collection().size(); ++s) {
      const auto& w = pop.collection()[s];
      const Signal* hw = h.find(w);
      const int count = w.side();
      std::vector<double> prefix(static_cast<std::size_t>(count) + 1, 0.0);
      if (hw != nullptr) {
        std::vector<double> mass(static_cast<std::size_t>(N));
        for (int x = 0; x < N; ++x) mass[static_cast<std::size_t>(x)] = std::pow(std::abs((*hw)[static_cast<std::size_t>(x)]), rp_);
        const int k = w.L() - w.scale();
        for (int n = 0; n < count; ++n) {
          const DyadicInterval J{k, n, w.L()};
          double a = 0.0;
          for (int x = 0; x < N; ++x)
            if (mass[static_cast<std::size_t>(x)] != 0.0) a += mass[static_cast<std::size_t>(x)] * phi(J, x, M_);
          prefix[static_cast<std::size_t>(n) + 1] = prefix[static_cast<std::size_t>(n)] + a / N;
        }
      }
      prefix_.push_back(std::move(prefix));
    }
  }

  double dual() const { return rp_; }
  double M() const { return M_; }

  // (1/|I|) sum_omega int |h_omega|^{r'} Phi^omega_I, before the 1/r' root.
  double integral(const DyadicInterval& I, const std::set<std::size_t>& squares) const {
    double s = 0.0;
    for (auto sq : squares) {
      const auto& w = pop_->collection()[sq];
      const int k = w.L() - w.scale();
      const auto& p = prefix_[sq];
      s += p[static_cast<std::size_t>(I.end() >> k)] - p[static_cast<std::size_t>(I.begin() >> k)];
    }
    return s * I.grid_size() / I.length();
  }

  // Squares of the stock tiles <=_j top.
  std::set<std::size_t> squares_below(std::size_t top, Orientation o, const std::vector<char>& stock) const {
    std::set<std::size_t> out;
    const auto& T = (*pop_)[top];
    for (std::size_t i = 0; i < pop_->size(); ++i)
      if (stock[i] && tile_order((*pop_)[i], T, o)) out.insert((*pop_)[i].square_index);
    return out;
  }

  std::vector<std::size_t> members_below(std::size_t top, Orientation o, const std::vector<char>& stock) const {
    std::vector<std::size_t> out;
    const auto& T = (*pop_)[top];
    for (std::size_t i = 0; i < pop_->size(); ++i)
      if (stock[i] && tile_order((*pop_)[i], T, o)) out.push_back(i);
    return out;
  }

  // Value of the maximal row/column with this top inside the stock.
  double value(std::size_t top, Orientation o, const std::vector<char>& stock) const {
    return std::pow(integral((*pop_)[top].I, squares_below(top, o, stock)), 1.0 / rp_);
  }

  // Value of an explicit tree (its own squares only).
  double tree_value(const TileTree& tree) const {
    std::set<std::size_t> sq;
    for (auto m : tree.members) sq.insert((*pop_)[m].square_index);
    return std::pow(integral((*pop_)[tree.top].I, sq), 1.0 / rp_);
  }

  // Size^3 of the stock: maximal rows and columns dominate every sub-row/column.
  double size(const std::vector<char>& stock) const {
    double best = 0.0;
    for (std::size_t t = 0; t < pop_->size(); ++t) {
      if (!stock[t]) continue;
      for (auto o : {Orientation::column, Orientation::row}) best = std::max(best, value(t, o, stock));
    }
    return best;
  }

  double size() const { return size(std::vector<char>(pop_->size(), 1)); }

  double size(const std::vector<std::size_t>& subset) const {
    std::vector<char> stock(pop_->size(), 0);
    for (auto i : subset) stock[i] = 1;
    return size(stock);
  }

  const TilePopulation& population() const { return *pop_; }

 private:
  const TilePopulation* pop_;
  double rp_;
  double M_;
  std::vector<std::vector<double>> prefix_;
};

inline double size3(const TilePopulation& pop, const VectorFunction& h, double r, double M = 10.0) {
  return Size3Evaluator(pop, h, r, M).size();
}

enum class EnergyMode { exact, greedy };

inline const char* to_string(EnergyMode m) { return m == EnergyMode::exact ? "exact" : "greedy"; }

/// Realizing family for an energy value: level 2^n, trees, and the value.
struct EnergyCertificate {
  std::string kind;  // "energy1", "energy2", "energy3"
  EnergyMode mode = EnergyMode::exact;
  int level = 0;
  double value = 0.0;
  double top_measure = 0.0;  // sum of |I_Top| in physical units
  std::vector<TileTree> family;
};

namespace detail {

inline int floor_log2(double x) { return static_cast<int>(std::floor(std::log2(x))); }

// Distinct floor(log2) levels of the positive entries, descending.
inline std::vector<int> dyadic_levels(const std::vector<double>& v) {
  std::set<int, std::greater<>> lv;
  for (double x : v)
    if (x > 0.0) lv.insert(floor_log2(x));
  return {lv.begin(), lv.end()};
}

// Stopping-time extraction of maximal trees from a stock under <=_o.
// Picks a <_o-maximal tile with minimal inf I, then maximal sup omega_o,
// then lowest index; extracts every stock tile below it.
inline std::vector<TileTree> stopping_time_trees(const TilePopulation& pop, std::vector<char> stock, Orientation o) {
  std::vector<TileTree> out;
  const int j = order_index(o);
  while (true) {
    std::optional<std::size_t> pick;
    for (std::size_t p = 0; p < pop.size(); ++p) {
      if (!stock[p]) continue;
      bool maximal = true;
      for (std::size_t q = 0; q < pop.size() && maximal; ++q)
        if (stock[q] && q != p && tile_order(pop[p], pop[q], j) && !same_tile(pop[p], pop[q], j)) maximal = false;
      if (!maximal) continue;
      if (!pick) {
        pick = p;
        continue;
      }
      const auto& a = pop[p];
      const auto& b = pop[*pick];
      if (a.I.begin() < b.I.begin() || (a.I.begin() == b.I.begin() && a.omega(j).end() > b.omega(j).end()))
        pick = p;
    }
    if (!pick) break;
    TileTree tree{*pick, {}, o};
    for (std::size_t q = 0; q < pop.size(); ++q)
      if (stock[q] && tile_order(pop[q], pop[*pick], j)) {
        tree.members.push_back(q);
        stock[q] = 0;
      }
    out.push_back(std::move(tree));
  }
  return out;
}

inline double top_measure(const TilePopulation& pop, const std::vector<TileTree>& fam) {
  double s = 0.0;
  for (const auto& t : fam) s += pop[t.top].spatial_length();
  return s;
}

}  // namespace detail

/// Maximum-weight antichain of the j-th tiles of a stock (weights |I| in grid
/// points); distinct tri-tiles sharing a j-th tile count once. Returns
/// representative tile indices.
inline std::pair<std::int64_t, std::vector<std::size_t>> heavy_antichain(const TilePopulation& pop,
                                                                         const std::vector<std::size_t>& heavy,
                                                                         Orientation o) {
  const int j = order_index(o);
  std::vector<std::size_t> reps;
  for (auto p : heavy) {
    bool dup = false;
    for (auto q : reps) dup = dup || same_tile(pop[p], pop[q], j);
    if (!dup) reps.push_back(p);
  }
  std::vector<std::int64_t> w;
  for (auto p : reps) w.push_back(pop[p].I.length());
  const auto ac = max_weight_antichain(w, [&](int u, int v) { return tile_order(pop[reps[u]], pop[reps[v]], j); });
  std::vector<std::size_t> members;
  for (int v : ac.members) members.push_back(reps[static_cast<std::size_t>(v)]);
  return {ac.weight, members};
}

/// Energy^j: max over levels n of 2^n (sum |I_Top|)^(1/r0) over mutually
/// disjoint columns (rows) whose tiles all have coefficient >= 2^n.
inline EnergyCertificate energy12(const TilePopulation& pop, const TileCoefficients& c, Orientation o,
                                  EnergyMode mode = EnergyMode::exact,
                                  const std::vector<std::size_t>* subset = nullptr) {
  EnergyCertificate best;
  best.kind = o == Orientation::column ? "energy1" : "energy2";
  best.mode = mode;
  const auto& coef = c.of(o);
  std::vector<std::size_t> domain;
  if (subset) {
    domain = *subset;
  } else {
    domain.resize(pop.size());
    std::iota(domain.begin(), domain.end(), std::size_t{0});
  }
  std::vector<double> values;
  for (auto i : domain) values.push_back(coef[i]);
  const double N = pop.N();
  for (int n : detail::dyadic_levels(values)) {
    const double thr = std::ldexp(1.0, n);
    std::vector<std::size_t> heavy;
    for (auto i : domain)
      if (coef[i] >= thr) heavy.push_back(i);
    EnergyCertificate cand;
    cand.kind = best.kind;
    cand.mode = mode;
    cand.level = n;
    if (mode == EnergyMode::exact) {
      const auto [weight, members] = heavy_antichain(pop, heavy, o);
      cand.top_measure = static_cast<double>(weight) / N;
      for (auto m : members) cand.family.push_back({m, {m}, o});
    } else {
      std::vector<char> stock(pop.size(), 0);
      for (auto i : heavy) stock[i] = 1;
      cand.family = detail::stopping_time_trees(pop, stock, o);
      cand.top_measure = detail::top_measure(pop, cand.family);
    }
    cand.value = thr * std::pow(cand.top_measure, 1.0 / c.r0);
    if (cand.value > best.value) best = std::move(cand);
  }
  return best;
}

namespace detail {

struct Candidate {
  std::size_t top;
  Orientation o;
};

// Tops ordered by |I| descending, inf I ascending, sup omega_j descending.
inline std::vector<Candidate> size3_candidates(const TilePopulation& pop, const std::vector<char>& stock) {
  std::vector<Candidate> c;
  for (std::size_t t = 0; t < pop.size(); ++t)
    if (stock[t])
      for (auto o : {Orientation::column, Orientation::row}) c.push_back({t, o});
  std::stable_sort(c.begin(), c.end(), [&](const Candidate& a, const Candidate& b) {
    const auto& A = pop[a.top];
    const auto& B = pop[b.top];
    if (A.I.length() != B.I.length()) return A.I.length() > B.I.length();
    if (A.I.begin() != B.I.begin()) return A.I.begin() < B.I.begin();
    return A.omega(a.o).end() > B.omega(b.o).end();
  });
  return c;
}

// One pass of Size^3 stopping time: extract the maximal tree of each
// candidate still in stock whose value passes the test.
template <class Passes>
std::vector<TileTree> size3_extract(const Size3Evaluator& ev, std::vector<char>& stock, Passes passes) {
  std::vector<TileTree> out;
  const auto& pop = ev.population();
  for (const auto& cand : size3_candidates(pop, stock)) {
    if (!stock[cand.top]) continue;
    if (!passes(ev.value(cand.top, cand.o, stock))) continue;
    TileTree tree{cand.top, ev.members_below(cand.top, cand.o, stock), cand.o};
    for (auto m : tree.members) stock[m] = 0;
    out.push_back(std::move(tree));
  }
  return out;
}

}  // namespace detail

/// Greedy certificate for Energy^3: per dyadic level, a stopping-time family
/// of mutually disjoint rows and columns each of value >= 2^n. A lower bound
/// for the supremum.
inline EnergyCertificate energy3(const Size3Evaluator& ev, const std::vector<std::size_t>* subset = nullptr) {
  const auto& pop = ev.population();
  std::vector<char> base(pop.size(), subset ? 0 : 1);
  if (subset)
    for (auto i : *subset) base[i] = 1;
  std::vector<double> values;
  for (std::size_t t = 0; t < pop.size(); ++t)
    if (base[t])
      for (auto o : {Orientation::column, Orientation::row}) values.push_back(ev.value(t, o, base));
  EnergyCertificate best;
  best.kind = "energy3";
  best.mode = EnergyMode::greedy;
  for (int n : detail::dyadic_levels(values)) {
    const double thr = std::ldexp(1.0, n);
    auto stock = base;
    EnergyCertificate cand;
    cand.kind = best.kind;
    cand.mode = EnergyMode::greedy;
    cand.level = n;
    cand.family = detail::size3_extract(ev, stock, [thr](double v) { return v >= thr; });
    cand.top_measure = detail::top_measure(pop, cand.family);
    cand.value = thr * std::pow(cand.top_measure, 1.0 / ev.dual());
    if (cand.value > best.value) best = std::move(cand);
  }
  return best;
}

inline EnergyCertificate energy3(const TilePopulation& pop, const VectorFunction& h, double r, double M = 10.0) {
  return energy3(Size3Evaluator(pop, h, r, M));
}

}  // namespace rdflab
