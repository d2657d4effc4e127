#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdflab/collection_io.hpp"
#include "rdflab/dyadic.hpp"
#include "rdflab/operators.hpp"
#include "rdflab/signal.hpp"

namespace rdflab {

/// Coefficients a_omega on a finite family of dyadic squares, which need not
/// be disjoint.
class CoefficientFamily {
 public:
  CoefficientFamily() = default;
  CoefficientFamily(int L, double beta, std::map<DyadicSquare, cd> a) : L_(L), beta_(beta), a_(std::move(a)) {
    detail::require(beta > 0.0 && beta < 2.0, "coefficient exponent beta must lie in (0, 2)");
    for (const auto& [w, c] : a_) {
      detail::require(w.L() == L, "coefficient square " + describe(w) + " on the wrong grid");
      detail::require(std::isfinite(c.real()) && std::isfinite(c.imag()), "non-finite coefficient");
    }
  }

  int L() const { return L_; }
  int N() const { return 1 << L_; }
  double beta() const { return beta_; }
  const std::map<DyadicSquare, cd>& coefficients() const { return a_; }
  std::size_t size() const { return a_.size(); }

  cd at(const DyadicSquare& w) const {
    const auto it = a_.find(w);
    return it == a_.end() ? cd(0.0) : it->second;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& [w, c] : a_) s += std::pow(std::abs(c), beta_);
    return std::pow(s, 1.0 / beta_);
  }

  std::vector<DyadicSquare> squares() const {
    std::vector<DyadicSquare> v;
    for (const auto& [w, c] : a_) v.push_back(w);
    return v;
  }

 private:
  int L_ = 0;
  double beta_ = 1.0;
  std::map<DyadicSquare, cd> a_;
};

// File format: header {"L": L, "beta": beta}, then one
// {"k", "nx", "ny", "re", "im"} record per square.
inline void write_family(std::ostream& out, const CoefficientFamily& fam) {
  nlohmann::ordered_json head;
  head["L"] = fam.L();
  head["beta"] = fam.beta();
  out << head.dump() << '\n';
  for (const auto& [w, c] : fam.coefficients()) {
    auto rec = square_record(w);
    rec["re"] = c.real();
    rec["im"] = c.imag();
    out << rec.dump() << '\n';
  }
}

inline CoefficientFamily read_family(std::istream& in) {
  const auto records = detail::read_records(in);
  const auto& head = records.front();
  detail::require(head.contains("beta"), "coefficient file lacks \"beta\" in its header");
  const int L = head.at("L").get<int>();
  std::map<DyadicSquare, cd> a;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto w = square_from_record(rec, L);
    const cd c(rec.value("re", 0.0), rec.value("im", 0.0));
    detail::require(a.emplace(w, c).second, "square " + describe(w) + " listed twice");
  }
  return {L, head.at("beta").get<double>(), std::move(a)};
}

inline CoefficientFamily load_family(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open " + path);
  return read_family(in);
}

struct CarlesonCheck {
  bool ok = false;
  double C = 0.0;  // smallest constant, when ok
  std::string reason;
};

/// Smallest C with sum_{omega' inside omega} |a_omega'|^beta <= C |a_omega|^beta
/// over every omega; the sum includes omega' = omega, so C >= 1.
inline CarlesonCheck check_carleson(const CoefficientFamily& fam) {
  const auto sq = fam.squares();
  std::vector<double> w;
  for (const auto& s : sq) w.push_back(std::pow(std::abs(fam.at(s)), fam.beta()));
  CarlesonCheck out;
  out.ok = true;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    double below = 0.0;
    for (std::size_t j = 0; j < sq.size(); ++j)
      if (j != i && sq[i].contains(sq[j])) below += w[j];
    if (w[i] == 0.0) {
      if (below > 0.0) {
        out.ok = false;
        out.C = kInfinity;
        out.reason = "a = 0 on " + describe(sq[i]) + " but not on a square inside it";
        return out;
      }
      continue;
    }
    out.C = std::max(out.C, (w[i] + below) / w[i]);
  }
  return out;
}

/// Omega_n = {omega : |a_omega| in (2^{-n-1} |a|, 2^{-n} |a|]}; zeros dropped.
inline std::map<int, std::vector<DyadicSquare>> magnitude_partition(const CoefficientFamily& fam) {
  const double A = fam.norm();
  detail::require(A > 0.0, "magnitude_partition needs a nonzero family");
  std::map<int, std::vector<DyadicSquare>> bins;
  for (const auto& [w, c] : fam.coefficients()) {
    const double m = std::abs(c);
    if (m == 0.0) continue;
    int n = static_cast<int>(std::floor(std::log2(A / m)));
    while (n > 0 && m > std::ldexp(A, -n)) --n;
    while (m <= std::ldexp(A, -n - 1)) ++n;
    bins[n].push_back(w);
  }
  return bins;
}

/// Repeatedly peels the squares not contained in another remaining square.
/// Distinct dyadic squares are nested or disjoint, so each layer is disjoint.
inline std::vector<SquareCollection> generational_decomposition(std::vector<DyadicSquare> squares, int L) {
  std::vector<SquareCollection> layers;
  while (!squares.empty()) {
    std::vector<DyadicSquare> top, rest;
    for (const auto& w : squares) {
      bool maximal = true;
      for (const auto& o : squares)
        if (!(o == w) && o.contains(w)) maximal = false;
      (maximal ? top : rest).push_back(w);
    }
    layers.push_back(validate_collection(std::move(top), L));
    squares = std::move(rest);
  }
  return layers;
}

enum class MultiplierMode { grouped, naive };

/// T_a(f, g) = sum_omega a_omega pi_{omega1} f pi_{omega2} g.
///
/// Grouped mode walks the magnitude bins and their layers; inside a layer the
/// squares sharing omega1 have disjoint omega2, so their g-projections fold
/// into one spectral mask and one inverse transform per distinct omega1.
inline Signal apply_multiplier(const Signal& f, const Signal& g, const CoefficientFamily& fam,
                               MultiplierMode mode = MultiplierMode::grouped) {
  const int N = f.size();
  detail::require(g.size() == N && fam.N() == N, "apply_multiplier: grid mismatch");
  std::vector<cd> acc(static_cast<std::size_t>(N));
  if (mode == MultiplierMode::naive) {
    for (const auto& [w, c] : fam.coefficients()) {
      const auto a = project_spectrum(f.spectrum(), w.omega1);
      const auto b = project_spectrum(g.spectrum(), w.omega2);
      for (int m = 0; m < N; ++m) acc[static_cast<std::size_t>(m)] += c * a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(m)];
    }
    return Signal(std::move(acc));
  }
  if (fam.norm() == 0.0) return Signal(std::move(acc));
  ProjectionCache pf(f);
  const auto gs = g.spectrum();
  for (const auto& [n, bin] : magnitude_partition(fam)) {
    for (const auto& layer : generational_decomposition(bin, fam.L())) {
      std::map<DyadicInterval, std::vector<DyadicSquare>> by_omega1;
      for (const auto& w : layer) by_omega1[w.omega1].push_back(w);
      for (const auto& [I, group] : by_omega1) {
        std::vector<cd> mask(static_cast<std::size_t>(N));
        for (const auto& w : group) {
          const cd c = fam.at(w);
          for (int eta = w.omega2.begin(); eta < w.omega2.end(); ++eta)
            mask[static_cast<std::size_t>(eta)] = c * gs[static_cast<std::size_t>(eta)];
        }
        const auto G = Signal::from_spectrum(std::move(mask));
        const auto& F = pf.get(I);
        for (int m = 0; m < N; ++m) acc[static_cast<std::size_t>(m)] += F[static_cast<std::size_t>(m)] * G[static_cast<std::size_t>(m)];
      }
    }
  }
  return Signal(std::move(acc));
}

/// (sum over the squares of |pi_{omega1} f pi_{omega2} g|^r)^{1/r}, squares
/// possibly nested.
inline std::vector<double> t_r_family(const Signal& f, const Signal& g, const std::vector<DyadicSquare>& squares,
                                      double r) {
  std::vector<double> acc(static_cast<std::size_t>(f.size()), 0.0);
  ProjectionCache pf(f), pg(g);
  for (const auto& w : squares) {
    const auto& a = pf.get(w.omega1);
    const auto& b = pg.get(w.omega2);
    for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += std::pow(std::abs(a[m]) * std::abs(b[m]), r);
  }
  for (auto& v : acc) v = std::pow(v, 1.0 / r);
  return acc;
}

struct BinReport {
  int n = 0;
  std::size_t count = 0;
  double count_bound = 0.0;   // 2^{beta(n+1)}
  double coef_norm = 0.0;     // (sum |a|^{r'})^{1/r'}
  std::size_t layers = 0;
  double tr_norm_s = 0.0;     // ||T^r_{Omega_n}(f, g)||_s
  double tr_norm_1 = 0.0;     // ||T^r_{Omega_n}(f, g)||_{max(s, 1)}
  double term = 0.0;          // 2^{-n} |a| (#Omega_n)^{1/r'} ||T^r||_s
};

struct BoundReport {
  double beta = 0.0, r = 0.0, p = 0.0, q = 0.0, s = 0.0;
  double norm_a = 0.0;
  double carleson_C = 0.0;
  bool layered = false;              // some bin is not a disjoint collection
  std::vector<BinReport> bins;
  double max_pointwise_excess = 0.0; // max_x |T_a(x)| - sum_n Holder term (x), <= 0 when the chain holds
  double mean_abs = 0.0;             // |(1/N) sum_x T_a(x)|
  double final_bound = 0.0;          // sum of the bin terms
  double geometric_factor = 0.0;     // sum over present bins of 2^{-n} 2^{beta(n+1)/r'}
  double geometric_limit = 0.0;      // the full series over n >= 0
  double majorant = 0.0;             // |a| sum_n 2^{-n} 2^{beta(n+1)/r'} ||T^r_{Omega_n}||_{max(s,1)}
};

/// The Holder chain |T_a| <= sum_n (sum_{Omega_n} |a|^{r'})^{1/r'} T^r_{Omega_n}
/// evaluated pointwise, with the per-bin norms and the geometric majorant.
inline BoundReport bound_pipeline(const Signal& f, const Signal& g, const CoefficientFamily& fam, double r, double p,
                                  double q) {
  const double beta = fam.beta();
  const double beta_dual = beta <= 1.0 ? kInfinity : beta / (beta - 1.0);
  detail::require(r > 2.0 && r < beta_dual, "bound_pipeline needs r in (2, beta')");
  detail::require(p > 0.0 && q > 0.0, "bound_pipeline needs positive p, q");
  const double rp = r / (r - 1.0);
  BoundReport rep;
  rep.beta = beta;
  rep.r = r;
  rep.p = p;
  rep.q = q;
  rep.s = 1.0 / (1.0 / p + 1.0 / q);
  rep.norm_a = fam.norm();
  const auto cc = check_carleson(fam);
  rep.carleson_C = cc.ok ? cc.C : kInfinity;
  const double ratio = std::pow(2.0, beta / rp);
  rep.geometric_limit = ratio / (1.0 - ratio / 2.0);
  if (rep.norm_a == 0.0) return rep;

  const int N = f.size();
  const auto T = apply_multiplier(f, g, fam);
  std::vector<double> holder(static_cast<std::size_t>(N), 0.0);
  for (const auto& [n, bin] : magnitude_partition(fam)) {
    BinReport b;
    b.n = n;
    b.count = bin.size();
    b.count_bound = std::pow(2.0, beta * (n + 1));
    double cs = 0.0;
    for (const auto& w : bin) cs += std::pow(std::abs(fam.at(w)), rp);
    b.coef_norm = std::pow(cs, 1.0 / rp);
    b.layers = generational_decomposition(bin, fam.L()).size();
    rep.layered = rep.layered || b.layers > 1;
    const auto tr = t_r_family(f, g, bin, r);
    for (int m = 0; m < N; ++m) holder[static_cast<std::size_t>(m)] += b.coef_norm * tr[static_cast<std::size_t>(m)];
    b.tr_norm_s = lp_norm(tr, rep.s);
    b.tr_norm_1 = lp_norm(tr, std::max(rep.s, 1.0));
    b.term = std::ldexp(rep.norm_a, -n) * std::pow(static_cast<double>(b.count), 1.0 / rp) * b.tr_norm_s;
    rep.final_bound += b.term;
    const double geo = std::ldexp(1.0, -n) * std::pow(2.0, beta * (n + 1) / rp);
    rep.geometric_factor += geo;
    rep.majorant += rep.norm_a * geo * b.tr_norm_1;
    rep.bins.push_back(b);
  }
  rep.max_pointwise_excess = -kInfinity;
  cd mean = 0.0;
  for (int m = 0; m < N; ++m) {
    const auto i = static_cast<std::size_t>(m);
    rep.max_pointwise_excess = std::max(rep.max_pointwise_excess, std::abs(T[i]) - holder[i]);
    mean += T[i];
  }
  rep.mean_abs = std::abs(mean / static_cast<double>(N));
  return rep;
}

/// Random family on 2^L: nested chains are grown by descending into a random
/// quadrant; magnitudes shrink by a random factor in [shrink_lo, shrink_hi]
/// per generation, so the Carleson condition holds with a moderate constant.
inline CoefficientFamily random_family(int L, int roots, int depth, double beta, std::mt19937_64& rng,
                                       double shrink_lo = 0.2, double shrink_hi = 0.6) {
  std::map<DyadicSquare, cd> a;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int k0 = std::max(0, L - 3);
  const int slots = 1 << (L - k0);
  for (int t = 0; t < 8 * roots && static_cast<int>(a.size()) < roots * depth; ++t) {
    auto w = make_square(k0, static_cast<int>(rng() % static_cast<unsigned>(slots)),
                         static_cast<int>(rng() % static_cast<unsigned>(slots)), L);
    if (a.count(w)) continue;
    double mag = 0.5 + U(rng);
    for (int d = 0; d < depth && w.scale() >= 0; ++d) {
      if (!a.count(w)) a.emplace(w, std::polar(mag, 2.0 * std::numbers::pi * U(rng)));
      if (w.scale() == 0) break;
      const int k = w.scale() - 1;
      w = make_square(k, 2 * w.omega1.n + static_cast<int>(rng() % 2u), 2 * w.omega2.n + static_cast<int>(rng() % 2u), L);
      mag *= shrink_lo + (shrink_hi - shrink_lo) * U(rng);
    }
  }
  return {L, beta, std::move(a)};
}

}  // namespace rdflab
