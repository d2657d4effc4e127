#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rdflab/dyadic.hpp"

namespace rdflab {

enum class Orientation { column = 1, row = 2 };

inline int order_index(Orientation o) { return o == Orientation::column ? 1 : 2; }
inline const char* to_string(Orientation o) { return o == Orientation::column ? "column" : "row"; }

/// Tri-tile (I x omega1, I x omega2, I x omega3) with |I| |omega| = 1.
///
/// The spatial interval I is stored in grid points: it has N / |omega| points,
/// so its physical length on the unit torus is exactly 1 / |omega|.
struct TriTile {
  DyadicSquare square;
  DyadicInterval I;
  CyclicInterval omega3;
  std::size_t square_index = 0;
  std::size_t id = 0;

  const DyadicInterval& omega(int j) const { return square.omega(j); }
  const DyadicInterval& omega(Orientation o) const { return square.omega(order_index(o)); }
  int N() const { return I.grid_size(); }
  double spatial_length() const { return static_cast<double>(I.length()) / I.grid_size(); }

  // Tri-tile identity: same square and same spatial interval.
  bool same_as(const TriTile& o) const { return square == o.square && I == o.I; }
};

inline TriTile make_tile(const DyadicSquare& w, int spatial_position, std::size_t square_index = 0,
                         std::size_t id = 0) {
  const int L = w.L();
  const int spatial_k = L - w.scale();
  return {w, make_interval(spatial_k, spatial_position, L), dual_support(w, 1 << L), square_index, id};
}

/// P <=_j Q: omega_j(P) contains omega_j(Q) and I_P is inside I_Q (or P = Q).
inline bool tile_order(const TriTile& P, const TriTile& Q, int j) {
  if (P.same_as(Q)) return true;
  return P.omega(j).contains(Q.omega(j)) && Q.I.contains(P.I);
}

inline bool tile_order(const TriTile& P, const TriTile& Q, Orientation o) { return tile_order(P, Q, order_index(o)); }

// The j-th tiles I_P x omega_j(P) and I_Q x omega_j(Q) meet in the time-frequency plane.
inline bool tiles_intersect(const TriTile& P, const TriTile& Q, int j) {
  return P.I.intersects(Q.I) && P.omega(j).intersects(Q.omega(j));
}

// Same j-th tile rectangle (the <=_j preorder identifies these).
inline bool same_tile(const TriTile& P, const TriTile& Q, int j) { return P.I == Q.I && P.omega(j) == Q.omega(j); }

struct SpatialWindow {
  int begin = 0;
  std::optional<int> end;  // exclusive; whole torus when unset

  static SpatialWindow all() { return {}; }
};

/// Indexed collection of tri-tiles over a square collection.
class TilePopulation {
 public:
  TilePopulation() = default;
  TilePopulation(std::shared_ptr<const SquareCollection> omega, std::vector<TriTile> tiles)
      : omega_(std::move(omega)), tiles_(std::move(tiles)) {
    detail::require(omega_ != nullptr, "tile population without a square collection");
    for (const auto& t : tiles_)
      detail::require(t.square_index < omega_->size() && (*omega_)[t.square_index] == t.square,
                      "tile square " + describe(t.square) + " is not in the collection");
  }

  const SquareCollection& collection() const { return *omega_; }
  const std::shared_ptr<const SquareCollection>& collection_ptr() const { return omega_; }
  const std::vector<TriTile>& tiles() const { return tiles_; }
  std::size_t size() const { return tiles_.size(); }
  bool empty() const { return tiles_.empty(); }
  const TriTile& operator[](std::size_t i) const { return tiles_[i]; }
  auto begin() const { return tiles_.begin(); }
  auto end() const { return tiles_.end(); }
  int N() const { return omega_ ? omega_->N() : 1; }

  // Omega(P): indices of the squares that carry at least one tile.
  std::vector<std::size_t> squares_present() const {
    std::set<std::size_t> seen;
    for (const auto& t : tiles_) seen.insert(t.square_index);
    return {seen.begin(), seen.end()};
  }

  TilePopulation subset(const std::vector<std::size_t>& indices) const {
    std::vector<TriTile> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(tiles_.at(i));
    return {omega_, std::move(out)};
  }

 private:
  std::shared_ptr<const SquareCollection> omega_;
  std::vector<TriTile> tiles_;
};

/// All tri-tiles of the collection whose spatial interval lies in the window:
/// |omega| tiles per square on the full torus.
inline TilePopulation tiles_for(const SquareCollection& omega, SpatialWindow window = SpatialWindow::all()) {
  auto shared = std::make_shared<const SquareCollection>(omega);
  const int N = omega.N();
  const int lo = window.begin;
  const int hi = window.end.value_or(N);
  detail::require(0 <= lo && lo <= hi && hi <= N, "spatial window outside the torus");
  std::vector<TriTile> tiles;
  std::size_t id = 0;
  for (std::size_t s = 0; s < omega.size(); ++s) {
    const auto& w = omega[s];
    for (int pos = 0; pos < w.side(); ++pos) {
      TriTile t = make_tile(w, pos, s, 0);
      if (t.I.begin() < lo || t.I.end() > hi) continue;
      t.id = id++;
      tiles.push_back(t);
    }
  }
  return {std::move(shared), std::move(tiles)};
}

/// A column (every member <=_1 top) or a row (every member <=_2 top). Indices
/// refer to a TilePopulation.
struct TileTree {
  std::size_t top = 0;
  std::vector<std::size_t> members;  // includes top
  Orientation orientation = Orientation::column;
};

// A tree is a valid column/row of pop.
inline bool is_valid_tree(const TilePopulation& pop, const TileTree& tree) {
  if (tree.top >= pop.size()) return false;
  bool has_top = false;
  for (auto m : tree.members) {
    if (m >= pop.size()) return false;
    if (m == tree.top) has_top = true;
    if (!tile_order(pop[m], pop[tree.top], tree.orientation)) return false;
  }
  return has_top;
}

/// Mutually disjoint trees: disjoint as tri-tile sets, and tops of the same
/// orientation pairwise incomparable (their j-th tiles are disjoint). Returns a
/// description of the first violation, or nullopt.
inline std::optional<std::string> family_violation(const TilePopulation& pop, const std::vector<TileTree>& family) {
  std::set<std::size_t> used;
  for (std::size_t a = 0; a < family.size(); ++a) {
    if (!is_valid_tree(pop, family[a])) return "member " + std::to_string(a) + " is not a valid tree";
    for (auto m : family[a].members)
      if (!used.insert(m).second) return "tile " + std::to_string(m) + " appears in two trees";
  }
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b) {
      if (family[a].orientation != family[b].orientation) continue;
      const int j = order_index(family[a].orientation);
      if (tiles_intersect(pop[family[a].top], pop[family[b].top], j))
        return "tops of trees " + std::to_string(a) + " and " + std::to_string(b) + " are comparable";
    }
  return std::nullopt;
}

}  // namespace rdflab
