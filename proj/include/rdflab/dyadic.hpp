#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rdflab/error.hpp"

namespace rdflab {

inline constexpr bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

// log2 of a power of two; throws otherwise.
inline int exact_log2(std::int64_t n) {
  detail::require(is_power_of_two(n), "size " + std::to_string(n) + " is not a power of two");
  int l = 0;
  while ((std::int64_t{1} << l) < n) ++l;
  return l;
}

inline constexpr int positive_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

/// Half-open dyadic interval [n 2^k, (n+1) 2^k) inside [0, 2^L).
///
/// The same type carries frequency intervals (units of integer frequencies) and
/// spatial intervals (units of grid points); the caller knows which.
struct DyadicInterval {
  int k = 0;
  int n = 0;
  int L = 0;

  constexpr int begin() const { return n << k; }
  constexpr int end() const { return (n + 1) << k; }
  constexpr int length() const { return 1 << k; }
  constexpr int grid_size() const { return 1 << L; }

  constexpr bool contains(int x) const { return x >= begin() && x < end(); }
  constexpr bool contains(const DyadicInterval& other) const {
    return other.k <= k && other.begin() >= begin() && other.end() <= end();
  }
  constexpr bool intersects(const DyadicInterval& other) const {
    return begin() < other.end() && other.begin() < end();
  }

  constexpr DyadicInterval parent() const { return {k + 1, n / 2, L}; }

  auto operator<=>(const DyadicInterval&) const = default;
};

inline DyadicInterval make_interval(int k, int n, int L) {
  detail::require(L >= 0 && L <= 30, "grid exponent L out of range: " + std::to_string(L));
  detail::require(k >= 0 && k <= L, "scale exponent k=" + std::to_string(k) + " outside [0, L]");
  detail::require(n >= 0 && n < (1 << (L - k)),
                  "position n=" + std::to_string(n) + " outside [0, 2^(L-k))");
  return {k, n, L};
}

// The dyadic interval of length 2^k containing the point x.
inline DyadicInterval dyadic_containing(int x, int k, int L) { return make_interval(k, x >> k, L); }

enum class Relation { disjoint, equal, first_inside_second, second_inside_first };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::disjoint: return "disjoint";
    case Relation::equal: return "equal";
    case Relation::first_inside_second: return "first_inside_second";
    case Relation::second_inside_first: return "second_inside_first";
  }
  return "?";
}

// Dyadic trichotomy. Partial overlap is impossible for valid dyadic intervals.
inline Relation relation(const DyadicInterval& a, const DyadicInterval& b) {
  detail::require(a.L == b.L, "relation: intervals live on different grids");
  if (a == b) return Relation::equal;
  if (!a.intersects(b)) return Relation::disjoint;
  return a.k < b.k ? Relation::first_inside_second : Relation::second_inside_first;
}

/// Arc [start, start + length) on the cyclic group Z_N.
struct CyclicInterval {
  int start = 0;
  int length = 0;
  int N = 1;

  static CyclicInterval full(int N) { return {0, N, N}; }
  static CyclicInterval from(const DyadicInterval& I) { return {I.begin(), I.length(), I.grid_size()}; }

  bool is_full() const { return length >= N; }
  bool contains(int x) const { return is_full() || positive_mod(x - start, N) < length; }
  bool wraps() const { return !is_full() && start + length > N; }

  std::vector<int> points() const {
    std::vector<int> out;
    const int count = std::min(length, N);
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(positive_mod(start + i, N));
    return out;
  }

  auto operator<=>(const CyclicInterval&) const = default;
};

/// Dyadic frequency square omega1 x omega2 with |omega1| = |omega2|.
struct DyadicSquare {
  DyadicInterval omega1;
  DyadicInterval omega2;

  constexpr int side() const { return omega1.length(); }
  constexpr int scale() const { return omega1.k; }
  constexpr int L() const { return omega1.L; }
  const DyadicInterval& omega(int j) const { return j == 1 ? omega1 : omega2; }

  constexpr bool intersects(const DyadicSquare& o) const {
    return omega1.intersects(o.omega1) && omega2.intersects(o.omega2);
  }
  constexpr bool contains(const DyadicSquare& o) const {
    return omega1.contains(o.omega1) && omega2.contains(o.omega2);
  }

  auto operator<=>(const DyadicSquare&) const = default;
};

// Square [nx 2^k, (nx+1) 2^k) x [ny 2^k, (ny+1) 2^k) on the grid 2^L.
inline DyadicSquare make_square(int k, int nx, int ny, int L) {
  return {make_interval(k, nx, L), make_interval(k, ny, L)};
}

inline std::string describe(const DyadicInterval& I) {
  return "[" + std::to_string(I.begin()) + "," + std::to_string(I.end()) + ")";
}

inline std::string describe(const DyadicSquare& w) { return describe(w.omega1) + "x" + describe(w.omega2); }

/// Pairwise-disjoint dyadic squares on the frequency torus Z_N, N = 2^L.
class SquareCollection {
 public:
  SquareCollection() = default;

  int L() const { return L_; }
  int N() const { return 1 << L_; }
  const std::vector<DyadicSquare>& squares() const { return squares_; }
  std::size_t size() const { return squares_.size(); }
  bool empty() const { return squares_.empty(); }
  const DyadicSquare& operator[](std::size_t i) const { return squares_[i]; }
  auto begin() const { return squares_.begin(); }
  auto end() const { return squares_.end(); }

  std::optional<std::size_t> index_of(const DyadicSquare& w) const {
    const auto it = std::find(squares_.begin(), squares_.end(), w);
    if (it == squares_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - squares_.begin());
  }

  friend SquareCollection validate_collection(std::vector<DyadicSquare> squares, int L);

  friend bool operator==(const SquareCollection&, const SquareCollection&) = default;

 private:
  int L_ = 0;
  std::vector<DyadicSquare> squares_;
};

// First overlapping pair (i < j), if any.
inline std::optional<std::pair<std::size_t, std::size_t>> first_overlap(
    const std::vector<DyadicSquare>& squares) {
  for (std::size_t i = 0; i < squares.size(); ++i)
    for (std::size_t j = i + 1; j < squares.size(); ++j) {
      const bool first = relation(squares[i].omega1, squares[j].omega1) != Relation::disjoint;
      const bool second = relation(squares[i].omega2, squares[j].omega2) != Relation::disjoint;
      if (first && second) return std::pair{i, j};
    }
  return std::nullopt;
}

inline SquareCollection validate_collection(std::vector<DyadicSquare> squares, int L) {
  detail::require(L >= 0 && L <= 30, "grid exponent L out of range");
  for (const auto& w : squares) {
    detail::require(w.omega1.L == L && w.omega2.L == L, "square " + describe(w) + " is not on grid 2^" +
                                                           std::to_string(L));
    detail::require(w.omega1.k == w.omega2.k, "rectangle " + describe(w) + " is not a square");
    detail::require(w.omega1.n >= 0 && w.omega1.n < (1 << (L - w.omega1.k)) && w.omega2.n >= 0 &&
                        w.omega2.n < (1 << (L - w.omega2.k)),
                    "square " + describe(w) + " outside the frequency range");
  }
  if (const auto hit = first_overlap(squares)) {
    throw ValidationError("squares " + std::to_string(hit->first) + " " + describe(squares[hit->first]) +
                          " and " + std::to_string(hit->second) + " " + describe(squares[hit->second]) +
                          " overlap");
  }
  SquareCollection out;
  out.L_ = L;
  out.squares_ = std::move(squares);
  return out;
}

/// Frequency support of the third tile: the length-4|w| arc centred at the
/// reflected centre c = -a1 - a2 - |w| + 1 (mod N), which contains the cyclic
/// sum-set {-xi - eta : xi in omega1, eta in omega2}. Returns the whole circle
/// when 4|w| > N.
inline CyclicInterval dual_support(const DyadicSquare& w, int N) {
  const int side = w.side();
  if (4 * static_cast<std::int64_t>(side) > N) return CyclicInterval::full(N);
  const int centre = positive_mod(-static_cast<std::int64_t>(w.omega1.begin()) - w.omega2.begin() - side + 1, N);
  return {positive_mod(centre - 2 * side, N), 4 * side, N};
}

// Reflected centre used by dual_support and the smooth bump.
inline int reflected_centre(const DyadicSquare& w, int N) {
  return positive_mod(-static_cast<std::int64_t>(w.omega1.begin()) - w.omega2.begin() - w.side() + 1, N);
}

}  // namespace rdflab
