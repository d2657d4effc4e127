#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rdflab/dyadic.hpp"

namespace rdflab {

/// splitmix64 finalizer; seeds independent streams from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

inline int ceil_log2(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  return k;
}

}  // namespace detail

/// K squares through one vertical frequency line: a random dyadic partition
/// of [0, N) into K intervals omega2, each paired with the dyadic omega1 of
/// the same length containing a random xi0.
inline SquareCollection gen_line(int K, int N, std::uint64_t seed) {
  const int L = exact_log2(N);
  detail::require(K >= 1, "gen_line needs K >= 1");
  detail::require(K <= N, "gen_line: K = " + std::to_string(K) + " is infeasible; the maximal feasible K is " +
                              std::to_string(N));
  std::mt19937_64 rng(splitmix64(seed, 1));
  std::vector<DyadicInterval> parts = {make_interval(L, 0, L)};
  while (static_cast<int>(parts.size()) < K) {
    std::vector<std::size_t> splittable;
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (parts[i].k > 0) splittable.push_back(i);
    const auto i = splittable[rng() % splittable.size()];
    const auto I = parts[i];
    parts[i] = {I.k - 1, 2 * I.n, L};
    parts.push_back({I.k - 1, 2 * I.n + 1, L});
  }
  const int xi0 = static_cast<int>(rng() % static_cast<unsigned>(N));
  std::vector<DyadicSquare> out;
  for (const auto& J : parts) out.push_back({dyadic_containing(xi0, J.k, L), J});
  return validate_collection(std::move(out), L);
}

/// m x m squares on a lattice with spacing W = N / 2^ceil(log2 m). Square
/// (i, j) has a random side s <= W/2 and omega1, omega2 the dyadic intervals
/// of length s containing i W + W/2 and j W + W/2, so each column shares a
/// frequency in omega1 and each row one in omega2.
inline SquareCollection gen_grid(int m, int N, std::uint64_t seed) {
  const int L = exact_log2(N);
  detail::require(m >= 1, "gen_grid needs m >= 1");
  const int W = N >> detail::ceil_log2(m);
  detail::require(W >= 2, "gen_grid: m = " + std::to_string(m) + " is infeasible at N = " + std::to_string(N) +
                              "; the maximal feasible m is " + std::to_string(N / 2));
  std::mt19937_64 rng(splitmix64(seed, 2));
  const int kmax = exact_log2(W) - 1;
  std::vector<DyadicSquare> out;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int k = static_cast<int>(rng() % static_cast<unsigned>(kmax + 1));
      out.push_back({dyadic_containing(i * W + W / 2, k, L), dyadic_containing(j * W + W / 2, k, L)});
    }
  return validate_collection(std::move(out), L);
}

/// {I x J} over I_count disjoint dyadic intervals and J_count others, all of
/// one random common length.
inline SquareCollection gen_product(int I_count, int J_count, int N, std::uint64_t seed) {
  const int L = exact_log2(N);
  detail::require(I_count >= 1 && J_count >= 1, "gen_product needs positive counts");
  const int need = std::max(I_count, J_count);
  detail::require(need <= N, "gen_product: counts exceed N = " + std::to_string(N));
  std::mt19937_64 rng(splitmix64(seed, 3));
  const int kmax = L - detail::ceil_log2(need);
  const int k = static_cast<int>(rng() % static_cast<unsigned>(kmax + 1));
  auto pick = [&](int count) {
    std::vector<int> slots(static_cast<std::size_t>(1 << (L - k)));
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = static_cast<int>(i);
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(static_cast<std::size_t>(count));
    std::sort(slots.begin(), slots.end());
    return slots;
  };
  const auto xs = pick(I_count);
  const auto ys = pick(J_count);
  std::vector<DyadicSquare> out;
  for (int x : xs)
    for (int y : ys) out.push_back(make_square(k, x, y, L));
  return validate_collection(std::move(out), L);
}

/// Greedy random insertion of disjoint dyadic squares with random sides up to
/// N / 2^(1 + ceil(log2 K)/2), until K are accepted or the attempt budget runs out.
inline SquareCollection gen_random_packing(int K, int N, std::uint64_t seed, int attempts_per_square = 1000) {
  const int L = exact_log2(N);
  detail::require(K >= 1, "gen_random_packing needs K >= 1");
  std::mt19937_64 rng(splitmix64(seed, 4));
  const int kmax = std::max(0, L - 1 - (detail::ceil_log2(K) + 1) / 2);
  std::vector<DyadicSquare> out;
  const long budget = static_cast<long>(attempts_per_square) * K;
  for (long a = 0; a < budget && static_cast<int>(out.size()) < K; ++a) {
    const int k = static_cast<int>(rng() % static_cast<unsigned>(kmax + 1));
    const unsigned slots = 1u << (L - k);
    const auto w = make_square(k, static_cast<int>(rng() % slots), static_cast<int>(rng() % slots), L);
    bool ok = true;
    for (const auto& o : out) ok = ok && !o.intersects(w);
    if (ok) out.push_back(w);
  }
  detail::require(static_cast<int>(out.size()) == K, "gen_random_packing: placed only " + std::to_string(out.size()) +
                                                         " of " + std::to_string(K) + " squares");
  return validate_collection(std::move(out), L);
}

/// Dispatch by name: "line", "grid" (K must be a square m^2), "product"
/// (K = I J with I = J = sqrt K unless given), "packing".
inline SquareCollection generate(const std::string& name, int K, int N, std::uint64_t seed) {
  auto root = [&](const char* who) {
    int m = 1;
    while (m * m < K) ++m;
    detail::require(m * m == K, std::string(who) + " needs K to be a perfect square, got " + std::to_string(K));
    return m;
  };
  if (name == "line") return gen_line(K, N, seed);
  if (name == "grid") return gen_grid(root("grid"), N, seed);
  if (name == "product") {
    const int m = root("product");
    return gen_product(m, m, N, seed);
  }
  if (name == "packing") return gen_random_packing(K, N, seed);
  throw ValidationError("unknown generator '" + name + "' (expected line, grid, product or packing)");
}

}  // namespace rdflab
