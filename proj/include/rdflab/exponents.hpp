#pragma once

#include <cmath>
#include <string>

#include "rdflab/error.hpp"

namespace rdflab {

/// Exponents p, q, s, r with 1/p + 1/q = 1/s.
struct ExponentTuple {
  double p = 0, q = 0, s = 0, r = 0;

  static ExponentTuple make(double p, double q, double r) {
    detail::require(p > 0 && q > 0 && r >= 1, "exponents must satisfy p, q > 0 and r >= 1");
    return {p, q, 1.0 / (1.0 / p + 1.0 / q), r};
  }

  static ExponentTuple with_s(double p, double q, double s, double r) {
    auto t = make(p, q, r);
    detail::require(std::abs(1.0 / p + 1.0 / q - 1.0 / s) <= 1e-12,
                    "s = " + std::to_string(s) + " violates 1/p + 1/q = 1/s");
    t.s = s;
    return t;
  }

  double r_dual() const { return r / (r - 1.0); }

  // r' < p, q < r and r'/2 < s < r/2, all strict.
  bool in_range() const {
    const double rp = r_dual();
    return rp < p && p < r && rp < q && q < r && rp / 2 < s && s < r / 2;
  }
};

struct AdmissibleRange {
  double r = 0, r_dual = 0;
  double pq_lo = 0, pq_hi = 0;
  double s_lo = 0, s_hi = 0;

  bool contains(const ExponentTuple& t) const {
    return pq_lo < t.p && t.p < pq_hi && pq_lo < t.q && t.q < pq_hi && s_lo < t.s && t.s < s_hi;
  }
};

inline AdmissibleRange admissible_range(double r) {
  detail::require(r > 2.0, "the admissible range is stated for r > 2");
  const double rp = r / (r - 1.0);
  return {r, rp, rp, r, rp / 2, r / 2};
}

}  // namespace rdflab
