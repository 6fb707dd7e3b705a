#pragma once

// Shared helpers for the test suites. Oracles here deliberately avoid the
// library's own fast paths.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "fpinc/fpinc.hpp"

namespace fpinc::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240607);
  return g;
}

inline std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng()); }

inline FieldElem random_elem(const FieldSpec& fs) { return FieldElem::from_canonical(below(fs.p()), fs.p()); }

inline FieldElem random_nonzero(const FieldSpec& fs) { return FieldElem::from_canonical(1 + below(fs.p() - 1), fs.p()); }

inline AffinePoint random_point(const FieldSpec& fs, std::size_t dim = 2) {
  std::vector<FieldElem> c;
  for (std::size_t i = 0; i < dim; ++i) c.push_back(random_elem(fs));
  return AffinePoint(std::move(c));
}

inline PointSet random_point_set(const FieldSpec& fs, std::size_t n, std::size_t dim = 2) {
  std::set<AffinePoint> pts;
  while (pts.size() < n) pts.insert(random_point(fs, dim));
  return PointSet(dim, std::vector<AffinePoint>(pts.begin(), pts.end()));
}

inline Conic random_nondegenerate_conic(const FieldSpec& fs) {
  for (;;) {
    std::array<FieldElem, 6> k{fs.zero(), fs.zero(), fs.zero(), fs.zero(), fs.zero(), fs.zero()};
    bool any = false;
    for (auto& c : k) {
      c = random_elem(fs);
      any = any || !c.is_zero();
    }
    if (!any) continue;
    Conic q = Conic::from_array(k);
    if (is_nondegenerate(q)) return q;
  }
}

/// Extended Euclid inverse, independent of the Fermat path.
inline std::uint64_t egcd_inverse(std::uint64_t a, std::uint64_t p) {
  std::int64_t t = 0, newt = 1;
  std::int64_t r = static_cast<std::int64_t>(p), newr = static_cast<std::int64_t>(a);
  while (newr != 0) {
    const std::int64_t q = r / newr;
    std::tie(t, newt) = std::make_tuple(newt, t - q * newt);
    std::tie(r, newr) = std::make_tuple(newr, r - q * newr);
  }
  if (t < 0) t += static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(t);
}

/// Plain 6-term evaluation with machine integers.
inline bool conic_has(const Conic& q, std::uint64_t x, std::uint64_t y, std::uint64_t z) {
  const std::uint64_t p = q.modulus();
  const auto& k = q.coeffs();
  const unsigned __int128 s = static_cast<unsigned __int128>(k[0].value()) * x % p * x + static_cast<unsigned __int128>(k[1].value()) * x % p * y +
                              static_cast<unsigned __int128>(k[2].value()) * y % p * y + static_cast<unsigned __int128>(k[3].value()) * x % p * z +
                              static_cast<unsigned __int128>(k[4].value()) * y % p * z + static_cast<unsigned __int128>(k[5].value()) * z % p * z;
  return s % p == 0;
}

}  // namespace fpinc::testing
