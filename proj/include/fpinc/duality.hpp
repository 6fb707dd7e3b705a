#pragma once

/**
 * @file duality.hpp
 * @brief Pin-and-dualize maps: after translating a pin to the origin, curves
 * through the pin become parameter points and data points become lines (or
 * hyperplanes), with incidence preserved.
 *
 *   circle    C_{a,b}: (x-a)^2 + (y-b)^2 = a^2 + b^2   point (al,be) -> -2al X - 2be Y + al^2 + be^2 = 0
 *   parabola  y = a x^2 + b x                          point (al,be) -> al^2 X + al Y - be = 0
 *   hyperbola (x-a)(y-b) = c through q                 point (x,y)   -> x' X + y' Y + x'y' = 0,
 *                                                      x' = x - q1, y' = y - q2, parameter (q2-b, q1-a)
 *   sphere    |x - a|^2 = |a|^2                        point al      -> -2 al . X + |al|^2 = 0
 *
 * Points that have no dual (the pin itself, al = 0 for parabolas, x' = 0 or
 * y' = 0 for hyperbolas) are listed in `excluded`, never silently dropped.
 */

#include <cstddef>
#include <map>
#include <vector>

#include "fpinc/curves.hpp"
#include "fpinc/errors.hpp"
#include "fpinc/field.hpp"
#include "fpinc/incidence.hpp"
#include "fpinc/projective.hpp"

namespace fpinc {

template <typename Dual>
struct DualMap {
  /// Points that were dualized, in PointSet order; duals[i] belongs to sources[i].
  std::vector<AffinePoint> sources;
  std::vector<Dual> duals;
  /// Input points without a dual.
  std::vector<AffinePoint> excluded;
  std::map<Dual, std::vector<AffinePoint>> back_map;

  [[nodiscard]] std::size_t skipped() const noexcept { return excluded.size(); }
  [[nodiscard]] bool injective() const noexcept { return back_map.size() == duals.size(); }
  [[nodiscard]] std::vector<Dual> distinct() const {
    std::vector<Dual> out;
    out.reserve(back_map.size());
    for (const auto& [d, _] : back_map) out.push_back(d);
    return out;
  }

  void add(const AffinePoint& src, Dual dual) {
    sources.push_back(src);
    back_map[dual].push_back(src);
    duals.push_back(std::move(dual));
  }
};

using LineDual = DualMap<LineFp2>;
using HyperplaneDual = DualMap<Hyperplane>;

inline LineFp2 circle_dual_line(const AffinePoint& pt) {
  const FieldElem two = FieldElem::from_canonical(2, pt.modulus());
  return LineFp2(-two * pt.x(), -two * pt.y(), pt.x() * pt.x() + pt.y() * pt.y());
}

/// Parameter (a, b) of a circle through the origin, i.e. center (a, b) and r = a^2 + b^2.
inline AffinePoint circle_parameter(const CircleSpec& c) {
  if (c.r != c.center.x() * c.center.x() + c.center.y() * c.center.y()) {
    throw usage_error(c.to_string() + " does not pass through the origin");
  }
  return c.center;
}

/// Duals of P (which must not contain the origin) under the circle map.
inline LineDual circle_dual(const PointSet& pts) {
  if (pts.dim() != 2) throw usage_error("circle_dual needs planar points");
  LineDual out;
  for (const auto& pt : pts) {
    if (pt.is_origin()) throw usage_error("circle_dual: the pin (origin) must be removed from P");
    out.add(pt, circle_dual_line(pt));
  }
  return out;
}

/// Parameter (a, b) of a translate-parabola through the origin (c = 0).
inline AffinePoint parabola_parameter(const ParabolaSpec& s) {
  if (!s.c.is_zero()) throw usage_error(s.to_string() + " does not pass through the origin");
  return AffinePoint(s.a, s.b);
}

inline LineDual parabola_dual(const PointSet& pts) {
  if (pts.dim() != 2) throw usage_error("parabola_dual needs planar points");
  LineDual out;
  for (const auto& pt : pts) {
    const auto& al = pt.x();
    if (al.is_zero()) {
      out.excluded.push_back(pt);
      continue;
    }
    out.add(pt, LineFp2(al * al, al, -pt.y()));
  }
  return out;
}

/// Dual point (q2 - b, q1 - a) of a hyperbola (x-a)(y-b) = c passing through q.
inline AffinePoint hyperbola_dual_point(const HyperbolaSpec& h, const AffinePoint& q) {
  if (!h.contains(q)) throw usage_error(h.to_string() + " does not pass through " + q.to_string());
  return AffinePoint(q.y() - h.b, q.x() - h.a);
}

inline LineDual hyperbola_dual(const PointSet& pts, const AffinePoint& q) {
  if (pts.dim() != 2 || q.dim() != 2) throw usage_error("hyperbola_dual needs planar points");
  LineDual out;
  for (const auto& pt : pts) {
    const FieldElem xs = pt.x() - q.x();
    const FieldElem ys = pt.y() - q.y();
    if (xs.is_zero() || ys.is_zero()) {
      out.excluded.push_back(pt);
      continue;
    }
    out.add(pt, LineFp2(xs, ys, xs * ys));
  }
  return out;
}

inline Hyperplane sphere_dual_hyperplane(const AffinePoint& pt) {
  const FieldElem two = FieldElem::from_canonical(2, pt.modulus());
  std::vector<FieldElem> normal;
  FieldElem norm = FieldElem::from_canonical(0, pt.modulus());
  for (const auto& c : pt.coords()) {
    normal.push_back(-two * c);
    norm += c * c;
  }
  return Hyperplane(std::move(normal), norm);
}

/// Center of a sphere through the origin (r = |center|^2).
inline AffinePoint sphere_parameter(const Sphere& s) {
  FieldElem norm = FieldElem::from_canonical(0, s.r.modulus());
  for (const auto& c : s.center.coords()) norm += c * c;
  if (norm != s.r) throw usage_error(s.to_string() + " does not pass through the origin");
  return s.center;
}

/// Hyperplane duals of P (origin excluded by contract). Two points collide
/// exactly when one is a scalar multiple of the other and both are isotropic
/// (|al|^2 = 0); in the plane with p = 3 mod 4 no nonzero isotropic vector exists.
inline HyperplaneDual sphere_dual(const PointSet& pts) {
  HyperplaneDual out;
  for (const auto& pt : pts) {
    if (pt.is_origin()) throw usage_error("sphere_dual: the pin (origin) must be removed from P");
    out.add(pt, sphere_dual_hyperplane(pt));
  }
  return out;
}

inline bool is_isotropic(const AffinePoint& pt) {
  FieldElem norm = FieldElem::from_canonical(0, pt.modulus());
  for (const auto& c : pt.coords()) norm += c * c;
  return norm.is_zero();
}

}  // namespace fpinc
