#pragma once

/**
 * @file curves.hpp
 * @brief Conics over F_p and the special families built on them: Moebius graphs,
 * circles, translate-parabolas, translate-hyperbolas, and spheres in F_p^d.
 *
 * A Conic is the projective curve
 *
 *     a x^2 + b xy + c y^2 + d xz + e yz + f z^2 = 0
 *
 * stored with its first nonzero coefficient equal to 1. "Irreducible" is taken
 * to mean nondegenerate: the symmetric matrix of the quadratic form has rank 3.
 */

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpinc/errors.hpp"
#include "fpinc/field.hpp"
#include "fpinc/projective.hpp"

namespace fpinc {

enum class ConicTag { NondegenerateEllipse, NondegenerateParabola, NondegenerateHyperbola, Degenerate };

inline const char* to_string(ConicTag t) {
  switch (t) {
    case ConicTag::NondegenerateEllipse: return "ellipse";
    case ConicTag::NondegenerateParabola: return "parabola";
    case ConicTag::NondegenerateHyperbola: return "hyperbola";
    case ConicTag::Degenerate: return "degenerate";
  }
  return "?";
}

struct ConicClass {
  ConicTag tag = ConicTag::Degenerate;
  /// Rank of the 3x3 symmetric matrix, 1..3.
  std::size_t matrix_rank = 0;
  /// Points on the line at infinity. 0, 1 or 2, except p + 1 for a degenerate
  /// conic that contains the whole line at infinity (a = b = c = 0).
  std::uint64_t infinity_points = 0;

  friend bool operator==(const ConicClass&, const ConicClass&) = default;
};

class Conic {
 public:
  Conic(const FieldElem& a, const FieldElem& b, const FieldElem& c, const FieldElem& d, const FieldElem& e,
        const FieldElem& f)
      : k_{a, b, c, d, e, f} {
    bool nonzero = false;
    for (const auto& x : k_) {
      detail::require_same_field(x, a);
      nonzero = nonzero || !x.is_zero();
    }
    if (!nonzero) throw usage_error("conic coefficients are all zero");
    detail::scale_first_nonzero_to_one(k_);
  }
  static Conic from_ints(const FieldSpec& fs, std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                         std::int64_t e, std::int64_t f) {
    return Conic(fs.elem(a), fs.elem(b), fs.elem(c), fs.elem(d), fs.elem(e), fs.elem(f));
  }
  static Conic from_array(const std::array<FieldElem, 6>& k) { return Conic(k[0], k[1], k[2], k[3], k[4], k[5]); }

  [[nodiscard]] const std::array<FieldElem, 6>& coeffs() const noexcept { return k_; }
  [[nodiscard]] const FieldElem& a() const noexcept { return k_[0]; }
  [[nodiscard]] const FieldElem& b() const noexcept { return k_[1]; }
  [[nodiscard]] const FieldElem& c() const noexcept { return k_[2]; }
  [[nodiscard]] const FieldElem& d() const noexcept { return k_[3]; }
  [[nodiscard]] const FieldElem& e() const noexcept { return k_[4]; }
  [[nodiscard]] const FieldElem& f() const noexcept { return k_[5]; }
  [[nodiscard]] std::uint64_t modulus() const noexcept { return k_[0].modulus(); }
  [[nodiscard]] FieldSpec field() const { return FieldSpec(modulus()); }

  [[nodiscard]] FieldElem evaluate(const FieldElem& x, const FieldElem& y, const FieldElem& z) const {
    return k_[0] * x * x + k_[1] * x * y + k_[2] * y * y + k_[3] * x * z + k_[4] * y * z + k_[5] * z * z;
  }
  [[nodiscard]] bool contains(const ProjPoint2& pt) const { return evaluate(pt.x(), pt.y(), pt.z()).is_zero(); }
  [[nodiscard]] bool contains(const AffinePoint& pt) const {
    if (pt.dim() != 2) throw usage_error("conic membership needs a planar point");
    return evaluate(pt.x(), pt.y(), FieldElem::from_canonical(1, modulus())).is_zero();
  }

  /// [[a, b/2, d/2], [b/2, c, e/2], [d/2, e/2, f]].
  [[nodiscard]] MatrixModP matrix() const {
    const FieldSpec fs = field();
    const FieldElem half = invert(fs.elem(2));
    return MatrixModP(fs, 3, 3,
                      {k_[0], k_[1] * half, k_[3] * half, k_[1] * half, k_[2], k_[4] * half, k_[3] * half,
                       k_[4] * half, k_[5]});
  }

  friend bool operator==(const Conic&, const Conic&) = default;
  friend auto operator<=>(const Conic& x, const Conic& y) { return x.k_ <=> y.k_; }

  [[nodiscard]] std::string to_string() const {
    std::string s = "conic(";
    for (std::size_t i = 0; i < 6; ++i) s += (i ? "," : "") + std::to_string(k_[i].value());
    return s + ")";
  }

 private:
  std::array<FieldElem, 6> k_;
};

/// Projective points of a x^2 + b xy + c y^2 = 0 on the line z = 0. Empty list
/// with `whole_line` set when a = b = c = 0.
struct InfinityPoints {
  std::vector<ProjPoint2> points;
  bool whole_line = false;
};

inline InfinityPoints infinity_points(const Conic& q) {
  const FieldSpec fs = q.field();
  InfinityPoints out;
  if (q.a().is_zero() && q.b().is_zero() && q.c().is_zero()) {
    out.whole_line = true;
    return out;
  }
  // [x:1:0] needs a x^2 + b x + c = 0; [1:0:0] needs a = 0.
  if (q.a().is_zero()) out.points.push_back(ProjPoint2(fs.one(), fs.zero(), fs.zero()));
  if (q.a().is_zero()) {
    if (!q.b().is_zero()) out.points.push_back(ProjPoint2(-q.c() / q.b(), fs.one(), fs.zero()));
  } else {
    const FieldElem disc = q.b() * q.b() - fs.elem(4) * q.a() * q.c();
    if (auto r = sqrt(disc)) {
      const FieldElem two_a = fs.elem(2) * q.a();
      out.points.push_back(ProjPoint2((-q.b() + *r) / two_a, fs.one(), fs.zero()));
      if (!r->is_zero()) out.points.push_back(ProjPoint2((-q.b() - *r) / two_a, fs.one(), fs.zero()));
    }
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

/// Rank of the conic matrix and the ellipse / parabola / hyperbola split by
/// the number of points at infinity.
inline ConicClass classify(const Conic& q) {
  ConicClass cls;
  cls.matrix_rank = q.matrix().rank();
  const auto inf = infinity_points(q);
  cls.infinity_points = inf.whole_line ? q.modulus() + 1 : inf.points.size();
  if (cls.matrix_rank < 3) {
    cls.tag = ConicTag::Degenerate;
  } else if (cls.infinity_points == 0) {
    cls.tag = ConicTag::NondegenerateEllipse;
  } else if (cls.infinity_points == 1) {
    cls.tag = ConicTag::NondegenerateParabola;
  } else {
    cls.tag = ConicTag::NondegenerateHyperbola;
  }
  return cls;
}

inline bool is_nondegenerate(const Conic& q) { return !q.matrix().determinant().is_zero(); }

/// Affine points of the conic in lexicographic order.
inline std::vector<AffinePoint> enumerate_points(const Conic& q) {
  const FieldSpec fs = q.field();
  std::vector<AffinePoint> out;
  const FieldElem two = fs.elem(2);
  for (const auto& x : fs.elements()) {
    // c y^2 + (b x + e) y + (a x^2 + d x + f) = 0
    const FieldElem lin = q.b() * x + q.e();
    const FieldElem cst = q.a() * x * x + q.d() * x + q.f();
    if (q.c().is_zero()) {
      if (!lin.is_zero()) {
        out.emplace_back(x, -cst / lin);
      } else if (cst.is_zero()) {
        for (const auto& y : fs.elements()) out.emplace_back(x, y);
      }
      continue;
    }
    const FieldElem disc = lin * lin - fs.elem(4) * q.c() * cst;
    if (auto r = sqrt(disc)) {
      const FieldElem y1 = (-lin + *r) / (two * q.c());
      const FieldElem y2 = (-lin - *r) / (two * q.c());
      if (y1 == y2) {
        out.emplace_back(x, y1);
      } else {
        out.emplace_back(x, std::min(y1, y2));
        out.emplace_back(x, std::max(y1, y2));
      }
    }
  }
  return out;
}

/// All projective points: affine points (as [x:y:1]) followed by those at infinity.
inline std::vector<ProjPoint2> enumerate_projective_points(const Conic& q) {
  std::vector<ProjPoint2> out;
  for (const auto& a : enumerate_points(q)) out.push_back(ProjPoint2::from_affine(a));
  const auto inf = infinity_points(q);
  if (inf.whole_line) {
    const FieldSpec fs = q.field();
    for (const auto& x : fs.elements()) out.push_back(ProjPoint2(x, fs.one(), fs.zero()));
    out.push_back(ProjPoint2(fs.one(), fs.zero(), fs.zero()));
  } else {
    out.insert(out.end(), inf.points.begin(), inf.points.end());
  }
  return out;
}

/// Every conic over F_p in canonical form, (p^6 - 1) / (p - 1) of them.
inline std::vector<Conic> all_conics(const FieldSpec& fs) {
  std::vector<Conic> out;
  const std::uint64_t p = fs.p();
  for (std::size_t lead = 0; lead < 6; ++lead) {
    std::uint64_t count = 1;
    for (std::size_t i = lead + 1; i < 6; ++i) count *= p;
    for (std::uint64_t code = 0; code < count; ++code) {
      std::array<std::int64_t, 6> k{};
      k[lead] = 1;
      std::uint64_t rest = code;
      for (std::size_t i = 6; i-- > lead + 1;) {
        k[i] = static_cast<std::int64_t>(rest % p);
        rest /= p;
      }
      out.push_back(Conic::from_ints(fs, k[0], k[1], k[2], k[3], k[4], k[5]));
    }
  }
  return out;
}

/// Image of a conic under a projective map: the conic whose points are the images.
/// Its matrix is M^{-T} Q M^{-1}.
inline Conic transform_conic(const ProjTransform& t, const Conic& q) {
  const MatrixModP inv = *t.matrix().inverse();
  const MatrixModP img = inv.transpose() * q.matrix() * inv;
  const FieldElem two = q.field().elem(2);
  return Conic(img.at(0, 0), two * img.at(0, 1), img.at(1, 1), two * img.at(0, 2), two * img.at(1, 2), img.at(2, 2));
}

/// x -> (a x + b) / (c x + d) with ad - bc != 0, kept modulo scalars.
class Mobius {
 public:
  Mobius(const FieldElem& a, const FieldElem& b, const FieldElem& c, const FieldElem& d) : k_{a, b, c, d} {
    for (const auto& x : k_) detail::require_same_field(x, a);
    if ((a * d - b * c).is_zero()) throw degenerate_input_error("Moebius map with ad - bc = 0");
    detail::scale_first_nonzero_to_one(k_);
  }
  static Mobius from_ints(const FieldSpec& fs, std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return Mobius(fs.elem(a), fs.elem(b), fs.elem(c), fs.elem(d));
  }

  [[nodiscard]] const FieldElem& a() const noexcept { return k_[0]; }
  [[nodiscard]] const FieldElem& b() const noexcept { return k_[1]; }
  [[nodiscard]] const FieldElem& c() const noexcept { return k_[2]; }
  [[nodiscard]] const FieldElem& d() const noexcept { return k_[3]; }
  [[nodiscard]] const std::array<FieldElem, 4>& coeffs() const noexcept { return k_; }
  [[nodiscard]] std::uint64_t modulus() const noexcept { return k_[0].modulus(); }

  /// c = 0: an affine map, whose graph is a line rather than a nondegenerate conic.
  [[nodiscard]] bool is_affine() const noexcept { return k_[2].is_zero(); }

  /// f(x), or nullopt at the pole.
  [[nodiscard]] std::optional<FieldElem> operator()(const FieldElem& x) const {
    const FieldElem den = k_[2] * x + k_[3];
    if (den.is_zero()) return std::nullopt;
    return (k_[0] * x + k_[1]) / den;
  }
  /// (x, y) lies on the graph y = f(x).
  [[nodiscard]] bool contains(const AffinePoint& pt) const {
    return (pt.y() * (k_[2] * pt.x() + k_[3]) - k_[0] * pt.x() - k_[1]).is_zero();
  }

  friend bool operator==(const Mobius&, const Mobius&) = default;
  friend auto operator<=>(const Mobius& x, const Mobius& y) { return x.k_ <=> y.k_; }

  [[nodiscard]] std::string to_string() const {
    return "mobius(" + std::to_string(k_[0].value()) + "," + std::to_string(k_[1].value()) + "," +
           std::to_string(k_[2].value()) + "," + std::to_string(k_[3].value()) + ")";
  }

 private:
  std::array<FieldElem, 4> k_;
};

/// The graph c xy + d yz - a xz - b z^2 = 0. Degenerate (z times a line) when the map is affine.
inline Conic mobius_to_conic(const Mobius& m) {
  const FieldElem zero = FieldElem::from_canonical(0, m.modulus());
  return Conic(zero, m.c(), zero, -m.a(), m.d(), -m.b());
}

/// The Moebius map whose graph is q, when q is nondegenerate and passes through [0:1:0] and [1:0:0].
inline std::optional<Mobius> conic_to_mobius(const Conic& q) {
  // [1:0:0] on q iff a = 0; [0:1:0] on q iff c = 0.
  if (!q.a().is_zero() || !q.c().is_zero()) return std::nullopt;
  if (!is_nondegenerate(q)) return std::nullopt;
  // b != 0 by nondegeneracy; b xy + d x + e y + f = 0 gives y = (-d x - f) / (b x + e).
  return Mobius(-q.d(), -q.f(), q.b(), q.e());
}

/// All Moebius maps over F_p in canonical form, (p^2 - 1)(p^2 - p) / (p - 1) of them.
inline std::vector<Mobius> all_mobius(const FieldSpec& fs) {
  std::vector<Mobius> out;
  const auto els = fs.elements();
  for (const auto& a : els)
    for (const auto& b : els)
      for (const auto& c : els)
        for (const auto& d : els) {
          if ((a * d - b * c).is_zero()) continue;
          Mobius m(a, b, c, d);
          if (m.coeffs() == std::array<FieldElem, 4>{a, b, c, d}) out.push_back(m);
        }
  return out;
}

/// Unique conic through five points no three of which are collinear; nullopt
/// when some three are collinear.
inline std::optional<Conic> conic_through_five_points(const std::array<AffinePoint, 5>& pts) {
  for (std::size_t i = 0; i < 5; ++i) {
    if (pts[i].dim() != 2) throw usage_error("conic_through_five_points needs planar points");
    for (std::size_t j = i + 1; j < 5; ++j) {
      if (pts[i] == pts[j]) throw usage_error("conic_through_five_points: duplicate point " + pts[i].to_string());
    }
  }
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j)
      for (std::size_t k = j + 1; k < 5; ++k)
        if (collinear(pts[i], pts[j], pts[k])) return std::nullopt;

  const FieldSpec fs(pts[0].modulus());
  MatrixModP m(fs, 5, 6);
  for (std::size_t r = 0; r < 5; ++r) {
    const auto& x = pts[r].x();
    const auto& y = pts[r].y();
    m.at(r, 0) = x * x;
    m.at(r, 1) = x * y;
    m.at(r, 2) = y * y;
    m.at(r, 3) = x;
    m.at(r, 4) = y;
    m.at(r, 5) = fs.one();
  }
  const auto sol = solve_linear(m, std::vector<FieldElem>(5, fs.zero()));
  if (sol.nullspace.size() != 1) return std::nullopt;
  const auto& v = sol.nullspace.front();
  Conic q(v[0], v[1], v[2], v[3], v[4], v[5]);
  for (const auto& pt : pts) {
    if (!q.contains(pt)) throw std::logic_error("five-point fit failed substitution check");
  }
  return q;
}

/// (x - c1)^2 + (y - c2)^2 = r with r != 0.
struct CircleSpec {
  AffinePoint center;
  FieldElem r;

  CircleSpec(AffinePoint c, const FieldElem& radius) : center(std::move(c)), r(radius) {
    if (center.dim() != 2) throw usage_error("circle center must be planar");
    detail::require_same_field(center.x(), r);
    if (r.is_zero()) throw usage_error("circle with r = 0 is degenerate");
  }
  [[nodiscard]] bool contains(const AffinePoint& pt) const {
    const FieldElem dx = pt.x() - center.x();
    const FieldElem dy = pt.y() - center.y();
    return dx * dx + dy * dy == r;
  }
  [[nodiscard]] CircleSpec translated(const AffinePoint& v) const { return CircleSpec(center + v, r); }
  friend bool operator==(const CircleSpec&, const CircleSpec&) = default;
  friend auto operator<=>(const CircleSpec& a, const CircleSpec& b) {
    if (auto c = a.center <=> b.center; c != 0) return c;
    return a.r <=> b.r;
  }
  [[nodiscard]] std::string to_string() const { return "circle(" + center.to_string() + "," + std::to_string(r.value()) + ")"; }
};

/// y = a x^2 + b x + c with a != 0.
struct ParabolaSpec {
  FieldElem a, b, c;

  ParabolaSpec(const FieldElem& a_, const FieldElem& b_, const FieldElem& c_) : a(a_), b(b_), c(c_) {
    detail::require_same_field(a, b);
    detail::require_same_field(a, c);
    if (a.is_zero()) throw usage_error("parabola needs a != 0");
  }
  [[nodiscard]] bool contains(const AffinePoint& pt) const { return pt.y() == (a * pt.x() + b) * pt.x() + c; }
  /// The parabola through pt + v for every pt on this one.
  [[nodiscard]] ParabolaSpec translated(const AffinePoint& v) const {
    // y - v2 = a (x - v1)^2 + b (x - v1) + c
    const FieldElem two = FieldElem::from_canonical(2, a.modulus());
    return ParabolaSpec(a, b - two * a * v.x(), a * v.x() * v.x() - b * v.x() + c + v.y());
  }
  friend bool operator==(const ParabolaSpec&, const ParabolaSpec&) = default;
  friend auto operator<=>(const ParabolaSpec&, const ParabolaSpec&) = default;
  [[nodiscard]] std::string to_string() const {
    return "parabola(" + std::to_string(a.value()) + "," + std::to_string(b.value()) + "," + std::to_string(c.value()) + ")";
  }
};

/// (x - a)(y - b) = c with c != 0.
struct HyperbolaSpec {
  FieldElem a, b, c;

  HyperbolaSpec(const FieldElem& a_, const FieldElem& b_, const FieldElem& c_) : a(a_), b(b_), c(c_) {
    detail::require_same_field(a, b);
    detail::require_same_field(a, c);
    if (c.is_zero()) throw usage_error("hyperbola needs c != 0");
  }
  [[nodiscard]] bool contains(const AffinePoint& pt) const { return (pt.x() - a) * (pt.y() - b) == c; }
  [[nodiscard]] HyperbolaSpec translated(const AffinePoint& v) const { return HyperbolaSpec(a + v.x(), b + v.y(), c); }
  friend bool operator==(const HyperbolaSpec&, const HyperbolaSpec&) = default;
  friend auto operator<=>(const HyperbolaSpec&, const HyperbolaSpec&) = default;
  [[nodiscard]] std::string to_string() const {
    return "hyperbola(" + std::to_string(a.value()) + "," + std::to_string(b.value()) + "," + std::to_string(c.value()) + ")";
  }
};

/// {x in F_p^d : sum (x_i - center_i)^2 = r}, d >= 2.
struct Sphere {
  AffinePoint center;
  FieldElem r;

  Sphere(AffinePoint c, const FieldElem& radius) : center(std::move(c)), r(radius) {
    if (center.dim() < 2) throw usage_error("sphere needs dimension >= 2");
    detail::require_same_field(center[0], r);
  }
  [[nodiscard]] std::size_t dim() const noexcept { return center.dim(); }
  [[nodiscard]] bool contains(const AffinePoint& pt) const {
    if (pt.dim() != dim()) throw usage_error("sphere/point dimension mismatch");
    FieldElem s = FieldElem::from_canonical(0, r.modulus());
    for (std::size_t i = 0; i < dim(); ++i) {
      const FieldElem t = pt[i] - center[i];
      s += t * t;
    }
    return s == r;
  }
  [[nodiscard]] Sphere translated(const AffinePoint& v) const { return Sphere(center + v, r); }
  friend bool operator==(const Sphere&, const Sphere&) = default;
  friend auto operator<=>(const Sphere& a, const Sphere& b) {
    if (auto c = a.center <=> b.center; c != 0) return c;
    return a.r <=> b.r;
  }
  [[nodiscard]] std::string to_string() const { return "sphere(" + center.to_string() + "," + std::to_string(r.value()) + ")"; }
};

inline Conic to_conic(const CircleSpec& s) {
  const auto& c1 = s.center.x();
  const auto& c2 = s.center.y();
  const FieldSpec fs(s.r.modulus());
  const FieldElem two = fs.elem(2);
  return Conic(fs.one(), fs.zero(), fs.one(), -two * c1, -two * c2, c1 * c1 + c2 * c2 - s.r);
}

inline Conic to_conic(const ParabolaSpec& s) {
  const FieldSpec fs(s.a.modulus());
  return Conic(s.a, fs.zero(), fs.zero(), s.b, -fs.one(), s.c);
}

inline Conic to_conic(const HyperbolaSpec& s) {
  const FieldSpec fs(s.a.modulus());
  return Conic(fs.zero(), fs.one(), fs.zero(), -s.b, -s.a, s.a * s.b - s.c);
}

inline std::vector<AffinePoint> enumerate_points(const CircleSpec& s) { return enumerate_points(to_conic(s)); }
inline std::vector<AffinePoint> enumerate_points(const ParabolaSpec& s) { return enumerate_points(to_conic(s)); }
inline std::vector<AffinePoint> enumerate_points(const HyperbolaSpec& s) { return enumerate_points(to_conic(s)); }
inline std::vector<AffinePoint> enumerate_points(const Mobius& m) {
  std::vector<AffinePoint> out;
  const FieldSpec fs(m.modulus());
  for (const auto& x : fs.elements()) {
    if (auto y = m(x)) out.emplace_back(x, *y);
  }
  return out;
}
inline std::vector<AffinePoint> enumerate_points(const LineFp2& l) {
  std::vector<AffinePoint> out;
  const FieldSpec fs(l.modulus());
  for (const auto& x : fs.elements()) {
    if (!l.l2().is_zero()) {
      out.emplace_back(x, -(l.l1() * x + l.l3()) / l.l2());
    } else if ((l.l1() * x + l.l3()).is_zero()) {
      for (const auto& y : fs.elements()) out.emplace_back(x, y);
    }
  }
  return out;
}
/// Brute force over F_p^d; intended for small p^d.
inline std::vector<AffinePoint> enumerate_points(const Sphere& s) {
  std::vector<AffinePoint> out;
  for (auto& pt : all_affine_points(FieldSpec(s.r.modulus()), s.dim())) {
    if (s.contains(pt)) out.push_back(std::move(pt));
  }
  return out;
}
inline std::vector<AffinePoint> enumerate_points(const Hyperplane& h) {
  std::vector<AffinePoint> out;
  for (auto& pt : all_affine_points(FieldSpec(h.modulus()), h.dim())) {
    if (h.contains(pt)) out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace fpinc

template <>
struct std::hash<fpinc::Conic> {
  std::size_t operator()(const fpinc::Conic& q) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto& c : q.coeffs()) h = (h ^ c.value()) * 0x100000001b3ULL;
    return h;
  }
};
