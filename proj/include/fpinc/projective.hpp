#pragma once

/**
 * @file projective.hpp
 * @brief Affine points, projective points and lines of P^2(F_p), affine hyperplanes
 * of F_p^d, and projective transformations.
 *
 * Every homogeneous object is kept in a normal form so that equality is
 * componentwise:
 *   - ProjPoint2: last nonzero coordinate scaled to 1.
 *   - LineFp2, Hyperplane, ProjTransform: first nonzero coefficient scaled to 1.
 */

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fpinc/errors.hpp"
#include "fpinc/field.hpp"

namespace fpinc {

namespace detail {

template <typename Range>
void scale_first_nonzero_to_one(Range& coeffs) {
  for (auto& c : coeffs) {
    if (!c.is_zero()) {
      const FieldElem inv = invert(c);
      for (auto& x : coeffs) x *= inv;
      return;
    }
  }
}

inline void require_same_field(const FieldElem& a, const FieldElem& b) {
  if (a.modulus() != b.modulus()) throw usage_error("coordinates from different fields");
}

}  // namespace detail

/// A point of F_p^d.
class AffinePoint {
 public:
  explicit AffinePoint(std::vector<FieldElem> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw usage_error("affine point needs at least one coordinate");
    for (const auto& c : coords_) detail::require_same_field(c, coords_.front());
  }
  AffinePoint(const FieldElem& x, const FieldElem& y) : AffinePoint(std::vector<FieldElem>{x, y}) {}

  static AffinePoint from_ints(const FieldSpec& f, const std::vector<std::int64_t>& v) {
    std::vector<FieldElem> c;
    c.reserve(v.size());
    for (auto x : v) c.push_back(f.elem(x));
    return AffinePoint(std::move(c));
  }
  static AffinePoint origin(const FieldSpec& f, std::size_t dim) {
    return AffinePoint(std::vector<FieldElem>(dim, f.zero()));
  }

  [[nodiscard]] std::size_t dim() const noexcept { return coords_.size(); }
  [[nodiscard]] std::uint64_t modulus() const noexcept { return coords_.front().modulus(); }
  [[nodiscard]] const std::vector<FieldElem>& coords() const noexcept { return coords_; }
  [[nodiscard]] const FieldElem& operator[](std::size_t i) const { return coords_[i]; }
  [[nodiscard]] const FieldElem& x() const { return coords_.at(0); }
  [[nodiscard]] const FieldElem& y() const { return coords_.at(1); }
  [[nodiscard]] bool is_origin() const {
    for (const auto& c : coords_)
      if (!c.is_zero()) return false;
    return true;
  }

  friend AffinePoint operator+(const AffinePoint& a, const AffinePoint& b) {
    a.check_dim(b);
    std::vector<FieldElem> c = a.coords_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.coords_[i];
    return AffinePoint(std::move(c));
  }
  friend AffinePoint operator-(const AffinePoint& a, const AffinePoint& b) {
    a.check_dim(b);
    std::vector<FieldElem> c = a.coords_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.coords_[i];
    return AffinePoint(std::move(c));
  }

  friend bool operator==(const AffinePoint&, const AffinePoint&) = default;
  friend auto operator<=>(const AffinePoint& a, const AffinePoint& b) { return a.coords_ <=> b.coords_; }

  [[nodiscard]] std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(coords_[i].value());
    }
    return s + ")";
  }

 private:
  void check_dim(const AffinePoint& o) const {
    if (o.dim() != dim()) throw usage_error("affine points of different dimension");
    detail::require_same_field(o.coords_.front(), coords_.front());
  }

  std::vector<FieldElem> coords_;
};

/// All p^d points of F_p^d in lexicographic order.
inline std::vector<AffinePoint> all_affine_points(const FieldSpec& f, std::size_t dim) {
  std::vector<AffinePoint> out;
  std::vector<std::int64_t> idx(dim, 0);
  const auto p = static_cast<std::int64_t>(f.p());
  while (true) {
    out.push_back(AffinePoint::from_ints(f, idx));
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++idx[k] < p) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (dim == 0) return out;
  }
}

/// A point [x:y:z] of P^2(F_p).
class ProjPoint2 {
 public:
  ProjPoint2(const FieldElem& x, const FieldElem& y, const FieldElem& z) : c_{x, y, z} {
    detail::require_same_field(x, y);
    detail::require_same_field(x, z);
    normalize();
  }
  static ProjPoint2 from_ints(const FieldSpec& f, std::int64_t x, std::int64_t y, std::int64_t z) {
    return ProjPoint2(f.elem(x), f.elem(y), f.elem(z));
  }
  static ProjPoint2 from_affine(const AffinePoint& a) {
    if (a.dim() != 2) throw usage_error("planar point required");
    return ProjPoint2(a.x(), a.y(), FieldElem::from_canonical(1, a.modulus()));
  }

  [[nodiscard]] const FieldElem& x() const noexcept { return c_[0]; }
  [[nodiscard]] const FieldElem& y() const noexcept { return c_[1]; }
  [[nodiscard]] const FieldElem& z() const noexcept { return c_[2]; }
  [[nodiscard]] const std::array<FieldElem, 3>& coords() const noexcept { return c_; }
  [[nodiscard]] std::vector<FieldElem> as_vector() const { return {c_[0], c_[1], c_[2]}; }
  [[nodiscard]] std::uint64_t modulus() const noexcept { return c_[0].modulus(); }
  [[nodiscard]] bool at_infinity() const noexcept { return c_[2].is_zero(); }
  [[nodiscard]] std::optional<AffinePoint> to_affine() const {
    if (at_infinity()) return std::nullopt;
    return AffinePoint(c_[0], c_[1]);
  }

  friend bool operator==(const ProjPoint2&, const ProjPoint2&) = default;
  friend auto operator<=>(const ProjPoint2& a, const ProjPoint2& b) { return a.c_ <=> b.c_; }

  [[nodiscard]] std::string to_string() const {
    return "[" + std::to_string(c_[0].value()) + ":" + std::to_string(c_[1].value()) + ":" +
           std::to_string(c_[2].value()) + "]";
  }

 private:
  void normalize() {
    for (std::size_t i = 3; i-- > 0;) {
      if (!c_[i].is_zero()) {
        const FieldElem inv = invert(c_[i]);
        for (auto& x : c_) x *= inv;
        return;
      }
    }
    throw usage_error("projective point [0:0:0] is undefined");
  }

  std::array<FieldElem, 3> c_;
};

/// All p^2 + p + 1 points of P^2(F_p): affine [x:y:1] in lexicographic order,
/// then [x:1:0] for increasing x, then [1:0:0].
inline std::vector<ProjPoint2> all_projective_points(const FieldSpec& f) {
  std::vector<ProjPoint2> out;
  out.reserve(f.p() * f.p() + f.p() + 1);
  const auto p = static_cast<std::int64_t>(f.p());
  for (std::int64_t x = 0; x < p; ++x)
    for (std::int64_t y = 0; y < p; ++y) out.push_back(ProjPoint2::from_ints(f, x, y, 1));
  for (std::int64_t x = 0; x < p; ++x) out.push_back(ProjPoint2::from_ints(f, x, 1, 0));
  out.push_back(ProjPoint2::from_ints(f, 1, 0, 0));
  return out;
}

/// True iff the three points lie on a common line.
inline bool collinear(const ProjPoint2& a, const ProjPoint2& b, const ProjPoint2& c) {
  const auto& [a0, a1, a2] = a.coords();
  const auto& [b0, b1, b2] = b.coords();
  const auto& [c0, c1, c2] = c.coords();
  const FieldElem det = a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
  return det.is_zero();
}

inline bool collinear(const AffinePoint& a, const AffinePoint& b, const AffinePoint& c) {
  const FieldElem det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  return det.is_zero();
}

/// The line l1 X + l2 Y + l3 Z = 0; affinely l1 x + l2 y + l3 = 0.
class LineFp2 {
 public:
  LineFp2(const FieldElem& l1, const FieldElem& l2, const FieldElem& l3) : c_{l1, l2, l3} {
    detail::require_same_field(l1, l2);
    detail::require_same_field(l1, l3);
    if (l1.is_zero() && l2.is_zero() && l3.is_zero()) throw usage_error("line coefficients are all zero");
    detail::scale_first_nonzero_to_one(c_);
  }
  static LineFp2 from_ints(const FieldSpec& f, std::int64_t a, std::int64_t b, std::int64_t c) {
    return LineFp2(f.elem(a), f.elem(b), f.elem(c));
  }
  /// The unique line through two distinct points.
  static LineFp2 through(const ProjPoint2& a, const ProjPoint2& b) {
    if (a == b) throw degenerate_input_error("line through coincident points");
    const auto& [a0, a1, a2] = a.coords();
    const auto& [b0, b1, b2] = b.coords();
    return LineFp2(a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0);
  }
  static LineFp2 at_infinity(const FieldSpec& f) { return from_ints(f, 0, 0, 1); }

  [[nodiscard]] const FieldElem& l1() const noexcept { return c_[0]; }
  [[nodiscard]] const FieldElem& l2() const noexcept { return c_[1]; }
  [[nodiscard]] const FieldElem& l3() const noexcept { return c_[2]; }
  [[nodiscard]] const std::array<FieldElem, 3>& coeffs() const noexcept { return c_; }
  [[nodiscard]] std::uint64_t modulus() const noexcept { return c_[0].modulus(); }

  [[nodiscard]] bool contains(const ProjPoint2& pt) const {
    return (c_[0] * pt.x() + c_[1] * pt.y() + c_[2] * pt.z()).is_zero();
  }
  [[nodiscard]] bool contains(const AffinePoint& pt) const {
    return (c_[0] * pt.x() + c_[1] * pt.y() + c_[2]).is_zero();
  }

  friend bool operator==(const LineFp2&, const LineFp2&) = default;
  friend auto operator<=>(const LineFp2& a, const LineFp2& b) { return a.c_ <=> b.c_; }

  [[nodiscard]] std::string to_string() const {
    return "line(" + std::to_string(c_[0].value()) + "," + std::to_string(c_[1].value()) + "," +
           std::to_string(c_[2].value()) + ")";
  }

 private:
  std::array<FieldElem, 3> c_;
};

/// The affine hyperplane {x : normal . x + offset = 0} of F_p^d.
class Hyperplane {
 public:
  Hyperplane(std::vector<FieldElem> normal, const FieldElem& offset) : normal_(std::move(normal)), offset_(offset) {
    if (normal_.empty()) throw usage_error("hyperplane needs a nonempty normal");
    bool nonzero = false;
    for (const auto& c : normal_) {
      detail::require_same_field(c, offset_);
      nonzero = nonzero || !c.is_zero();
    }
    if (!nonzero) throw usage_error("hyperplane normal is zero");
    for (const auto& c : normal_) {
      if (!c.is_zero()) {
        const FieldElem inv = invert(c);
        for (auto& x : normal_) x *= inv;
        offset_ *= inv;
        break;
      }
    }
  }

  [[nodiscard]] std::size_t dim() const noexcept { return normal_.size(); }
  [[nodiscard]] const std::vector<FieldElem>& normal() const noexcept { return normal_; }
  [[nodiscard]] const FieldElem& offset() const noexcept { return offset_; }
  [[nodiscard]] std::uint64_t modulus() const noexcept { return offset_.modulus(); }

  [[nodiscard]] bool contains(const AffinePoint& pt) const {
    if (pt.dim() != dim()) throw usage_error("hyperplane/point dimension mismatch");
    FieldElem s = offset_;
    for (std::size_t i = 0; i < normal_.size(); ++i) s += normal_[i] * pt[i];
    return s.is_zero();
  }

  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
  friend auto operator<=>(const Hyperplane& a, const Hyperplane& b) {
    if (auto c = a.normal_ <=> b.normal_; c != 0) return c;
    return a.offset_ <=> b.offset_;
  }

  [[nodiscard]] std::string to_string() const {
    std::string s = "hyperplane(";
    for (const auto& c : normal_) s += std::to_string(c.value()) + ",";
    return s + std::to_string(offset_.value()) + ")";
  }

 private:
  std::vector<FieldElem> normal_;
  FieldElem offset_;
};

/// An invertible 3x3 matrix acting on P^2, kept modulo nonzero scalars.
class ProjTransform {
 public:
  explicit ProjTransform(MatrixModP m) : m_(std::move(m)) {
    if (m_.rows() != 3 || m_.cols() != 3) throw usage_error("projective transform must be 3x3");
    if (m_.determinant().is_zero()) throw degenerate_input_error("projective transform is singular");
    for (const auto& e : m_.entries()) {
      if (!e.is_zero()) {
        const FieldElem inv = invert(e);
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) m_.at(i, j) *= inv;
        break;
      }
    }
  }
  static ProjTransform identity(const FieldSpec& f) { return ProjTransform(MatrixModP::identity(f, 3)); }
  static ProjTransform from_ints(const FieldSpec& f, const std::vector<std::int64_t>& rowmajor) {
    return ProjTransform(MatrixModP::from_ints(f, 3, 3, rowmajor));
  }

  [[nodiscard]] const MatrixModP& matrix() const noexcept { return m_; }

  [[nodiscard]] ProjTransform inverse() const { return ProjTransform(*m_.inverse()); }

  /// (a * b)(pt) = a(b(pt)).
  friend ProjTransform operator*(const ProjTransform& a, const ProjTransform& b) { return ProjTransform(a.m_ * b.m_); }

  friend bool operator==(const ProjTransform&, const ProjTransform&) = default;

 private:
  MatrixModP m_;
};

inline ProjPoint2 apply(const ProjTransform& t, const ProjPoint2& pt) {
  const auto v = t.matrix().apply(pt.as_vector());
  return ProjPoint2(v[0], v[1], v[2]);
}

/// Image of a line: the line containing exactly the images of its points.
/// Its coefficient vector is M^{-T} l.
inline LineFp2 transform_line(const ProjTransform& t, const LineFp2& l) {
  const MatrixModP inv_t = t.matrix().inverse()->transpose();
  const auto v = inv_t.apply({l.l1(), l.l2(), l.l3()});
  return LineFp2(v[0], v[1], v[2]);
}

/**
 * A projective transformation sending q1 to [0:1:0] and q2 to [1:0:0].
 *
 * The pair is extended to a projective frame {q1, q2, r3, r4} using the
 * earliest points of all_projective_points() that keep the frame in general
 * position; the frame is sent to [0:1:0], [1:0:0], [0:0:1], [1:1:1]. The
 * result is therefore deterministic.
 */
inline ProjTransform two_point_normalization(const ProjPoint2& q1, const ProjPoint2& q2) {
  if (q1 == q2) throw degenerate_input_error("two_point_normalization: q1 == q2 (" + q1.to_string() + ")");
  if (q1.modulus() != q2.modulus()) throw usage_error("two_point_normalization: points from different fields");
  const FieldSpec f(q1.modulus());
  const auto candidates = all_projective_points(f);

  const ProjPoint2* r3 = nullptr;
  for (const auto& c : candidates) {
    if (!collinear(q1, q2, c)) {
      r3 = &c;
      break;
    }
  }
  const ProjPoint2* r4 = nullptr;
  for (const auto& c : candidates) {
    if (!collinear(q1, q2, c) && !collinear(q1, *r3, c) && !collinear(q2, *r3, c)) {
      r4 = &c;
      break;
    }
  }
  // Columns q2, q1, r3 send e1, e2, e3 to q2, q1, r3.
  MatrixModP basis(f, 3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    basis.at(i, 0) = q2.coords()[i];
    basis.at(i, 1) = q1.coords()[i];
    basis.at(i, 2) = r3->coords()[i];
  }
  const auto scales = basis.inverse()->apply(r4->as_vector());
  MatrixModP frame = basis;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) frame.at(i, j) *= scales[j];
  return ProjTransform(*frame.inverse());
}

}  // namespace fpinc

template <>
struct std::hash<fpinc::AffinePoint> {
  std::size_t operator()(const fpinc::AffinePoint& a) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto& c : a.coords()) h = (h ^ c.value()) * 0x100000001b3ULL;
    return h;
  }
};
