#pragma once

/**
 * @file applications.hpp
 * @brief Distance-type applications: pinned polynomial distances, two-set
 * distances from a planar set, polynomial images through sumsets, quadrance
 * distance sets in F_q^d, and counting conics spanned by a point set.
 *
 * All value sets are exact. Bound values are attached as reports (via the
 * bound catalog), never used as assertions.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fpinc/bounds.hpp"
#include "fpinc/curves.hpp"
#include "fpinc/errors.hpp"
#include "fpinc/field.hpp"
#include "fpinc/incidence.hpp"
#include "fpinc/projective.hpp"

namespace fpinc {

struct Monomial {
  std::int64_t coeff = 1;
  std::vector<unsigned> exps;
};

/// A polynomial f evaluated on differences x - y.
class DistancePolynomial {
 public:
  enum class Tag { SumSquares, Product, ParabolaDist, QuadranceD, Custom };

  static DistancePolynomial sum_squares() { return {Tag::SumSquares, 2, {{1, {2, 0}}, {1, {0, 2}}}, "x^2+y^2"}; }
  static DistancePolynomial product() { return {Tag::Product, 2, {{1, {1, 1}}}, "xy"}; }
  static DistancePolynomial parabola() { return {Tag::ParabolaDist, 2, {{1, {0, 1}}, {1, {2, 0}}}, "y+x^2"}; }
  static DistancePolynomial quadrance(std::size_t d) {
    if (d == 0) throw usage_error("quadrance needs d >= 1");
    std::vector<Monomial> m;
    for (std::size_t i = 0; i < d; ++i) {
      Monomial t{1, std::vector<unsigned>(d, 0)};
      t.exps[i] = 2;
      m.push_back(std::move(t));
    }
    return {Tag::QuadranceD, d, std::move(m), "quadrance" + std::to_string(d)};
  }
  static DistancePolynomial custom(std::size_t dim, std::vector<Monomial> monomials, std::string name = "custom") {
    for (const auto& m : monomials)
      if (m.exps.size() != dim) throw usage_error("monomial arity does not match dimension");
    return {Tag::Custom, dim, std::move(monomials), std::move(name)};
  }
  /// x^2 y^2 + z^2 on F_p^3.
  static DistancePolynomial x2y2_plus_z2() { return custom(3, {{1, {2, 2, 0}}, {1, {0, 0, 2}}}, "x^2y^2+z^2"); }

  [[nodiscard]] Tag tag() const noexcept { return tag_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<Monomial>& monomials() const noexcept { return monos_; }
  [[nodiscard]] unsigned degree() const {
    unsigned d = 0;
    for (const auto& m : monos_) {
      unsigned s = 0;
      for (auto e : m.exps) s += e;
      if (m.coeff != 0) d = std::max(d, s);
    }
    return d;
  }

  [[nodiscard]] FieldElem operator()(const AffinePoint& v) const {
    if (v.dim() != dim_) throw usage_error(name_ + " expects " + std::to_string(dim_) + " coordinates");
    const FieldSpec fs(v.modulus());
    FieldElem acc = fs.zero();
    for (const auto& m : monos_) {
      FieldElem t = fs.elem(m.coeff);
      for (std::size_t i = 0; i < dim_; ++i)
        if (m.exps[i] != 0) t = t * v[i].pow(m.exps[i]);
      acc = acc + t;
    }
    return acc;
  }

 private:
  DistancePolynomial(Tag tag, std::size_t dim, std::vector<Monomial> monos, std::string name)
      : tag_(tag), dim_(dim), monos_(std::move(monos)), name_(std::move(name)) {}

  Tag tag_;
  std::size_t dim_;
  std::vector<Monomial> monos_;
  std::string name_;
};

/// f(pin - E).
inline std::set<FieldElem> pinned_values(const PointSet& e, const AffinePoint& pin, const DistancePolynomial& f) {
  std::set<FieldElem> out;
  for (const auto& x : e) out.insert(f(pin - x));
  return out;
}

struct PinnedOptions {
  /// Refuse p = 1 (mod 4) unless cleared.
  bool require_p3mod4 = true;
};

struct PinnedResult {
  AffinePoint pin;
  std::set<FieldElem> values;
  /// |values| / |E|^{8/15}.
  Decimal ratio;
  /// Hypotheses of the 8/15 lower bound that fail for this input (|E| << p^{15/13}, p = 3 mod 4).
  std::vector<std::string> violated;
};

/// The pin of E maximizing |f(pin - E)|; ties go to the lexicographically smallest pin.
inline PinnedResult pinned_distance_best(const PointSet& e, const DistancePolynomial& f, PinnedOptions opts = {}) {
  if (e.empty()) throw usage_error("pinned_distance_best: E is empty");
  if (e.dim() != 2 || f.dim() != 2) throw usage_error("pinned_distance_best: planar E and bivariate f required");
  const std::uint64_t p = e.modulus();
  if (opts.require_p3mod4 && p % 4 != 3) {
    throw usage_error("pinned_distance_best: p = " + std::to_string(p) + " is not 3 mod 4 (override to proceed)");
  }
  std::optional<PinnedResult> best;
  for (const auto& pin : e) {
    auto vals = pinned_values(e, pin, f);
    if (!best || vals.size() > best->values.size()) best = PinnedResult{pin, std::move(vals), Decimal(0), {}};
  }
  const Decimal n(static_cast<std::uint64_t>(e.size()));
  best->ratio = Decimal(static_cast<std::uint64_t>(best->values.size())) / detail::power(n, Rational(8, 15));
  BoundParams bp;
  bp.set(Magnitude::SizeP, static_cast<std::uint64_t>(e.size())).set(Magnitude::P, p);
  best->violated = applicability(BoundId::PinnedLower815, bp).violated;
  return *best;
}

/// Curves {x in the plane : f(x - pin) = t} for a pin in F_p^3 and a value t, as plane conics.
/// Members that would be degenerate are omitted.
using PlanarFamily = std::function<std::vector<Conic>(const AffinePoint& pin, const FieldElem& t)>;

/// Quadrance: (x-p1)^2 + (y-p2)^2 = t - p3^2, a circle when the right side is nonzero.
inline PlanarFamily quadrance_circle_family() {
  return [](const AffinePoint& pin, const FieldElem& t) -> std::vector<Conic> {
    const FieldElem r = t - pin[2] * pin[2];
    if (r.is_zero()) return {};
    return {to_conic(CircleSpec(AffinePoint(pin[0], pin[1]), r))};
  };
}

/// x^2y^2 + z^2: ((x-p1)(y-p2))^2 = t - p3^2 splits into the hyperbolas (x-p1)(y-p2) = +-s
/// when t - p3^2 = s^2 != 0; otherwise there is no nondegenerate piece.
inline PlanarFamily quartic_hyperbola_family() {
  return [](const AffinePoint& pin, const FieldElem& t) -> std::vector<Conic> {
    const FieldElem r = t - pin[2] * pin[2];
    if (r.is_zero()) return {};
    auto s = sqrt(r);
    if (!s) return {};
    return {to_conic(HyperbolaSpec(pin[0], pin[1], *s)), to_conic(HyperbolaSpec(pin[0], pin[1], -*s))};
  };
}

struct PlanarDistanceResult {
  /// f(E - F) = {f(x - y) : x in E, y in F}.
  std::set<FieldElem> values;
  /// I(E, C) counted with multiplicity over the curves of every (pin, t).
  std::uint64_t incidences = 0;
  /// |E||F|.
  std::uint64_t pairs = 0;
  /// Pairs (x, pin) with x on no supplied curve for (pin, f(x - pin)).
  std::uint64_t excluded = 0;
  /// incidences >= pairs - excluded.
  bool accounting_holds = true;
  std::vector<std::string> notes;
};

/// Distances f(E - F) for E on the plane z = 0 of F_p^3, with the incidence accounting of
/// the curve family through each pin.
inline PlanarDistanceResult planar_two_set_distances(const PointSet& e, const PointSet& f_set,
                                                     const DistancePolynomial& f, const PlanarFamily& family) {
  if (e.dim() != 3 || f_set.dim() != 3 || f.dim() != 3) throw usage_error("planar_two_set_distances works in F_p^3");
  for (const auto& x : e)
    if (!x[2].is_zero()) throw usage_error("planar_two_set_distances: E must lie on z = 0 (" + x.to_string() + ")");
  PlanarDistanceResult out;
  out.pairs = static_cast<std::uint64_t>(e.size()) * f_set.size();
  if (e.empty() || f_set.empty()) return out;
  if (f.degree() > 2) {
    out.notes.push_back("restriction of " + f.name() + " to the plane has degree " + std::to_string(f.degree()) +
                        ", not 2; curves are the supplied nondegenerate pieces");
  }

  std::vector<AffinePoint> planar;
  for (const auto& x : e) planar.emplace_back(x[0], x[1]);

  for (const auto& pin : f_set) {
    std::map<FieldElem, std::vector<std::size_t>> by_value;
    for (std::size_t i = 0; i < planar.size(); ++i) by_value[f(e[i] - pin)].push_back(i);
    for (const auto& [t, idx] : by_value) {
      out.values.insert(t);
      const auto curves = family(pin, t);
      for (const auto& c : curves) {
        if (!is_nondegenerate(c)) throw degenerate_input_error("family returned degenerate " + c.to_string());
        for (const auto& x : planar) out.incidences += c.contains(x) ? 1 : 0;
      }
      for (auto i : idx) {
        const bool covered = std::any_of(curves.begin(), curves.end(), [&](const Conic& c) { return c.contains(planar[i]); });
        if (!covered) ++out.excluded;
      }
    }
  }
  out.accounting_holds = out.incidences + out.excluded >= out.pairs;
  return out;
}

struct ImageResult {
  std::set<FieldElem> image;
  PointSet sumset{2};
  /// E with points on the coordinate axes removed (Product only; otherwise E).
  PointSet pruned{2};
  /// Whether the axes hold at most |E|/2 points of E.
  bool axis_condition = true;
  /// I(E+F, {x : f(x - y) = t}) over y in F and t in f(pruned E), and the target |pruned||F|.
  std::uint64_t incidences = 0;
  std::uint64_t target = 0;
  BoundValue bound;
  Applicability hypotheses;
};

inline PointSet sumset(const PointSet& a, const PointSet& b) {
  if (a.dim() != b.dim()) throw usage_error("sumset: dimension mismatch");
  std::vector<AffinePoint> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x + y);
  return PointSet(a.dim(), std::move(out));
}

/// f(E) together with the sumset incidence argument behind the lower bound for |f(E)|.
inline ImageResult polynomial_image_check(const PointSet& e, const PointSet& f_set, const DistancePolynomial& f) {
  if (e.empty() || f_set.empty()) throw usage_error("polynomial_image_check: E and F must be nonempty");
  if (e.dim() != f.dim() || f_set.dim() != f.dim()) throw usage_error("polynomial_image_check: dimension mismatch");
  ImageResult out;
  for (const auto& x : e) out.image.insert(f(x));
  out.sumset = sumset(e, f_set);

  std::vector<AffinePoint> kept;
  std::size_t on_axes = 0;
  for (const auto& x : e) {
    const bool axis = f.tag() == DistancePolynomial::Tag::Product && (x[0].is_zero() || x[1].is_zero());
    if (axis) {
      ++on_axes;
    } else {
      kept.push_back(x);
    }
  }
  out.pruned = PointSet(e.dim(), std::move(kept));
  out.axis_condition = 2 * on_axes <= e.size();

  std::set<FieldElem> levels;
  for (const auto& x : out.pruned) levels.insert(f(x));
  for (const auto& y : f_set)
    for (const auto& x : out.sumset) out.incidences += levels.count(f(x - y));
  out.target = static_cast<std::uint64_t>(out.pruned.size()) * f_set.size();

  BoundParams bp;
  bp.set(Magnitude::SizeP, static_cast<std::uint64_t>(out.pruned.size()))
      .set(Magnitude::SizeC, static_cast<std::uint64_t>(f_set.size()))
      .set(Magnitude::SizeSum, static_cast<std::uint64_t>(out.sumset.size()))
      .set(Magnitude::P, e.modulus());
  out.bound = evaluate(BoundId::ImageLower, bp);
  out.hypotheses = applicability(BoundId::ImageLower, bp);
  return out;
}

struct DistanceSetResult {
  /// Delta(E, F) = {|x - y|^2 : x in E, y in F}.
  std::set<FieldElem> values;
  /// The pin p in F maximizing |Delta(p, E)| (lexicographically smallest among ties).
  std::optional<AffinePoint> best_pin;
  std::set<FieldElem> best_pinned;
};

inline DistanceSetResult distance_set(const PointSet& e, const PointSet& f_set, std::size_t d) {
  if (e.dim() != d || f_set.dim() != d) throw usage_error("distance_set: dimension mismatch");
  const auto q = DistancePolynomial::quadrance(d);
  DistanceSetResult out;
  for (const auto& y : f_set) {
    auto vals = pinned_values(e, y, q);
    out.values.insert(vals.begin(), vals.end());
    if (!out.best_pin || vals.size() > out.best_pinned.size()) {
      out.best_pin = y;
      out.best_pinned = std::move(vals);
    }
  }
  return out;
}

/// Largest number of points of P on one line (0 for empty P).
inline std::size_t max_collinear(const PointSet& pts) {
  if (pts.size() <= 2) return pts.size();
  std::size_t best = 2;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::map<LineFp2, std::size_t> through;
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      ++through[LineFp2::through(ProjPoint2::from_affine(pts[i]), ProjPoint2::from_affine(pts[j]))];
    for (const auto& [_, n] : through) best = std::max(best, n + 1);
  }
  return best;
}

struct BeckReport {
  std::size_t max_collinear = 0;
  /// Distinct nondegenerate conics with at least five points of P.
  std::uint64_t conic_count = 0;
  std::vector<Conic> conics;
  /// Ordered 5-tuples of distinct points with no three collinear.
  std::uint64_t gp_five_tuples = 0;
  /// |P|^{20/7}.
  Decimal lower_bound_value;
  /// |P|(|P|-1)(|P|-L)(|P|-3L)(|P|-6L) clamped at 0.
  Decimal gp_product;
  std::vector<std::string> notes;
};

namespace detail {

inline std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return a >= b ? a - b : a + p - b; }

/// Conic through five points in general position by elimination on rows
/// (x^2, xy, y^2, x, y, 1); coefficients scaled so the first nonzero is 1.
inline std::optional<std::array<std::uint64_t, 6>> fit_conic(const std::array<std::pair<std::uint64_t, std::uint64_t>, 5>& pts,
                                                             std::uint64_t p) {
  std::array<std::array<std::uint64_t, 6>, 5> m{};
  for (std::size_t r = 0; r < 5; ++r) {
    const auto [x, y] = pts[r];
    m[r] = {mulmod(x, x, p), mulmod(x, y, p), mulmod(y, y, p), x, y, 1};
  }
  std::array<int, 6> pivot_row{-1, -1, -1, -1, -1, -1};
  std::size_t row = 0;
  for (std::size_t col = 0; col < 6 && row < 5; ++col) {
    std::size_t sel = row;
    while (sel < 5 && m[sel][col] == 0) ++sel;
    if (sel == 5) continue;
    std::swap(m[sel], m[row]);
    const std::uint64_t inv = powmod(m[row][col], p - 2, p);
    for (auto& v : m[row]) v = mulmod(v, inv, p);
    for (std::size_t r = 0; r < 5; ++r) {
      if (r == row || m[r][col] == 0) continue;
      const std::uint64_t fct = m[r][col];
      for (std::size_t c = 0; c < 6; ++c) m[r][c] = submod(m[r][c], mulmod(fct, m[row][c], p), p);
    }
    pivot_row[col] = static_cast<int>(row);
    ++row;
  }
  if (row != 5) return std::nullopt;
  std::size_t free_col = 6;
  for (std::size_t c = 0; c < 6; ++c)
    if (pivot_row[c] < 0) free_col = c;
  std::array<std::uint64_t, 6> k{};
  k[free_col] = 1;
  for (std::size_t c = 0; c < 6; ++c)
    if (pivot_row[c] >= 0) k[c] = submod(0, m[static_cast<std::size_t>(pivot_row[c])][free_col], p);
  std::size_t lead = 0;
  while (k[lead] == 0) ++lead;
  const std::uint64_t inv = powmod(k[lead], p - 2, p);
  for (auto& v : k) v = mulmod(v, inv, p);
  return k;
}

/// det of [[2a, b, d], [b, 2c, e], [d, e, 2f]] (8x the conic matrix determinant).
inline bool fitted_nondegenerate(const std::array<std::uint64_t, 6>& k, std::uint64_t p) {
  const std::uint64_t a2 = 2 * k[0] % p, c2 = 2 * k[2] % p, f2 = 2 * k[5] % p, b = k[1], d = k[3], e = k[4];
  auto minor = [&](std::uint64_t w, std::uint64_t x, std::uint64_t y, std::uint64_t z) {
    return submod(mulmod(w, z, p), mulmod(x, y, p), p);
  };
  std::uint64_t det = mulmod(a2, minor(c2, e, e, f2), p);
  det = submod(det, mulmod(b, minor(b, e, d, f2), p), p);
  det = (det + mulmod(d, minor(b, c2, d, e), p)) % p;
  return det != 0;
}

}  // namespace detail

/// Exact count of nondegenerate conics through at least five points of P, found by
/// fitting every 5-subset with no three collinear points.
inline BeckReport beck_conic_count(const PointSet& pts) {
  if (pts.dim() != 2) throw usage_error("beck_conic_count needs planar points");
  BeckReport out;
  const std::size_t n = pts.size();
  out.max_collinear = max_collinear(pts);
  const Decimal nd(static_cast<std::uint64_t>(n));
  out.lower_bound_value = n == 0 ? Decimal(0) : detail::power(nd, Rational(20, 7));
  {
    BoundParams bp;
    bp.set(Magnitude::SizeP, static_cast<std::uint64_t>(n))
        .set(Magnitude::MaxCollinear, static_cast<std::uint64_t>(out.max_collinear));
    out.gp_product = evaluate(BoundId::GP5TupleLower, bp).total;
  }
  if (n < 5) {
    out.notes.push_back("fewer than five points: no conic is determined");
    return out;
  }
  const std::uint64_t p = pts.modulus();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> xy;
  for (const auto& pt : pts) xy.emplace_back(pt.x().value(), pt.y().value());

  // collinear[i][j] bit l: points i, j, l on one line.
  std::vector<std::vector<std::vector<bool>>> col(n, std::vector<std::vector<bool>>(n, std::vector<bool>(n, false)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t l = j + 1; l < n; ++l) {
        const auto [x1, y1] = xy[i];
        const auto [x2, y2] = xy[j];
        const auto [x3, y3] = xy[l];
        const std::uint64_t lhs = detail::mulmod(detail::submod(x2, x1, p), detail::submod(y3, y1, p), p);
        const std::uint64_t rhs = detail::mulmod(detail::submod(y2, y1, p), detail::submod(x3, x1, p), p);
        const bool c = lhs == rhs;
        for (auto [u, v, w] : {std::array{i, j, l}, std::array{i, l, j}, std::array{j, i, l}, std::array{j, l, i},
                               std::array{l, i, j}, std::array{l, j, i}})
          col[u][v][w] = c;
      }

  std::set<std::array<std::uint64_t, 6>> found;
  std::uint64_t gp_subsets = 0;
  std::array<std::size_t, 5> s{};
  for (s[0] = 0; s[0] < n; ++s[0])
    for (s[1] = s[0] + 1; s[1] < n; ++s[1])
      for (s[2] = s[1] + 1; s[2] < n; ++s[2]) {
        if (col[s[0]][s[1]][s[2]]) continue;
        for (s[3] = s[2] + 1; s[3] < n; ++s[3]) {
          if (col[s[0]][s[1]][s[3]] || col[s[0]][s[2]][s[3]] || col[s[1]][s[2]][s[3]]) continue;
          for (s[4] = s[3] + 1; s[4] < n; ++s[4]) {
            bool ok = true;
            for (std::size_t a = 0; a < 4 && ok; ++a)
              for (std::size_t b = a + 1; b < 4 && ok; ++b) ok = !col[s[a]][s[b]][s[4]];
            if (!ok) continue;
            ++gp_subsets;
            std::array<std::pair<std::uint64_t, std::uint64_t>, 5> five;
            for (std::size_t t = 0; t < 5; ++t) five[t] = xy[s[t]];
            auto k = detail::fit_conic(five, p);
            if (k && detail::fitted_nondegenerate(*k, p)) found.insert(*k);
          }
        }
      }
  out.gp_five_tuples = gp_subsets * 120;
  out.conic_count = found.size();
  for (const auto& k : found) out.conics.push_back(Conic::from_array(
                                  {FieldElem::from_canonical(k[0], p), FieldElem::from_canonical(k[1], p),
                                   FieldElem::from_canonical(k[2], p), FieldElem::from_canonical(k[3], p),
                                   FieldElem::from_canonical(k[4], p), FieldElem::from_canonical(k[5], p)}));
  return out;
}

}  // namespace fpinc
