#pragma once

/**
 * @file incidence.hpp
 * @brief Exact point-curve incidence counting, richness histograms and k-rich
 * subfamilies.
 *
 * Two engines are provided. The naive engine asks every curve about every
 * point through the curve types' own `contains`. The packed engine lowers
 * each curve kind to a fixed linear form over precomputed point monomials
 * (x, y, x^2, xy, y^2, |x|^2) stored in flat arrays, and reduces with a
 * Barrett step. Curves are the outer loop and points the inner one. The
 * packed engine can split the curve range across threads; each thread writes
 * a disjoint slice of the per-curve counts, so the result does not depend on
 * the thread count.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "fpinc/curves.hpp"
#include "fpinc/errors.hpp"
#include "fpinc/field.hpp"
#include "fpinc/projective.hpp"

namespace fpinc {

/// Deduplicated, lexicographically sorted points of one dimension over one field.
class PointSet {
 public:
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<AffinePoint> points) : dim_(dim), points_(std::move(points)) {
    for (const auto& pt : points_) {
      if (pt.dim() != dim_) throw usage_error("point " + pt.to_string() + " has wrong dimension");
      if (pt.modulus() != points_.front().modulus()) throw usage_error("point set mixes fields");
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  }
  explicit PointSet(std::vector<AffinePoint> points) : PointSet(2) {
    // Dimension is read before the vector is moved; argument order is unspecified.
    const std::size_t dim = points.empty() ? 2 : points.front().dim();
    *this = PointSet(dim, std::move(points));
  }

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] const std::vector<AffinePoint>& points() const noexcept { return points_; }
  [[nodiscard]] const AffinePoint& operator[](std::size_t i) const { return points_[i]; }
  /// 0 for an empty set.
  [[nodiscard]] std::uint64_t modulus() const noexcept { return points_.empty() ? 0 : points_.front().modulus(); }
  [[nodiscard]] bool contains(const AffinePoint& pt) const {
    return std::binary_search(points_.begin(), points_.end(), pt);
  }
  [[nodiscard]] auto begin() const { return points_.begin(); }
  [[nodiscard]] auto end() const { return points_.end(); }

  /// {pt + v : pt in this set}.
  [[nodiscard]] PointSet translated(const AffinePoint& v) const {
    std::vector<AffinePoint> out;
    out.reserve(points_.size());
    for (const auto& pt : points_) out.push_back(pt + v);
    return PointSet(dim_, std::move(out));
  }
  /// This set with one point removed (if present).
  [[nodiscard]] PointSet without(const AffinePoint& pt) const {
    std::vector<AffinePoint> out;
    for (const auto& q : points_)
      if (q != pt) out.push_back(q);
    return PointSet(dim_, std::move(out));
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_;
  std::vector<AffinePoint> points_;
};

enum class CurveKind { Lines, Conics, Circles, Parabolas, Hyperbolas, MobiusGraphs, Spheres, Hyperplanes };

inline const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Lines: return "lines";
    case CurveKind::Conics: return "conics";
    case CurveKind::Circles: return "circles";
    case CurveKind::Parabolas: return "parabolas";
    case CurveKind::Hyperbolas: return "hyperbolas";
    case CurveKind::MobiusGraphs: return "mobius";
    case CurveKind::Spheres: return "spheres";
    case CurveKind::Hyperplanes: return "hyperplanes";
  }
  return "?";
}

template <typename T>
struct curve_kind_of;
template <> struct curve_kind_of<LineFp2> { static constexpr CurveKind value = CurveKind::Lines; };
template <> struct curve_kind_of<Conic> { static constexpr CurveKind value = CurveKind::Conics; };
template <> struct curve_kind_of<CircleSpec> { static constexpr CurveKind value = CurveKind::Circles; };
template <> struct curve_kind_of<ParabolaSpec> { static constexpr CurveKind value = CurveKind::Parabolas; };
template <> struct curve_kind_of<HyperbolaSpec> { static constexpr CurveKind value = CurveKind::Hyperbolas; };
template <> struct curve_kind_of<Mobius> { static constexpr CurveKind value = CurveKind::MobiusGraphs; };
template <> struct curve_kind_of<Sphere> { static constexpr CurveKind value = CurveKind::Spheres; };
template <> struct curve_kind_of<Hyperplane> { static constexpr CurveKind value = CurveKind::Hyperplanes; };

template <typename T>
concept Curve = requires { curve_kind_of<T>::value; };

/// A homogeneous, canonically deduplicated set of curves.
class CurveFamily {
 public:
  using Members = std::variant<std::vector<LineFp2>, std::vector<Conic>, std::vector<CircleSpec>,
                               std::vector<ParabolaSpec>, std::vector<HyperbolaSpec>, std::vector<Mobius>,
                               std::vector<Sphere>, std::vector<Hyperplane>>;

  template <Curve T>
  explicit CurveFamily(std::vector<T> members) : kind_(curve_kind_of<T>::value) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    members_ = std::move(members);
  }

  [[nodiscard]] CurveKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t size() const {
    return std::visit([](const auto& v) { return v.size(); }, members_);
  }
  [[nodiscard]] bool empty() const { return size() == 0; }
  [[nodiscard]] const Members& members() const noexcept { return members_; }

  template <Curve T>
  [[nodiscard]] const std::vector<T>& as() const {
    return std::get<std::vector<T>>(members_);
  }

  /// Ambient dimension of the curves; nullopt for an empty family of spheres or hyperplanes.
  [[nodiscard]] std::optional<std::size_t> dim() const {
    if (kind_ == CurveKind::Spheres) {
      const auto& v = as<Sphere>();
      return v.empty() ? std::nullopt : std::optional<std::size_t>(v.front().dim());
    }
    if (kind_ == CurveKind::Hyperplanes) {
      const auto& v = as<Hyperplane>();
      return v.empty() ? std::nullopt : std::optional<std::size_t>(v.front().dim());
    }
    return 2;
  }

  /// Members at the given (increasing) indices.
  [[nodiscard]] CurveFamily subset(const std::vector<std::size_t>& indices) const {
    return std::visit(
        [&](const auto& v) {
          std::remove_cvref_t<decltype(v)> out;
          out.reserve(indices.size());
          for (auto i : indices) out.push_back(v.at(i));
          return CurveFamily(std::move(out));
        },
        members_);
  }

  [[nodiscard]] std::string member_string(std::size_t i) const {
    return std::visit([&](const auto& v) { return v.at(i).to_string(); }, members_);
  }

  friend bool operator==(const CurveFamily&, const CurveFamily&) = default;

 private:
  CurveKind kind_;
  Members members_;
};

namespace detail {

inline void check_compatible(const PointSet& pts, const CurveFamily& fam) {
  if (pts.empty() || fam.empty()) return;
  const auto d = fam.dim();
  if (d && *d != pts.dim()) {
    throw usage_error("dimension mismatch: points in F_p^" + std::to_string(pts.dim()) + ", " + to_string(fam.kind()) +
                      " in F_p^" + std::to_string(*d));
  }
  const std::uint64_t p = std::visit(
      [](const auto& v) -> std::uint64_t {
        using T = typename std::remove_cvref_t<decltype(v)>::value_type;
        if constexpr (std::is_same_v<T, CircleSpec> || std::is_same_v<T, Sphere>) return v.front().r.modulus();
        else if constexpr (std::is_same_v<T, ParabolaSpec> || std::is_same_v<T, HyperbolaSpec>) return v.front().a.modulus();
        else return v.front().modulus();
      },
      fam.members());
  if (p != pts.modulus()) throw usage_error("points and curves live over different fields");
}

/// x mod p for 64-bit x and p < 2^32, via a precomputed reciprocal.
class Barrett {
 public:
  explicit Barrett(std::uint64_t p)
      : p_(p), m_(static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 64U) / p)) {}
  [[nodiscard]] std::uint64_t reduce(std::uint64_t x) const noexcept {
    const auto q = static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * m_) >> 64U);
    std::uint64_t r = x - q * p_;
    if (r >= p_) r -= p_;
    if (r >= p_) r -= p_;
    return r;
  }
  [[nodiscard]] std::uint64_t p() const noexcept { return p_; }

 private:
  std::uint64_t p_;
  std::uint64_t m_;
};

/// Point coordinates and monomials in structure-of-arrays form.
struct PackedPoints {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<std::uint64_t> coord;  // coord[i * dim + j]
  std::vector<std::uint64_t> x, y, neg_y, x2, xy, y2, norm2;

  PackedPoints(const PointSet& pts, std::uint64_t p) : n(pts.size()), dim(pts.dim()) {
    coord.reserve(n * dim);
    norm2.reserve(n);
    for (const auto& pt : pts) {
      std::uint64_t s = 0;
      for (const auto& c : pt.coords()) {
        coord.push_back(c.value());
        s = (s + c.value() * c.value()) % p;
      }
      norm2.push_back(s);
    }
    if (dim == 2) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t a = coord[2 * i], b = coord[2 * i + 1];
        x.push_back(a);
        y.push_back(b);
        neg_y.push_back(b == 0 ? 0 : p - b);
        x2.push_back(a * a % p);
        xy.push_back(a * b % p);
        y2.push_back(b * b % p);
      }
    }
  }
};

inline std::uint64_t neg(const FieldElem& v) { return v.is_zero() ? 0 : v.modulus() - v.value(); }

/// Per-curve counts for curves [begin, end) written to out[begin..end).
/// Below 2^31 up to three raw products fit in 64 bits before a reduction. Wide
/// instantiations (p up to 2^32) reduce every product first.
template <bool Wide, typename T>
void count_range(const std::vector<T>& curves, const PackedPoints& pk, const Barrett& br, std::size_t begin,
                 std::size_t end, std::uint32_t* out) {
  const std::size_t n = pk.n;
  const auto mul = [&br](std::uint64_t u, std::uint64_t v) {
    if constexpr (Wide) return br.reduce(u * v);
    else return u * v;
  };
  for (std::size_t ci = begin; ci < end; ++ci) {
    const T& cv = curves[ci];
    std::uint32_t hits = 0;
    if constexpr (std::is_same_v<T, Conic>) {
      const std::uint64_t a = cv.a().value(), b = cv.b().value(), c = cv.c().value();
      const std::uint64_t d = cv.d().value(), e = cv.e().value(), f = cv.f().value();
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t quad = br.reduce(mul(a, pk.x2[i]) + mul(b, pk.xy[i]) + mul(c, pk.y2[i]));
        hits += br.reduce(mul(d, pk.x[i]) + mul(e, pk.y[i]) + f + quad) == 0;
      }
    } else if constexpr (std::is_same_v<T, LineFp2>) {
      const std::uint64_t a = cv.l1().value(), b = cv.l2().value(), c = cv.l3().value();
      for (std::size_t i = 0; i < n; ++i) hits += br.reduce(mul(a, pk.x[i]) + mul(b, pk.y[i]) + c) == 0;
    } else if constexpr (std::is_same_v<T, CircleSpec>) {
      // x^2 + y^2 - 2 c1 x - 2 c2 y + (c1^2 + c2^2 - r)
      const FieldElem two = FieldElem::from_canonical(2, br.p());
      const std::uint64_t m1 = neg(two * cv.center.x()), m2 = neg(two * cv.center.y());
      const std::uint64_t k =
          (cv.center.x() * cv.center.x() + cv.center.y() * cv.center.y() - cv.r).value();
      for (std::size_t i = 0; i < n; ++i) hits += br.reduce(mul(m1, pk.x[i]) + mul(m2, pk.y[i]) + pk.norm2[i] + k) == 0;
    } else if constexpr (std::is_same_v<T, ParabolaSpec>) {
      const std::uint64_t a = cv.a.value(), b = cv.b.value(), c = cv.c.value();
      for (std::size_t i = 0; i < n; ++i) hits += br.reduce(mul(a, pk.x2[i]) + mul(b, pk.x[i]) + c + pk.neg_y[i]) == 0;
    } else if constexpr (std::is_same_v<T, HyperbolaSpec>) {
      // xy - b x - a y + (ab - c)
      const std::uint64_t nb = neg(cv.b), na = neg(cv.a), k = (cv.a * cv.b - cv.c).value();
      for (std::size_t i = 0; i < n; ++i) hits += br.reduce(pk.xy[i] + mul(nb, pk.x[i]) + mul(na, pk.y[i]) + k) == 0;
    } else if constexpr (std::is_same_v<T, Mobius>) {
      // c xy + d y - a x - b
      const std::uint64_t c = cv.c().value(), d = cv.d().value(), na = neg(cv.a()), nb = neg(cv.b());
      for (std::size_t i = 0; i < n; ++i) hits += br.reduce(mul(c, pk.xy[i]) + mul(d, pk.y[i]) + mul(na, pk.x[i]) + nb) == 0;
    } else if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, Hyperplane>) {
      // Sphere: |x|^2 + sum (-2 c_j) x_j + (|c|^2 - r).  Hyperplane: sum n_j x_j + offset.
      const std::size_t dim = pk.dim;
      std::vector<std::uint64_t> w(dim);
      std::uint64_t k = 0;
      bool with_norm = false;
      if constexpr (std::is_same_v<T, Sphere>) {
        const FieldElem two = FieldElem::from_canonical(2, br.p());
        FieldElem kk = -cv.r;
        for (std::size_t j = 0; j < dim; ++j) {
          w[j] = neg(two * cv.center[j]);
          kk += cv.center[j] * cv.center[j];
        }
        k = kk.value();
        with_norm = true;
      } else {
        for (std::size_t j = 0; j < dim; ++j) w[j] = cv.normal()[j].value();
        k = cv.offset().value();
      }
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t* pc = &pk.coord[i * dim];
        std::uint64_t acc = k + (with_norm ? pk.norm2[i] : 0);
        for (std::size_t j = 0; j < dim; ++j) {
          acc += mul(w[j], pc[j]);
          if (j % 3 == 2) acc = br.reduce(acc);
        }
        hits += br.reduce(acc) == 0;
      }
    }
    out[ci] = hits;
  }
}

}  // namespace detail

enum class Engine { Naive, Packed };

struct CountOptions {
  Engine engine = Engine::Packed;
  /// Worker threads for the packed engine; 0 means hardware concurrency.
  unsigned threads = 1;
};

/// Number of points of `pts` on each member of `fam`, in member order.
inline std::vector<std::uint32_t> per_curve_incidences(const PointSet& pts, const CurveFamily& fam,
                                                       CountOptions opts = {}) {
  detail::check_compatible(pts, fam);
  std::vector<std::uint32_t> counts(fam.size(), 0);
  if (pts.empty() || fam.empty()) return counts;

  if (opts.engine == Engine::Naive) {
    std::visit(
        [&](const auto& curves) {
          for (std::size_t ci = 0; ci < curves.size(); ++ci) {
            std::uint32_t hits = 0;
            for (const auto& pt : pts) hits += curves[ci].contains(pt) ? 1U : 0U;
            counts[ci] = hits;
          }
        },
        fam.members());
    return counts;
  }

  const std::uint64_t p = pts.modulus();
  const detail::PackedPoints packed(pts, p);
  const detail::Barrett br(p);
  unsigned threads = opts.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : opts.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, fam.size()));

  const bool wide = p >= (std::uint64_t{1} << 31U);
  std::visit(
      [&](const auto& curves) {
        const auto run = [&](std::size_t begin, std::size_t end) {
          if (wide) detail::count_range<true>(curves, packed, br, begin, end, counts.data());
          else detail::count_range<false>(curves, packed, br, begin, end, counts.data());
        };
        if (threads <= 1) {
          run(0, curves.size());
          return;
        }
        std::vector<std::jthread> workers;
        const std::size_t chunk = (curves.size() + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
          const std::size_t begin = w * chunk;
          const std::size_t end = std::min(curves.size(), begin + chunk);
          if (begin >= end) break;
          workers.emplace_back([&run, begin, end] { run(begin, end); });
        }
      },
      fam.members());
  return counts;
}

/// I(P, C): the number of (point, curve) pairs with the point on the curve.
inline std::uint64_t count_incidences(const PointSet& pts, const CurveFamily& fam, CountOptions opts = {}) {
  std::uint64_t total = 0;
  for (auto c : per_curve_incidences(pts, fam, opts)) total += c;
  return total;
}

/// Histogram k -> |C_{=k}| of curves containing exactly k points, with k = 0 included.
struct IncidenceProfile {
  std::map<std::size_t, std::size_t> histogram;
  std::uint64_t total = 0;
  std::size_t family_size = 0;
  /// Dyadic threshold used when converting to a bound; set by the caller.
  std::optional<double> delta;

  [[nodiscard]] std::size_t max_richness() const { return histogram.empty() ? 0 : histogram.rbegin()->first; }

  /// |C_k| = number of curves with at least k points.
  [[nodiscard]] std::size_t rich_count(std::size_t k) const {
    std::size_t n = 0;
    for (auto it = histogram.lower_bound(k); it != histogram.end(); ++it) n += it->second;
    return n;
  }

  /// sum_k k |C_{=k}| == total and sum_k |C_{=k}| == family_size.
  [[nodiscard]] bool consistent() const {
    std::uint64_t weighted = 0;
    std::size_t curves = 0;
    for (const auto& [k, n] : histogram) {
      weighted += static_cast<std::uint64_t>(k) * n;
      curves += n;
    }
    return weighted == total && curves == family_size;
  }
};

inline IncidenceProfile profile_from_counts(const std::vector<std::uint32_t>& counts) {
  IncidenceProfile prof;
  prof.family_size = counts.size();
  for (auto c : counts) {
    ++prof.histogram[c];
    prof.total += c;
  }
  return prof;
}

inline IncidenceProfile incidence_histogram(const PointSet& pts, const CurveFamily& fam, CountOptions opts = {}) {
  return profile_from_counts(per_curve_incidences(pts, fam, opts));
}

/// Members of a family with at least k points of P.
struct RichFamily {
  std::size_t k = 1;
  CurveFamily curves;
  /// Incidence count of each member of `curves`.
  std::vector<std::uint32_t> richness;
};

inline RichFamily rich_curves(const PointSet& pts, const CurveFamily& fam, std::size_t k, CountOptions opts = {}) {
  if (k == 0) throw usage_error("rich_curves: threshold k must be >= 1");
  const auto counts = per_curve_incidences(pts, fam, opts);
  std::vector<std::size_t> keep;
  std::vector<std::uint32_t> richness;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] >= k) {
      keep.push_back(i);
      richness.push_back(counts[i]);
    }
  }
  return RichFamily{k, fam.subset(keep), std::move(richness)};
}

/// Threshold balancing Delta |C| against |P|^{23/4} / Delta^{23/4}: max{5, |P|^{23/27} / |C|^{4/27}}.
inline double conic_dyadic_delta(double size_p, double size_c) {
  if (size_c <= 0) return 5.0;
  return std::max(5.0, std::pow(size_p, 23.0 / 27.0) / std::pow(size_c, 4.0 / 27.0));
}

/// The incidence sum split at Delta, with the tail grouped in ranges [2^i Delta, 2^{i+1} Delta).
struct DyadicSplit {
  struct Bucket {
    std::size_t level = 0;
    double lo = 0;
    double hi = 0;
    std::size_t curves = 0;
    std::uint64_t incidences = 0;
  };
  double delta = 0;
  std::uint64_t low_incidences = 0;  // sum over k <= Delta
  std::size_t low_curves = 0;
  std::vector<Bucket> buckets;

  [[nodiscard]] std::uint64_t total() const {
    std::uint64_t t = low_incidences;
    for (const auto& b : buckets) t += b.incidences;
    return t;
  }
};

inline DyadicSplit dyadic_split(const IncidenceProfile& prof, double delta) {
  if (!(delta > 0)) throw usage_error("dyadic_split: delta must be positive");
  DyadicSplit out;
  out.delta = delta;
  for (const auto& [k, n] : prof.histogram) {
    const double kd = static_cast<double>(k);
    if (kd <= delta) {
      out.low_incidences += static_cast<std::uint64_t>(k) * n;
      out.low_curves += n;
      continue;
    }
    const auto level = static_cast<std::size_t>(std::floor(std::log2(kd / delta)));
    while (out.buckets.size() <= level) {
      DyadicSplit::Bucket b;
      b.level = out.buckets.size();
      b.lo = delta * std::ldexp(1.0, static_cast<int>(b.level));
      b.hi = 2 * b.lo;
      out.buckets.push_back(b);
    }
    out.buckets[level].curves += n;
    out.buckets[level].incidences += static_cast<std::uint64_t>(k) * n;
  }
  return out;
}

/// Conics of the family through both q1 and q2 with at least k points of P.
inline std::vector<Conic> pinned_pair_rich_conics(const PointSet& pts, const CurveFamily& conics,
                                                  const AffinePoint& q1, const AffinePoint& q2, std::size_t k) {
  if (conics.kind() != CurveKind::Conics) throw usage_error("pinned_pair_rich_conics needs a conic family");
  const auto rich = rich_curves(pts, conics, std::max<std::size_t>(k, 1));
  std::vector<Conic> out;
  for (const auto& q : rich.curves.as<Conic>()) {
    if (q.contains(q1) && q.contains(q2)) out.push_back(q);
  }
  return out;
}

/// Sends every nondegenerate conic through q1 and q2 to the Moebius map obtained
/// after moving q1, q2 to [0:1:0], [1:0:0]. Degenerate conics are rejected.
inline std::vector<Mobius> normalize_pinned_pair(const std::vector<Conic>& conics, const AffinePoint& q1,
                                                 const AffinePoint& q2) {
  const ProjTransform pi = two_point_normalization(ProjPoint2::from_affine(q1), ProjPoint2::from_affine(q2));
  std::vector<Mobius> out;
  out.reserve(conics.size());
  for (const auto& q : conics) {
    if (!q.contains(q1) || !q.contains(q2)) throw usage_error(q.to_string() + " does not pass through both pins");
    auto m = conic_to_mobius(transform_conic(pi, q));
    if (!m) throw degenerate_input_error(q.to_string() + " is degenerate");
    out.push_back(*m);
  }
  return out;
}

}  // namespace fpinc
