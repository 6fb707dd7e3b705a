#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace fpinc;
using fpinc::testing::below;
using fpinc::testing::random_point_set;

namespace {

std::uint64_t ipow(std::uint64_t b, unsigned e, std::uint64_t p) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) r = r * b % p;
  return r;
}

// Polynomial value on integer coordinates, no FieldElem involved.
std::uint64_t eval_int(const DistancePolynomial& f, const std::vector<std::uint64_t>& v, std::uint64_t p) {
  std::uint64_t acc = 0;
  for (const auto& m : f.monomials()) {
    std::uint64_t t = static_cast<std::uint64_t>((m.coeff % static_cast<std::int64_t>(p) + static_cast<std::int64_t>(p))) % p;
    for (std::size_t i = 0; i < v.size(); ++i) t = t * ipow(v[i], m.exps[i], p) % p;
    acc = (acc + t) % p;
  }
  return acc;
}

std::vector<std::uint64_t> diff(const AffinePoint& a, const AffinePoint& b) {
  const std::uint64_t p = a.modulus();
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < a.dim(); ++i) out.push_back((a[i].value() + p - b[i].value()) % p);
  return out;
}

std::size_t brute_best_pinned(const PointSet& e, const DistancePolynomial& f) {
  std::size_t best = 0;
  for (const auto& pin : e) {
    std::set<std::uint64_t> vals;
    for (const auto& x : e) vals.insert(eval_int(f, diff(pin, x), e.modulus()));
    best = std::max(best, vals.size());
  }
  return best;
}

PointSet lift(const PointSet& planar) {
  std::vector<AffinePoint> out;
  const FieldSpec fs(planar.modulus());
  for (const auto& x : planar) out.push_back(AffinePoint({x[0], x[1], fs.zero()}));
  return PointSet(3, out);
}

}  // namespace

TEST(Pinned, SinglePoint) {
  const FieldSpec fs(7);
  const PointSet e(std::vector<AffinePoint>{AffinePoint::from_ints(fs, {0, 0})});
  const auto r = pinned_distance_best(e, DistancePolynomial::sum_squares());
  EXPECT_EQ(r.values.size(), 1u);
  EXPECT_EQ(r.ratio, Decimal(1));
}

TEST(Pinned, FullPlaneOverF5NeedsOverride) {
  const FieldSpec fs(5);
  const PointSet e(all_affine_points(fs, 2));
  EXPECT_THROW((void)pinned_distance_best(e, DistancePolynomial::sum_squares()), usage_error);
  const auto r = pinned_distance_best(e, DistancePolynomial::sum_squares(), {false});
  EXPECT_EQ(r.values.size(), 5u);
  EXPECT_EQ(r.pin, AffinePoint::from_ints(fs, {0, 0}));
  EXPECT_FALSE(r.violated.empty());
}

TEST(Pinned, RejectsBadInputs) {
  const FieldSpec fs(7);
  EXPECT_THROW((void)pinned_distance_best(PointSet(2), DistancePolynomial::sum_squares()), usage_error);
  EXPECT_THROW((void)pinned_distance_best(PointSet(all_affine_points(fs, 3)), DistancePolynomial::sum_squares()),
               usage_error);
}

TEST(Pinned, MatchesBruteForce) {
  const FieldSpec fs(31);
  const std::array<DistancePolynomial, 3> polys{DistancePolynomial::sum_squares(), DistancePolynomial::product(),
                                                DistancePolynomial::parabola()};
  for (int t = 0; t < 100; ++t) {
    const auto e = random_point_set(fs, 60);
    const auto& f = polys[static_cast<std::size_t>(t) % 3];
    const auto r = pinned_distance_best(e, f);
    EXPECT_EQ(r.values.size(), brute_best_pinned(e, f));
    EXPECT_TRUE(e.contains(r.pin));
    EXPECT_EQ(r.values, pinned_values(e, r.pin, f));
    // No earlier pin does at least as well.
    for (const auto& pin : e) {
      if (!(pin < r.pin)) break;
      EXPECT_LT(pinned_values(e, pin, f).size(), r.values.size());
    }
  }
}

TEST(PlanarDistances, SingleFarPoint) {
  const FieldSpec fs(7);
  const PointSet e = lift(PointSet(all_affine_points(fs, 2)));
  const PointSet f(std::vector<AffinePoint>{AffinePoint::from_ints(fs, {0, 0, 1})});
  const auto r = planar_two_set_distances(e, f, DistancePolynomial::quadrance(3), quadrance_circle_family());
  std::set<std::uint64_t> want;
  for (const auto& x : e) want.insert(eval_int(DistancePolynomial::quadrance(3), diff(x, f[0]), 7));
  EXPECT_EQ(r.values.size(), want.size());
  EXPECT_EQ(r.pairs, 49u);
  EXPECT_EQ(r.incidences + r.excluded, r.pairs);
  // Only t = 1 gives r = 0, and over F_7 only the pin's shadow sits on that circle.
  EXPECT_EQ(r.excluded, 1u);
}

TEST(PlanarDistances, EmptyF) {
  const FieldSpec fs(7);
  const auto r = planar_two_set_distances(lift(PointSet(all_affine_points(fs, 2))), PointSet(3),
                                          DistancePolynomial::quadrance(3), quadrance_circle_family());
  EXPECT_TRUE(r.values.empty());
  EXPECT_EQ(r.pairs, 0u);
  EXPECT_TRUE(r.accounting_holds);
}

TEST(PlanarDistances, RejectsOffPlaneE) {
  const FieldSpec fs(7);
  const PointSet e(std::vector<AffinePoint>{AffinePoint::from_ints(fs, {0, 0, 1})});
  EXPECT_THROW((void)planar_two_set_distances(e, e, DistancePolynomial::quadrance(3), quadrance_circle_family()),
               usage_error);
}

TEST(PlanarDistances, QuarticAgainstBruteForce) {
  for (std::uint64_t p : {11, 19, 23}) {
    const FieldSpec fs(p);
    for (int t = 0; t < 10; ++t) {
      const auto e = lift(random_point_set(fs, 40));
      const auto f = random_point_set(fs, 30, 3);
      const auto poly = DistancePolynomial::x2y2_plus_z2();
      const auto r = planar_two_set_distances(e, f, poly, quartic_hyperbola_family());
      std::set<std::uint64_t> want;
      std::uint64_t axis_pairs = 0;
      for (const auto& x : e)
        for (const auto& y : f) {
          const auto dv = diff(x, y);
          want.insert(eval_int(poly, dv, p));
          axis_pairs += dv[0] == 0 || dv[1] == 0;
        }
      std::set<std::uint64_t> got;
      for (const auto& v : r.values) got.insert(v.value());
      EXPECT_EQ(got, want);
      EXPECT_EQ(r.excluded, axis_pairs);
      EXPECT_EQ(r.incidences + r.excluded, r.pairs);
      EXPECT_TRUE(r.accounting_holds);
      EXPECT_FALSE(r.notes.empty());
    }
  }
}

TEST(PlanarDistances, QuadranceAccounting) {
  const FieldSpec fs(23);
  for (int t = 0; t < 10; ++t) {
    const auto r = planar_two_set_distances(lift(random_point_set(fs, 50)), random_point_set(fs, 40, 3),
                                            DistancePolynomial::quadrance(3), quadrance_circle_family());
    EXPECT_EQ(r.incidences + r.excluded, r.pairs);
    EXPECT_TRUE(r.notes.empty());
  }
}

TEST(Image, CircleHasOneValue) {
  const FieldSpec fs(11);
  const PointSet e(enumerate_points(CircleSpec(AffinePoint::origin(fs, 2), fs.elem(3))));
  const PointSet f(std::vector<AffinePoint>{AffinePoint::origin(fs, 2)});
  const auto r = polynomial_image_check(e, f, DistancePolynomial::sum_squares());
  EXPECT_EQ(r.image, (std::set<FieldElem>{fs.elem(3)}));
  EXPECT_EQ(r.sumset, e);
}

TEST(Image, AxisPointsArePruned) {
  const FieldSpec fs(7);
  std::vector<AffinePoint> axes;
  for (int i = 0; i < 7; ++i) {
    axes.push_back(AffinePoint::from_ints(fs, {i, 0}));
    axes.push_back(AffinePoint::from_ints(fs, {0, i}));
  }
  const PointSet e(axes);
  const auto r = polynomial_image_check(e, e, DistancePolynomial::product());
  EXPECT_EQ(r.image, (std::set<FieldElem>{fs.zero()}));
  EXPECT_TRUE(r.pruned.empty());
  EXPECT_FALSE(r.axis_condition);
  EXPECT_EQ(r.target, 0u);
  EXPECT_THROW((void)polynomial_image_check(PointSet(2), e, DistancePolynomial::product()), usage_error);
}

TEST(Image, RandomAgainstBruteForce) {
  const FieldSpec fs(29);
  const std::array<DistancePolynomial, 3> polys{DistancePolynomial::sum_squares(), DistancePolynomial::product(),
                                                DistancePolynomial::parabola()};
  for (int t = 0; t < 30; ++t) {
    const auto e = random_point_set(fs, 5 + below(30));
    const auto f = random_point_set(fs, 1 + below(10));
    const auto& poly = polys[static_cast<std::size_t>(t) % 3];
    const auto r = polynomial_image_check(e, f, poly);
    std::set<std::uint64_t> want, got;
    for (const auto& x : e) want.insert(eval_int(poly, {x[0].value(), x[1].value()}, 29));
    for (const auto& v : r.image) got.insert(v.value());
    EXPECT_EQ(got, want);
    std::set<std::pair<std::uint64_t, std::uint64_t>> sums;
    for (const auto& x : e)
      for (const auto& y : f) sums.insert({(x[0].value() + y[0].value()) % 29, (x[1].value() + y[1].value()) % 29});
    EXPECT_EQ(r.sumset.size(), sums.size());
    EXPECT_GE(r.incidences, r.target);
  }
}

TEST(DistanceSet, Examples) {
  const FieldSpec f3(3);
  const PointSet zero(std::vector<AffinePoint>{AffinePoint::origin(f3, 2)});
  EXPECT_EQ(distance_set(zero, zero, 2).values, (std::set<FieldElem>{f3.zero()}));
  const PointSet all(all_affine_points(f3, 2));
  EXPECT_EQ(distance_set(all, all, 2).values.size(), 3u);
  EXPECT_THROW((void)distance_set(all, all, 3), usage_error);
}

TEST(DistanceSet, MatchesOracleAndIsSymmetric) {
  const FieldSpec fs(11);
  for (int t = 0; t < 30; ++t) {
    const auto e = random_point_set(fs, 1 + below(20), 3);
    const auto f = random_point_set(fs, 1 + below(20), 3);
    const auto r = distance_set(e, f, 3);
    std::set<std::uint64_t> want, got;
    for (const auto& x : e)
      for (const auto& y : f) want.insert(eval_int(DistancePolynomial::quadrance(3), diff(x, y), 11));
    for (const auto& v : r.values) got.insert(v.value());
    EXPECT_EQ(got, want);
    EXPECT_EQ(r.values, distance_set(f, e, 3).values);
    ASSERT_TRUE(r.best_pin.has_value());
    for (const auto& y : f) EXPECT_LE(pinned_values(e, y, DistancePolynomial::quadrance(3)).size(), r.best_pinned.size());
  }
}

TEST(MaxCollinear, Examples) {
  const FieldSpec fs(7);
  EXPECT_EQ(max_collinear(PointSet(2)), 0u);
  EXPECT_EQ(max_collinear(PointSet(all_affine_points(fs, 2))), 7u);
  EXPECT_EQ(max_collinear(PointSet(enumerate_points(Conic::from_ints(fs, 1, 0, 0, 0, -1, 0)))), 2u);
}

TEST(Beck, FivePointsOnParabola) {
  const FieldSpec fs(7);
  std::vector<AffinePoint> pts;
  for (int x = 0; x < 5; ++x) pts.push_back(AffinePoint::from_ints(fs, {x, x * x}));
  const auto r = beck_conic_count(PointSet(pts));
  EXPECT_EQ(r.conic_count, 1u);
  ASSERT_EQ(r.conics.size(), 1u);
  EXPECT_EQ(r.conics[0], Conic::from_ints(fs, 1, 0, 0, 0, -1, 0));
  EXPECT_EQ(r.gp_five_tuples, 120u);
}

TEST(Beck, CollinearSetHasNoConics) {
  const FieldSpec fs(7);
  std::vector<AffinePoint> pts;
  for (int x = 0; x < 7; ++x) pts.push_back(AffinePoint::from_ints(fs, {x, 2 * x + 1}));
  const auto r = beck_conic_count(PointSet(pts));
  EXPECT_EQ(r.conic_count, 0u);
  EXPECT_EQ(r.gp_five_tuples, 0u);
  EXPECT_EQ(r.max_collinear, 7u);
  EXPECT_TRUE(beck_conic_count(PointSet(std::vector<AffinePoint>{pts[0], pts[1]})).notes.size() == 1);
}

TEST(Beck, MatchesPairPinnedOracle) {
  for (std::uint64_t p : {7, 13, 101}) {
    const FieldSpec fs(p);
    for (int t = 0; t < 8; ++t) {
      const auto pts = random_point_set(fs, 6 + below(9));
      const auto r = beck_conic_count(pts);
      const auto want = fpinc::testing::pair_pinned_conics(pts);
      EXPECT_EQ(std::set<Conic>(r.conics.begin(), r.conics.end()), want);
      EXPECT_EQ(r.conic_count, want.size());
    }
  }
}

TEST(Beck, CartesianGridAgainstOracle) {
  const FieldSpec fs(101);
  std::vector<AffinePoint> grid;
  for (int x = 1; x <= 4; ++x)
    for (int y = 1; y <= 4; ++y) grid.push_back(AffinePoint::from_ints(fs, {x, y * y}));
  const PointSet pts(grid);
  const auto r = beck_conic_count(pts);
  EXPECT_EQ(r.conic_count, fpinc::testing::pair_pinned_conics(pts).size());
  EXPECT_GT(r.conic_count, 0u);
}

TEST(Beck, GeneralPositionInequality) {
  const FieldSpec fs(31);
  for (int t = 0; t < 20; ++t) {
    const auto pts = random_point_set(fs, 8 + below(8));
    const auto r = beck_conic_count(pts);
    EXPECT_EQ(r.gp_five_tuples, fpinc::testing::gp_five_tuples(pts));
    if (r.gp_product > 0) { EXPECT_GE(Decimal(r.gp_five_tuples), r.gp_product); }
  }
}
