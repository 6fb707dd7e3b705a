#include <gtest/gtest.h>

#include "support.hpp"

using namespace fpinc;
using M = Magnitude;

namespace {

BoundParams pc(double p_size, double c_size) {
  BoundParams bp;
  bp.set(M::SizeP, p_size).set(M::SizeC, c_size);
  return bp;
}

bool close(const Decimal& a, const Decimal& b, double rel = 1e-25) {
  const Decimal diff = a > b ? a - b : b - a;
  return diff <= Decimal(rel) * (a > b ? a : b);
}

}  // namespace

TEST(Rational, KeepsWrittenFormComparesByValue) {
  const Rational r(12, 27);
  EXPECT_EQ(r.to_string(), "12/27");
  EXPECT_EQ(r, Rational(4, 9));
  EXPECT_EQ(r.reduced().to_string(), "4/9");
  EXPECT_LT(Rational(1, 3), r);
  EXPECT_EQ((Rational(1, 2) + Rational(1, 3)).to_string(), "5/6");
  EXPECT_THROW(Rational(1, 0), domain_error);
}

TEST(Catalog, NamesUniqueAndParsable) {
  const auto names = bound_names();
  EXPECT_EQ(names.size(), 33u);
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  for (const auto& n : names) EXPECT_EQ(bound_info(parse_bound_id(n)).name, n);
  try {
    (void)parse_bound_id("nosuch");
    FAIL() << "expected usage_error";
  } catch (const usage_error& e) {
    EXPECT_NE(std::string(e.what()).find("thm1.1"), std::string::npos);
  }
}

TEST(Catalog, ExponentsStoredExactly) {
  const auto f = formula_of(BoundId::ConicSmall, BoundParams{});
  ASSERT_EQ(f.branches.size(), 1u);
  const auto& terms = f.branches[0].terms;
  ASSERT_EQ(terms.size(), 3u);
  EXPECT_EQ(terms[0].factors[0].e0.to_string(), "23/27");
  EXPECT_EQ(terms[1].factors[0].e0.to_string(), "13/9");
  EXPECT_EQ(terms[1].factors[1].e0.to_string(), "12/27");
  EXPECT_EQ(terms[2].factors[0].e0, Rational(1));
  EXPECT_THROW((void)formula_of(BoundId::GP5TupleLower, BoundParams{}), usage_error);
}

TEST(Evaluate, ConicSmallAtOne) {
  const auto v = evaluate(BoundId::ConicSmall, pc(1, 1));
  ASSERT_EQ(v.terms.size(), 3u);
  for (const auto& [label, value] : v.terms) EXPECT_EQ(value, Decimal(1)) << label;
  EXPECT_EQ(v.total, Decimal(3));
  EXPECT_EQ(v.direction, Direction::Upper);
}

TEST(Evaluate, CircParFirstTermIsExactPower) {
  const double n = std::ldexp(1.0, 19);
  const auto v = evaluate(BoundId::CircParSmall, pc(n, n));
  EXPECT_TRUE(close(v.terms[0].second, Decimal(std::ldexp(1.0, 30))));
}

TEST(Evaluate, TermsSumToTotal) {
  for (const auto& info : bound_catalog()) {
    BoundParams bp;
    for (auto m : info.reads) bp.set(m, m == M::D ? 3.0 : m == M::K ? 6.0 : m == M::Q || m == M::P ? 101.0 : 37.0);
    const auto v = evaluate(info.id, bp);
    Decimal sum = 0;
    for (const auto& [_, x] : v.terms) sum += x;
    EXPECT_TRUE(close(sum, v.total)) << info.name;
    EXPECT_EQ(v.branch_totals.size(), info.special ? 1u : formula_of(info.id, bp).branches.size());
    EXPECT_EQ(v.total, v.branch_totals[v.branch]) << info.name;
    for (const auto& b : v.branch_totals) EXPECT_LE(v.total, b) << info.name;
  }
}

TEST(Evaluate, TrivialBoundTakesSmallerBranch) {
  const auto v = evaluate(BoundId::TrivialConicKST, pc(100, 100));
  EXPECT_EQ(v.branch, 1u);
  EXPECT_TRUE(close(v.total, Decimal(1100)));
  EXPECT_EQ(v.dominant, "|P|^(1/2)|C|");
}

TEST(Evaluate, MissingAndInvalidMagnitudes) {
  BoundParams only_p;
  only_p.set(M::SizeP, 10.0);
  EXPECT_THROW((void)evaluate(BoundId::ConicSmall, only_p), usage_error);
  BoundParams zero_q = pc(10, 10);
  zero_q.set(M::Q, 0.0);
  EXPECT_THROW((void)evaluate(BoundId::VinhPointLine, zero_q), domain_error);
  EXPECT_THROW(BoundParams().set(M::SizeP, -1.0), usage_error);
  BoundParams no_d = pc(10, 10);
  no_d.set(M::Q, 101.0);
  EXPECT_THROW((void)evaluate(BoundId::SphereLargeQ, no_d), usage_error);
}

TEST(Evaluate, UpperBoundsMonotoneInSizes) {
  for (auto id : {BoundId::ConicSmall, BoundId::CircParSmall, BoundId::TrivialConicKST, BoundId::TrivialCircParKST,
                  BoundId::PachSharirReal}) {
    for (double base : {1.0, 7.0, 100.0, 5000.0}) {
      const auto v = evaluate(id, pc(base, base)).total;
      EXPECT_LE(v, evaluate(id, pc(base * 2, base)).total);
      EXPECT_LE(v, evaluate(id, pc(base, base * 2)).total);
    }
  }
}

TEST(Evaluate, KohSunCases) {
  BoundParams bp;
  bp.set(M::Q, 101.0).set(M::D, 3.0).set(M::SizeC, 1000.0);
  bp.set(M::SizeP, 50.0);
  EXPECT_EQ(evaluate(BoundId::KohSunOdd, bp).case_note, "1 <= |E| < q^((d-1)/2)");
  bp.set(M::SizeP, 500.0);
  EXPECT_EQ(evaluate(BoundId::KohSunOdd, bp).case_note, "q^((d-1)/2) <= |E| < q^((d+1)/2)");
  bp.set(M::SizeP, 20000.0).set(M::SizeC, 1e6);
  const auto v = evaluate(BoundId::KohSunOdd, bp);
  EXPECT_EQ(v.case_note, "q^((d+1)/2) <= |E| <= q^d");
  EXPECT_TRUE(close(v.total, Decimal(50.5)));
  EXPECT_FALSE(asymptotic_exponent(BoundId::KohSunOdd, {{M::SizeP, Rational(1)}}, 3).has_value());

  bp.set(M::D, 2.0).set(M::SizeP, 5.0);
  EXPECT_TRUE(close(evaluate(BoundId::KohSunEven, bp).total, Decimal(101) / 144));
  EXPECT_FALSE(applicability(BoundId::KohSunOdd, bp).applicable);
}

TEST(Evaluate, Gp5ClampsNegativeFactors) {
  BoundParams bp;
  bp.set(M::SizeP, 10.0).set(M::MaxCollinear, 5.0);
  const auto v = evaluate(BoundId::GP5TupleLower, bp);
  EXPECT_EQ(v.total, Decimal(0));
  EXPECT_FALSE(v.case_note.empty());
  bp.set(M::SizeP, 100.0).set(M::MaxCollinear, 2.0);
  EXPECT_EQ(evaluate(BoundId::GP5TupleLower, bp).total, Decimal(100) * 99 * 98 * 94 * 88);
}

TEST(Applicability, Examples) {
  BoundParams full = pc(101.0 * 101.0, 1000);
  full.set(M::P, 101.0);
  const auto a = applicability(BoundId::ConicSmall, full);
  EXPECT_FALSE(a.applicable);
  ASSERT_EQ(a.violated.size(), 1u);
  EXPECT_EQ(a.notes.size(), 2u);

  BoundParams rich;
  rich.set(M::SizeP, 100.0).set(M::K, 2.0).set(M::Q, 101.0);
  EXPECT_FALSE(applicability(BoundId::RichMobiusLarge, rich).applicable);
  rich.set(M::K, 3.0);
  EXPECT_TRUE(applicability(BoundId::RichMobiusLarge, rich).applicable);

  BoundParams cart;
  cart.set(M::SizeA, 4.0).set(M::SizeB, 4.0).set(M::SizeC, 16.0).set(M::P, 101.0);
  EXPECT_TRUE(applicability(BoundId::ConicCartesian, cart).applicable);
  cart.set(M::SizeA, 5.0);
  EXPECT_FALSE(applicability(BoundId::ConicCartesian, cart).applicable);
}

TEST(Applicability, CircleCongruenceOnlyWhenFlagged) {
  BoundParams bp = pc(10, 10);
  bp.set(M::P, 13.0);
  EXPECT_TRUE(applicability(BoundId::CircParSmall, bp).applicable);
  bp.circles = true;
  EXPECT_FALSE(applicability(BoundId::CircParSmall, bp).applicable);
  bp.set(M::P, 11.0);
  EXPECT_TRUE(applicability(BoundId::CircParSmall, bp).applicable);
}

TEST(Improvement, ConicSmallBeatsTrivialAboveCrossover) {
  const PowerRegime steep{{M::SizeP, Rational(1)}, {M::SizeC, Rational(5, 2)}};
  const auto r = improvement_range(BoundId::ConicSmall, BoundId::TrivialConicKST, pc(1e4, 1e10), steep);
  ASSERT_TRUE(r.asymptotic_smaller.has_value());
  EXPECT_EQ(*r.asymptotic_smaller, "a");
  EXPECT_EQ(*r.exponent_a, Rational(23, 27) * Rational(7, 2));
  EXPECT_EQ(*r.exponent_b, Rational(3));

  const PowerRegime flat{{M::SizeP, Rational(1)}, {M::SizeC, Rational(1)}};
  const auto s = improvement_range(BoundId::ConicSmall, BoundId::TrivialConicKST, pc(1e4, 1e4), flat);
  EXPECT_EQ(*s.asymptotic_smaller, "b");
  EXPECT_EQ(s.smaller, "b");
  EXPECT_GT(s.factor, 1);

  const auto self = improvement_range(BoundId::ConicSmall, BoundId::ConicSmall, pc(50, 50), flat);
  EXPECT_EQ(self.smaller, "equal");
  EXPECT_EQ(self.factor, 1);
  EXPECT_EQ(*self.asymptotic_smaller, "equal");
}

TEST(Improvement, CrossoverExponents) {
  // Against the trivial bound, the conic bound wins exactly for |C| > |P|^(19/8).
  const auto at = [](Rational g) {
    const PowerRegime r{{M::SizeP, Rational(1)}, {M::SizeC, g}};
    return std::make_pair(*asymptotic_exponent(BoundId::ConicSmall, r), *asymptotic_exponent(BoundId::TrivialConicKST, r));
  };
  auto [a1, b1] = at(Rational(19, 8));
  EXPECT_EQ(a1, b1);
  auto [a2, b2] = at(Rational(20, 8));
  EXPECT_LT(a2, b2);
  auto [a3, b3] = at(Rational(18, 8));
  EXPECT_GT(a3, b3);
}
