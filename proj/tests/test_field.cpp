#include <gtest/gtest.h>

#include "support.hpp"

using namespace fpinc;
using fpinc::testing::below;
using fpinc::testing::random_elem;

TEST(FieldSpec, RejectsNonPrimesAndTwo) {
  EXPECT_THROW(FieldSpec(2), usage_error);
  EXPECT_THROW(FieldSpec(9), usage_error);
  EXPECT_THROW(FieldSpec(1), usage_error);
  EXPECT_THROW(FieldSpec(0), usage_error);
  EXPECT_THROW(FieldSpec(std::uint64_t{1} << 32), usage_error);
  EXPECT_NO_THROW(FieldSpec(4294967291ULL));
}

TEST(FieldSpec, ResidueClass) {
  EXPECT_EQ(FieldSpec(7).residue_class_mod4(), 3);
  EXPECT_EQ(FieldSpec(13).residue_class_mod4(), 1);
  EXPECT_TRUE(FieldSpec(13).minus_one_is_square());
  EXPECT_FALSE(FieldSpec(11).minus_one_is_square());
}

TEST(FieldElem, CanonicalRepresentative) {
  const FieldSpec fs(7);
  EXPECT_EQ(fs.elem(-1).value(), 6u);
  EXPECT_EQ(fs.elem(15).value(), 1u);
  EXPECT_EQ(fs.elem(-15).value(), 6u);
}

TEST(FieldElem, MixingFieldsThrows) {
  const auto a = FieldSpec(5).elem(1);
  const auto b = FieldSpec(7).elem(1);
  EXPECT_THROW((void)(a + b), usage_error);
  EXPECT_THROW((void)(a * b), usage_error);
}

TEST(Invert, Examples) {
  EXPECT_EQ(invert(FieldSpec(5).elem(2)).value(), 3u);
  for (std::uint64_t p : {3, 5, 101, 10007}) EXPECT_EQ(invert(FieldSpec(p).elem(1)).value(), 1u);
  EXPECT_THROW((void)invert(FieldSpec(5).zero()), domain_error);
}

TEST(Invert, MatchesExtendedEuclid) {
  const FieldSpec fs(10007);
  for (int i = 0; i < 2000; ++i) {
    const auto x = fpinc::testing::random_nonzero(fs);
    const auto y = invert(x);
    EXPECT_EQ(y.value(), fpinc::testing::egcd_inverse(x.value(), fs.p()));
    EXPECT_EQ((x * y).value(), 1u);
  }
}

TEST(Legendre, Examples) {
  EXPECT_EQ(legendre_symbol(FieldSpec(7).elem(-1)), -1);
  EXPECT_EQ(legendre_symbol(FieldSpec(13).elem(-1)), 1);
  EXPECT_EQ(legendre_symbol(FieldSpec(13).zero()), 0);
}

TEST(Legendre, MatchesSquareTable) {
  for (std::uint64_t p : {3, 5, 7, 11, 13, 17, 19, 23, 101}) {
    const FieldSpec fs(p);
    std::set<std::uint64_t> squares;
    for (std::uint64_t x = 1; x < p; ++x) squares.insert(x * x % p);
    for (std::uint64_t x = 1; x < p; ++x) {
      const int expected = squares.count(x) ? 1 : -1;
      EXPECT_EQ(legendre_symbol(fs.elem(static_cast<std::int64_t>(x))), expected) << "p=" << p << " x=" << x;
    }
  }
}

TEST(Legendre, EulerCriterion) {
  for (std::uint64_t p : {3, 5, 7, 11, 13, 17, 19, 23}) {
    const FieldSpec fs(p);
    for (const auto& x : fs.elements()) {
      if (x.is_zero()) continue;
      const auto e = x.pow((p - 1) / 2).value();
      EXPECT_EQ(legendre_symbol(x), e == 1 ? 1 : -1);
    }
  }
}

TEST(Sqrt, RootsSquareBack) {
  for (std::uint64_t p : {3ULL, 5ULL, 13ULL, 17ULL, 41ULL, 97ULL, 10007ULL, 2147483647ULL}) {
    const FieldSpec fs(p);
    for (int i = 0; i < 300; ++i) {
      const auto x = random_elem(fs);
      const auto r = sqrt(x);
      EXPECT_EQ(r.has_value(), is_square(x));
      if (r) {
        EXPECT_EQ(*r * *r, x);
        EXPECT_LE(r->value(), p - r->value());
      }
    }
  }
}

TEST(FieldAxioms, ExhaustiveSmallPrimes) {
  for (std::uint64_t p : {3, 5, 7}) {
    const FieldSpec fs(p);
    const auto els = fs.elements();
    for (const auto& a : els)
      for (const auto& b : els)
        for (const auto& c : els) {
          ASSERT_EQ((a + b) + c, a + (b + c));
          ASSERT_EQ((a * b) * c, a * (b * c));
          ASSERT_EQ(a * (b + c), a * b + a * c);
        }
    for (const auto& a : els) {
      EXPECT_EQ(a + (-a), fs.zero());
      if (!a.is_zero()) { EXPECT_EQ(a * invert(a), fs.one()); }
      if (!a.is_zero()) { EXPECT_EQ(a / a, fs.one()); }
    }
  }
}

TEST(SolveLinear, IdentityIsUnique) {
  const FieldSpec fs(11);
  const auto id = MatrixModP::identity(fs, 4);
  const std::vector<FieldElem> rhs{fs.elem(1), fs.elem(5), fs.elem(0), fs.elem(10)};
  const auto s = solve_linear(id, rhs);
  EXPECT_EQ(s.kind, LinearSolution::Kind::Unique);
  EXPECT_EQ(s.particular, rhs);
}

TEST(SolveLinear, ZeroMatrixNonzeroRhsIsInconsistent) {
  const FieldSpec fs(11);
  const MatrixModP z(fs, 3, 3);
  EXPECT_EQ(solve_linear(z, {fs.elem(1), fs.zero(), fs.zero()}).kind, LinearSolution::Kind::Inconsistent);
}

TEST(SolveLinear, DimensionMismatch) {
  const FieldSpec fs(11);
  EXPECT_THROW((void)solve_linear(MatrixModP::identity(fs, 3), {fs.one()}), usage_error);
}

TEST(SolveLinear, RandomRankFiveNullspace) {
  const FieldSpec fs(101);
  int tested = 0;
  while (tested < 200) {
    std::vector<FieldElem> e;
    for (int i = 0; i < 30; ++i) e.push_back(random_elem(fs));
    const MatrixModP m(fs, 5, 6, e);
    if (m.rank() != 5) continue;
    ++tested;
    const auto s = solve_linear(m, std::vector<FieldElem>(5, fs.zero()));
    ASSERT_EQ(s.kind, LinearSolution::Kind::Affine);
    ASSERT_EQ(s.nullspace.size(), 1u);
    const auto img = m.apply(s.nullspace[0]);
    for (const auto& v : img) EXPECT_TRUE(v.is_zero());
    bool nonzero = false;
    for (const auto& v : s.nullspace[0]) nonzero = nonzero || !v.is_zero();
    EXPECT_TRUE(nonzero);
  }
}

TEST(SolveLinear, SolutionsResubstitute) {
  const FieldSpec fs(13);
  for (int t = 0; t < 500; ++t) {
    const std::size_t rows = 1 + below(5), cols = 1 + below(5);
    std::vector<FieldElem> e;
    for (std::size_t i = 0; i < rows * cols; ++i) e.push_back(below(3) == 0 ? fs.zero() : random_elem(fs));
    const MatrixModP m(fs, rows, cols, e);
    std::vector<FieldElem> rhs;
    for (std::size_t i = 0; i < rows; ++i) rhs.push_back(random_elem(fs));
    const auto s = solve_linear(m, rhs);
    if (s.kind == LinearSolution::Kind::Inconsistent) {
      EXPECT_LT(m.rank(), rows);
      continue;
    }
    EXPECT_EQ(m.apply(s.particular), rhs);
    for (const auto& b : s.nullspace)
      for (const auto& v : m.apply(b)) EXPECT_TRUE(v.is_zero());
    EXPECT_EQ(s.nullspace.size(), cols - m.rank());
  }
}

TEST(Matrix, InverseAndDeterminant) {
  const FieldSpec fs(7);
  for (int t = 0; t < 300; ++t) {
    std::vector<FieldElem> e;
    for (int i = 0; i < 9; ++i) e.push_back(random_elem(fs));
    const MatrixModP m(fs, 3, 3, e);
    const auto inv = m.inverse();
    EXPECT_EQ(inv.has_value(), !m.determinant().is_zero());
    if (inv) { EXPECT_EQ((m * *inv).entries(), MatrixModP::identity(fs, 3).entries()); }
    // Cofactor expansion as an independent determinant.
    auto a = [&](int r, int c) { return m.at(r, c); };
    const auto det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                     a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    EXPECT_EQ(det, m.determinant());
  }
}
