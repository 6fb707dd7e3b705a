#pragma once

/**
 * @file bounds.hpp
 * @brief Constant-free evaluator for the incidence, rich-curve and
 * distance-set bound formulas, with hypothesis checks.
 *
 * Every formula is a minimum over branches, each branch a sum of terms, each
 * term a rational coefficient times a product of magnitudes raised to exact
 * rational exponents. An exponent may depend affinely on the dimension d
 * (e.g. q^{(d-1)/3}). Implicit constants of asymptotic bounds are taken as 1;
 * explicit constants that are part of a formula (1/2, 1/8, 1/144, ...) are
 * kept. Hypotheses written with << are checked as <= with constant 1 and
 * "~" as "within a factor 2".
 *
 * Numeric evaluation uses 50-digit decimal floating point; values are
 * reported with 30 significant digits.
 */

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fpinc/errors.hpp"

namespace fpinc {

using Decimal = boost::multiprecision::cpp_dec_float_50;

/// 30 significant digits, general notation.
inline std::string to_decimal_string(const Decimal& v) { return v.str(30); }

/// Exact rational; keeps the numerator/denominator as written (12/27 stays 12/27)
/// but compares and combines by value.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }
  [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }
  [[nodiscard]] Rational reduced() const {
    const std::int64_t g = std::gcd(num_, den_);
    return g == 0 ? Rational(0, 1) : Rational(num_ / g, den_ / g);
  }
  [[nodiscard]] bool is_zero() const noexcept { return num_ == 0; }
  [[nodiscard]] Decimal to_decimal() const { return Decimal(num_) / Decimal(den_); }
  [[nodiscard]] std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_).reduced();
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_).reduced();
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_).reduced();
  }
  Rational operator-() const { return Rational(-num_, den_); }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ * b.den_ == b.num_ * a.den_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

/// The named quantities a formula may read.
enum class Magnitude { SizeP, SizeC, SizeA, SizeB, SizeSum, K, P, Q, D, MaxCollinear };

inline const char* to_string(Magnitude m) {
  switch (m) {
    case Magnitude::SizeP: return "sizeP";
    case Magnitude::SizeC: return "sizeC";
    case Magnitude::SizeA: return "sizeA";
    case Magnitude::SizeB: return "sizeB";
    case Magnitude::SizeSum: return "sizeSum";
    case Magnitude::K: return "k";
    case Magnitude::P: return "p";
    case Magnitude::Q: return "q";
    case Magnitude::D: return "d";
    case Magnitude::MaxCollinear: return "maxCollinear";
  }
  return "?";
}

/// Symbol used in term labels.
inline const char* symbol(Magnitude m) {
  switch (m) {
    case Magnitude::SizeP: return "|P|";
    case Magnitude::SizeC: return "|C|";
    case Magnitude::SizeA: return "|A|";
    case Magnitude::SizeB: return "|B|";
    case Magnitude::SizeSum: return "|E+F|";
    case Magnitude::K: return "k";
    case Magnitude::P: return "p";
    case Magnitude::Q: return "q";
    case Magnitude::D: return "d";
    case Magnitude::MaxCollinear: return "L";
  }
  return "?";
}

inline std::optional<Magnitude> parse_magnitude(const std::string& s) {
  for (auto m : {Magnitude::SizeP, Magnitude::SizeC, Magnitude::SizeA, Magnitude::SizeB, Magnitude::SizeSum,
                 Magnitude::K, Magnitude::P, Magnitude::Q, Magnitude::D, Magnitude::MaxCollinear}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

/// Nonnegative magnitudes by name. Only those a formula reads need be present.
class BoundParams {
 public:
  BoundParams() = default;

  BoundParams& set(Magnitude m, const Decimal& v) {
    if (v < 0) throw usage_error(std::string("magnitude ") + to_string(m) + " must be nonnegative");
    values_[m] = v;
    return *this;
  }
  BoundParams& set(Magnitude m, double v) { return set(m, Decimal(v)); }
  BoundParams& set(Magnitude m, std::uint64_t v) { return set(m, Decimal(v)); }
  BoundParams& set(Magnitude m, int v) { return set(m, Decimal(v)); }

  [[nodiscard]] bool has(Magnitude m) const { return values_.count(m) != 0; }
  [[nodiscard]] const Decimal& get(Magnitude m) const {
    auto it = values_.find(m);
    if (it == values_.end()) throw usage_error(std::string("missing magnitude ") + to_string(m));
    return it->second;
  }
  [[nodiscard]] const std::map<Magnitude, Decimal>& values() const noexcept { return values_; }

  /// When set, the circle-specific congruence p = 3 (mod 4) is part of the hypotheses.
  bool circles = false;

 private:
  std::map<Magnitude, Decimal> values_;
};

enum class BoundId {
  TrivialConicKST,
  TrivialCircParKST,
  VinhPointLine,
  SdZCartesian,
  RichLinesCartesian,
  RichMobiusCartesian,
  MobiusRich,
  RichConicPinnedPair,
  RichConic,
  ConicSmall,
  ConicCartesian,
  RichConicCartesian,
  CircParSmall,
  CircParCartesian,
  PachSharirReal,
  ConicLargeQ,
  SphereLargeQ,
  CILRRSphere,
  KLPSphere,
  RichPointsSdZ,
  RichCircles,
  RichLinesLarge,
  RichMobiusLarge,
  VinhHyperplane,
  KohSunOdd,
  KohSunEven,
  PinnedLower815,
  PlanarDistanceLower,
  PlanarDistanceQuartic,
  ImageLower,
  DistSetLower,
  BeckLower207,
  GP5TupleLower,
};

enum class Direction { Upper, Lower };

/// m^(e0 + ed * d).
struct Factor {
  Magnitude m;
  Rational e0;
  Rational ed{0};

  [[nodiscard]] Rational exponent(std::int64_t d) const { return e0 + ed * Rational(d); }
};

struct Term {
  Rational coeff{1};
  std::vector<Factor> factors;
};

struct Branch {
  std::vector<Term> terms;
};

/// min over branches of (sum over terms).
struct Formula {
  std::vector<Branch> branches;
  /// Piecewise bounds record which case applied.
  std::string case_note;
};

struct Hypothesis {
  std::string text;
  std::vector<Magnitude> reads;
  std::function<bool(const BoundParams&)> holds;
};

struct BoundInfo {
  BoundId id;
  std::string name;
  std::string title;
  Direction direction;
  std::vector<Magnitude> reads;
  std::function<Formula(const BoundParams&)> formula;
  std::vector<Hypothesis> hypotheses;
  /// Not a power-product formula; evaluated by a dedicated routine.
  bool special = false;
};

struct BoundValue {
  BoundId id;
  std::string name;
  Direction direction = Direction::Upper;
  /// Terms of the branch attaining the minimum.
  std::vector<std::pair<std::string, Decimal>> terms;
  Decimal total;
  std::string dominant;
  std::size_t branch = 0;
  std::vector<Decimal> branch_totals;
  std::string case_note;
};

struct Applicability {
  bool applicable = true;
  std::vector<std::string> violated;
  /// Conventions used for << and ~.
  std::vector<std::string> notes;
};

namespace detail {

inline Decimal power(const Decimal& base, const Rational& e) {
  if (e.is_zero()) return Decimal(1);
  if (base == 0) {
    if (e < Rational(0)) throw domain_error("division by a zero magnitude");
    return Decimal(0);
  }
  if (e.den() == 1 && e.num() >= 0 && e.num() <= 64) {
    Decimal r = 1;
    for (std::int64_t i = 0; i < e.num(); ++i) r *= base;
    return r;
  }
  return exp(e.to_decimal() * log(base));
}

inline std::int64_t dimension(const BoundParams& bp) {
  const Decimal d = bp.get(Magnitude::D);
  return static_cast<std::int64_t>(d.convert_to<long long>());
}

inline bool reads_dimension(const Formula& f) {
  for (const auto& b : f.branches)
    for (const auto& t : b.terms)
      for (const auto& fa : t.factors)
        if (!fa.ed.is_zero()) return true;
  return false;
}

inline std::string term_label(const Term& t, std::optional<std::int64_t> d) {
  std::string s;
  if (t.coeff != Rational(1)) s += "(" + t.coeff.to_string() + ")";
  for (const auto& f : t.factors) {
    s += symbol(f.m);
    std::string e;
    if (f.ed.is_zero()) {
      e = f.e0.to_string();
    } else if (d) {
      e = f.exponent(*d).to_string();
    } else {
      e = f.e0.to_string() + "+" + f.ed.to_string() + "d";
    }
    if (e != "1") s += "^(" + e + ")";
  }
  return s.empty() ? "1" : s;
}

inline Factor F(Magnitude m, Rational e0, Rational ed = Rational(0)) { return Factor{m, e0, ed}; }
inline Term T(std::vector<Factor> fs, Rational coeff = Rational(1)) { return Term{coeff, std::move(fs)}; }
inline std::function<Formula(const BoundParams&)> fixed(std::vector<Branch> branches) {
  return [branches = std::move(branches)](const BoundParams&) { return Formula{branches, ""}; };
}
inline std::function<Formula(const BoundParams&)> sum_of(std::vector<Term> terms) {
  return fixed({Branch{std::move(terms)}});
}
/// min{t1, t2, ...} of single-term branches.
inline std::function<Formula(const BoundParams&)> min_of(std::vector<Term> terms) {
  std::vector<Branch> b;
  for (auto& t : terms) b.push_back(Branch{{std::move(t)}});
  return fixed(std::move(b));
}

inline Decimal val(const BoundParams& bp, Magnitude m) { return bp.get(m); }
inline Decimal pw(const Decimal& x, Rational e) { return power(x, e); }

inline bool is_int_mod4_3(const Decimal& v) {
  const auto n = v.convert_to<long long>();
  return Decimal(n) == v && n % 4 == 3;
}

inline Hypothesis small_set(Magnitude size, const char* text) {
  return {text, {size, Magnitude::P},
          [size](const BoundParams& bp) { return val(bp, size) <= pw(val(bp, Magnitude::P), Rational(15, 13)); }};
}
inline Hypothesis a_le_b() {
  return {"|A| <= |B|", {Magnitude::SizeA, Magnitude::SizeB},
          [](const BoundParams& bp) { return val(bp, Magnitude::SizeA) <= val(bp, Magnitude::SizeB); }};
}
inline Hypothesis ac_le_p2(const char* text) {
  return {text, {Magnitude::SizeA, Magnitude::SizeC, Magnitude::P}, [](const BoundParams& bp) {
            const Decimal p = val(bp, Magnitude::P);
            return val(bp, Magnitude::SizeA) * val(bp, Magnitude::SizeC) <= p * p;
          }};
}
inline Hypothesis k_at_least(int k0) {
  return {"k >= " + std::to_string(k0), {Magnitude::K},
          [k0](const BoundParams& bp) { return val(bp, Magnitude::K) >= k0; }};
}
inline Hypothesis p_3mod4(Magnitude m, const char* text) {
  return {text, {m}, [m](const BoundParams& bp) { return is_int_mod4_3(val(bp, m)); }};
}
inline Hypothesis circles_p_3mod4() {
  return {"p = 3 (mod 4) for circles", {Magnitude::P},
          [](const BoundParams& bp) { return !bp.circles || is_int_mod4_3(val(bp, Magnitude::P)); }};
}

inline std::vector<BoundInfo> build_catalog() {
  using M = Magnitude;
  using R = Rational;
  const auto P = M::SizeP, C = M::SizeC, A = M::SizeA, B = M::SizeB, S = M::SizeSum, K = M::K, Q = M::Q;
  std::vector<BoundInfo> cat;

  cat.push_back({BoundId::TrivialConicKST, "eq4", "conic Kovari-Sos-Turan bound", Direction::Upper, {P, C},
                 fixed({Branch{{T({F(P, R(1)), F(C, R(4, 5))}), T({F(C, R(1))})}},
                        Branch{{T({F(P, R(1, 2)), F(C, R(1))}), T({F(P, R(1))})}}}),
                 {}});
  cat.push_back({BoundId::TrivialCircParKST, "eq5", "circle/parabola Kovari-Sos-Turan bound", Direction::Upper, {P, C},
                 fixed({Branch{{T({F(P, R(1)), F(C, R(2, 3))}), T({F(C, R(1))})}},
                        Branch{{T({F(P, R(1, 2)), F(C, R(1))}), T({F(P, R(1))})}}}),
                 {}});
  cat.push_back({BoundId::VinhPointLine, "thm5.1", "point-line incidences, large sets", Direction::Upper, {P, C, Q},
                 sum_of({T({F(P, R(1)), F(C, R(1)), F(Q, R(-1))}), T({F(Q, R(1, 2)), F(P, R(1, 2)), F(C, R(1, 2))})}),
                 {}});
  cat.push_back({BoundId::SdZCartesian, "thm3.1", "point-line incidences, Cartesian points", Direction::Upper,
                 {A, B, C},
                 sum_of({T({F(A, R(3, 4)), F(B, R(1, 2)), F(C, R(3, 4))}), T({F(C, R(1))}), T({F(A, R(1)), F(B, R(1))})}),
                 {a_le_b(), ac_le_p2("|A||L| << p^2")}});
  cat.push_back({BoundId::RichLinesCartesian, "cor3.3", "k-rich lines, Cartesian points", Direction::Upper, {A, B, K},
                 sum_of({T({F(A, R(3)), F(B, R(2)), F(K, R(-4))}), T({F(A, R(1)), F(B, R(1)), F(K, R(-1))})}),
                 {k_at_least(2), a_le_b(), ac_le_p2("|A||L| << p^2")}});
  cat.push_back({BoundId::RichMobiusCartesian, "cor3.4", "k-rich Moebius maps, Cartesian points", Direction::Upper,
                 {A, B, K},
                 sum_of({T({F(A, R(4)), F(B, R(3)), F(K, R(-5))}), T({F(A, R(2)), F(B, R(2)), F(K, R(-2))})}),
                 {k_at_least(3), a_le_b(), ac_le_p2("|A||T| << p^2")}});
  cat.push_back({BoundId::MobiusRich, "thm2.1", "k-rich Moebius maps", Direction::Upper, {P, K},
                 sum_of({T({F(P, R(15, 4)), F(K, R(-19, 4))}), T({F(P, R(2)), F(K, R(-2))})}),
                 {k_at_least(3), small_set(P, "|P| << p^(15/13)")}});
  cat.push_back({BoundId::RichConicPinnedPair, "eq2.2", "k-rich conics through a fixed pair", Direction::Upper, {P, K},
                 sum_of({T({F(P, R(15, 4)), F(K, R(-19, 4))}), T({F(P, R(2)), F(K, R(-2))})}),
                 {k_at_least(5), small_set(P, "|P| << p^(15/13)")}});
  cat.push_back({BoundId::RichConic, "eq2.3", "k-rich conics", Direction::Upper, {P, K},
                 sum_of({T({F(P, R(23, 4)), F(K, R(-27, 4))}), T({F(P, R(4)), F(K, R(-4))})}),
                 {k_at_least(5), small_set(P, "|P| << p^(15/13)")}});
  cat.push_back({BoundId::ConicSmall, "thm1.1", "point-conic incidences", Direction::Upper, {P, C},
                 sum_of({T({F(P, R(23, 27)), F(C, R(23, 27))}), T({F(P, R(13, 9)), F(C, R(12, 27))}), T({F(C, R(1))})}),
                 {small_set(P, "|P| << p^(15/13)")}});
  cat.push_back({BoundId::ConicCartesian, "thm1.2", "point-conic incidences, Cartesian points", Direction::Upper,
                 {A, B, C},
                 sum_of({T({F(A, R(3, 4)), F(B, R(5, 8)), F(C, R(7, 8))}), T({F(A, R(1, 2)), F(B, R(3, 4)), F(C, R(1, 4))}),
                         T({F(C, R(1))})}),
                 {a_le_b(), ac_le_p2("|A||C| << p^2")}});
  cat.push_back({BoundId::RichConicCartesian, "thm1.2-rich", "k-rich conics, Cartesian points", Direction::Upper,
                 {A, B, K},
                 sum_of({T({F(A, R(6)), F(B, R(5)), F(K, R(-7))}), T({F(A, R(4)), F(B, R(4)), F(K, R(-4))})}),
                 {k_at_least(5), a_le_b(), ac_le_p2("|A||C| << p^2")}});
  cat.push_back({BoundId::CircParSmall, "thm1.3", "point-circle/parabola/hyperbola incidences", Direction::Upper, {P, C},
                 sum_of({T({F(P, R(15, 19)), F(C, R(15, 19))}), T({F(P, R(23, 19)), F(C, R(4, 19))}), T({F(C, R(1))})}),
                 {small_set(P, "|P| << p^(15/13)"), circles_p_3mod4()}});
  cat.push_back({BoundId::CircParCartesian, "thm1.4", "point-circle/parabola/hyperbola incidences, Cartesian points",
                 Direction::Upper, {A, B, C},
                 sum_of({T({F(A, R(4, 5)), F(B, R(3, 5)), F(C, R(4, 5))}), T({F(A, R(6, 5)), F(B, R(7, 5)), F(C, R(1, 5))}),
                         T({F(C, R(1))})}),
                 {ac_le_p2("|A||C| << p^2"), circles_p_3mod4()}});
  cat.push_back({BoundId::PachSharirReal, "thm1.5", "real point-conic incidences (comparison)", Direction::Upper, {P, C},
                 sum_of({T({F(P, R(5, 9)), F(C, R(8, 9))}), T({F(P, R(1))}), T({F(C, R(1))})}), {}});
  cat.push_back({BoundId::ConicLargeQ, "thm1.6", "point-conic incidences, large sets", Direction::Upper, {P, C, Q},
                 sum_of({T({F(P, R(1)), F(C, R(1)), F(Q, R(-1))}), T({F(Q, R(1, 5)), F(P, R(4, 5)), F(C, R(4, 5))}),
                         T({F(C, R(1))})}),
                 {}});
  cat.push_back({BoundId::SphereLargeQ, "thm1.7", "point-sphere incidences", Direction::Upper, {P, C, Q, M::D},
                 sum_of({T({F(P, R(1)), F(C, R(1)), F(Q, R(-1))}),
                         T({F(Q, R(-1, 3), R(1, 3)), F(P, R(2, 3)), F(C, R(2, 3))})}),
                 {p_3mod4(Q, "q = 3 (mod 4)")}});
  cat.push_back({BoundId::CILRRSphere, "cilrr", "point-sphere incidences (earlier Fourier bound)", Direction::Upper,
                 {P, C, Q, M::D},
                 sum_of({T({F(P, R(1)), F(C, R(1)), F(Q, R(-1))}),
                         T({F(Q, R(0), R(1, 2)), F(P, R(1, 2)), F(C, R(1, 2))})}),
                 {}});
  cat.push_back({BoundId::KLPSphere, "klp", "point-sphere incidences, small sphere sets", Direction::Upper,
                 {P, C, Q, M::D},
                 sum_of({T({F(P, R(1)), F(C, R(1)), F(Q, R(-1))}),
                         T({F(Q, R(-1, 2), R(1, 2)), F(P, R(1, 2)), F(C, R(1, 2))})}),
                 {{"|P||S| <= q^(d-1)", {P, C, Q, M::D}, [](const BoundParams& bp) {
                     return val(bp, P) * val(bp, C) <=
                            pw(val(bp, Q), Rational(dimension(bp) - 1));
                   }}}});
  cat.push_back({BoundId::RichPointsSdZ, "cor4.1", "k-rich points with respect to lines", Direction::Upper, {C, K},
                 sum_of({T({F(C, R(11, 4)), F(K, R(-15, 4))}), T({F(C, R(1)), F(K, R(-1))})}),
                 {k_at_least(2), small_set(C, "|L| << p^(15/13)")}});
  cat.push_back({BoundId::RichCircles, "rich-circles", "k-rich circles/parabolas/hyperbolas", Direction::Upper, {P, K},
                 sum_of({T({F(P, R(15, 4)), F(K, R(-19, 4))}), T({F(P, R(2)), F(K, R(-2))})}),
                 {k_at_least(3), small_set(P, "|P| << p^(15/13)"), circles_p_3mod4()}});
  cat.push_back({BoundId::RichLinesLarge, "cor5.2", "k-rich lines, large sets", Direction::Upper, {P, K, Q},
                 sum_of({T({F(Q, R(1)), F(P, R(1)), F(K, R(-2))})}),
                 {{"k > |P|/q", {P, K, Q},
                   [](const BoundParams& bp) { return val(bp, K) * val(bp, Q) > val(bp, P); }}}});
  cat.push_back({BoundId::RichMobiusLarge, "cor5.3", "k-rich Moebius maps, large sets", Direction::Upper, {P, K, Q},
                 sum_of({T({F(Q, R(1)), F(P, R(2)), F(K, R(-3))})}),
                 {{"k > max{2, |P|/q}", {P, K, Q}, [](const BoundParams& bp) {
                     return val(bp, K) > 2 && val(bp, K) * val(bp, Q) > val(bp, P);
                   }}}});
  cat.push_back({BoundId::VinhHyperplane, "thm5.4", "point-hyperplane incidences", Direction::Upper, {P, C, Q, M::D},
                 sum_of({T({F(P, R(1)), F(C, R(1)), F(Q, R(-1))}),
                         T({F(Q, R(-1, 2), R(1, 2)), F(P, R(1, 2)), F(C, R(1, 2))})}),
                 {}});

  // Piecewise in |E| (= sizeP) against powers of q.
  cat.push_back({BoundId::KohSunOdd, "kohsun-odd", "distance set of two sets, odd d", Direction::Lower,
                 {P, C, Q, M::D},
                 [=](const BoundParams& bp) {
                   const std::int64_t d = dimension(bp);
                   const Decimal e = val(bp, P), q = val(bp, Q);
                   const Term half_q = T({F(Q, R(1))}, R(1, 2));
                   if (e < pw(q, R(d - 1, 2))) {
                     return Formula{{Branch{{half_q}}, Branch{{T({F(P, R(1)), F(C, R(1)), F(Q, R(1), R(-1))}, R(1, 8))}}},
                                    "1 <= |E| < q^((d-1)/2)"};
                   }
                   if (e < pw(q, R(d + 1, 2))) {
                     return Formula{{Branch{{half_q}}, Branch{{T({F(C, R(1)), F(Q, R(1, 2), R(-1, 2))}, R(1, 8))}}},
                                    "q^((d-1)/2) <= |E| < q^((d+1)/2)"};
                   }
                   return Formula{{Branch{{half_q}}, Branch{{T({F(P, R(1)), F(C, R(1)), F(Q, R(0), R(-1))}, R(1, 2))}}},
                                  "q^((d+1)/2) <= |E| <= q^d"};
                 },
                 {{"d odd, d >= 3", {M::D},
                   [](const BoundParams& bp) {
                     const auto d = dimension(bp);
                     return d >= 3 && d % 2 == 1;
                   }},
                  {"|E| <= q^d", {P, Q, M::D},
                   [=](const BoundParams& bp) { return val(bp, P) <= pw(val(bp, Q), R(dimension(bp))); }}}});
  cat.push_back({BoundId::KohSunEven, "kohsun-even", "distance set of two sets, even d", Direction::Lower,
                 {P, C, Q, M::D},
                 [=](const BoundParams& bp) {
                   const std::int64_t d = dimension(bp);
                   const Decimal e = val(bp, P), q = val(bp, Q);
                   const Term q_144 = T({F(Q, R(1))}, R(1, 144));
                   if (e < pw(q, R(d - 1, 2))) return Formula{{Branch{{q_144}}}, "1 <= |E| < q^((d-1)/2)"};
                   if (e < pw(q, R(d + 1, 2))) {
                     return Formula{{Branch{{q_144}}, Branch{{T({F(C, R(1)), F(Q, R(1, 2), R(-1, 2))}, R(1, 288))}}},
                                    "q^((d-1)/2) <= |E| < q^((d+1)/2)"};
                   }
                   return Formula{{Branch{{q_144}}, Branch{{T({F(P, R(1)), F(C, R(1)), F(Q, R(0), R(-1))}, R(2, 144))}}},
                                  "q^((d+1)/2) <= |E| <= q^d"};
                 },
                 {{"d even, d >= 2", {M::D},
                   [](const BoundParams& bp) {
                     const auto d = dimension(bp);
                     return d >= 2 && d % 2 == 0;
                   }},
                  {"|E||F| >= 16 q^d", {P, C, Q, M::D},
                   [=](const BoundParams& bp) {
                     return val(bp, P) * val(bp, C) >= 16 * pw(val(bp, Q), R(dimension(bp)));
                   }},
                  {"|E| <= q^d", {P, Q, M::D},
                   [=](const BoundParams& bp) { return val(bp, P) <= pw(val(bp, Q), R(dimension(bp))); }}}});

  cat.push_back({BoundId::PinnedLower815, "thm6.1", "pinned algebraic distances", Direction::Lower, {P},
                 sum_of({T({F(P, R(8, 15))})}),
                 {small_set(P, "|E| << p^(15/13)"), p_3mod4(M::P, "p = 3 (mod 4)")}});
  const std::vector<Term> planar = {T({F(P, R(4, 23)), F(C, R(4, 23))}), T({F(C, R(5, 4)), F(P, R(-1))}),
                                    T({F(P, R(20, 7)), F(C, R(-1))}), T({F(P, R(1))})};
  cat.push_back({BoundId::PlanarDistanceLower, "thm6.2", "distances between a planar set and a set in F_p^3",
                 Direction::Lower, {P, C}, min_of(planar), {}});
  cat.push_back({BoundId::PlanarDistanceQuartic, "cor6.3", "x^2y^2 + z^2 distances, planar set vs F_p^3",
                 Direction::Lower, {P, C}, min_of(planar),
                 {{"|F| >= |E|^(405/216)", {P, C},
                   [](const BoundParams& bp) { return val(bp, C) >= pw(val(bp, P), R(405, 216)); }},
                  p_3mod4(M::P, "p = 3 (mod 4)")}});
  cat.push_back({BoundId::ImageLower, "thm6.4", "polynomial image f(E) via E+F", Direction::Lower, {P, C, S},
                 min_of({T({F(P, R(19, 15)), F(C, R(4, 15)), F(S, R(-1))}),
                         T({F(P, R(19, 4)), F(C, R(15, 4)), F(S, R(-23, 4))}), T({F(P, R(1))})}),
                 {small_set(S, "|E+F| << p^(15/13)")}});
  cat.push_back({BoundId::DistSetLower, "thm6.7", "distance set of two sets, d >= 2", Direction::Lower,
                 {P, C, Q, M::D},
                 min_of({T({F(Q, R(1))}), T({F(P, R(1, 2)), F(C, R(1, 2)), F(Q, R(1, 2), R(-1, 2))})}),
                 {{"|E| ~ |F| (within factor 2)", {P, C},
                   [](const BoundParams& bp) {
                     return val(bp, P) <= 2 * val(bp, C) && val(bp, C) <= 2 * val(bp, P);
                   }},
                  {"|E|, |F| <= q^((d+1)/2)", {P, C, Q, M::D}, [=](const BoundParams& bp) {
                     const Decimal lim = pw(val(bp, Q), R(dimension(bp) + 1, 2));
                     return val(bp, P) <= lim && val(bp, C) <= lim;
                   }}}});
  cat.push_back({BoundId::BeckLower207, "thm6.8", "conics defined by a point set", Direction::Lower, {P},
                 sum_of({T({F(P, R(20, 7))})}), {small_set(P, "|P| << p^(15/13)")}});
  BoundInfo gp{BoundId::GP5TupleLower, "gp5", "ordered 5-tuples in general position", Direction::Lower,
               {P, M::MaxCollinear}, nullptr, {}};
  gp.special = true;
  cat.push_back(std::move(gp));
  return cat;
}

}  // namespace detail

inline const std::vector<BoundInfo>& bound_catalog() {
  static const std::vector<BoundInfo> catalog = detail::build_catalog();
  return catalog;
}

inline const BoundInfo& bound_info(BoundId id) {
  for (const auto& b : bound_catalog())
    if (b.id == id) return b;
  throw usage_error("unknown bound id");
}

inline std::vector<std::string> bound_names() {
  std::vector<std::string> out;
  for (const auto& b : bound_catalog()) out.push_back(b.name);
  return out;
}

/// Resolves a stable catalog name such as "thm1.1" or "cor5.2".
inline BoundId parse_bound_id(const std::string& name) {
  for (const auto& b : bound_catalog())
    if (b.name == name) return b.id;
  std::string valid;
  for (const auto& n : bound_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw usage_error("unknown bound '" + name + "'; valid names: " + valid);
}

/// The formula with exponents resolved at params' dimension (when it reads one).
inline Formula formula_of(BoundId id, const BoundParams& params) {
  const auto& info = bound_info(id);
  if (info.special) throw usage_error(info.name + " is not a power-product formula");
  return info.formula(params);
}

namespace detail {

inline BoundValue evaluate_gp5(const BoundInfo& info, const BoundParams& bp) {
  const Decimal n = bp.get(Magnitude::SizeP);
  const Decimal l = bp.get(Magnitude::MaxCollinear);
  const std::vector<std::pair<std::string, Decimal>> factors = {
      {"|P|", n}, {"|P|-1", n - 1}, {"|P|-L", n - l}, {"|P|-3L", n - 3 * l}, {"|P|-6L", n - 6 * l}};
  Decimal prod = 1;
  bool clamped = false;
  for (const auto& [_, f] : factors) {
    if (f < 0) clamped = true;
    prod *= f;
  }
  BoundValue v{info.id, info.name, info.direction, {}, clamped ? Decimal(0) : prod, "|P|(|P|-1)(|P|-L)(|P|-3L)(|P|-6L)",
               0, {}, clamped ? "clamped at 0 (negative factor)" : ""};
  v.terms.emplace_back(v.dominant, v.total);
  v.branch_totals.push_back(v.total);
  return v;
}

}  // namespace detail

/// Evaluates a bound with all implicit constants equal to 1.
inline BoundValue evaluate(BoundId id, const BoundParams& params) {
  const auto& info = bound_info(id);
  for (auto m : info.reads) (void)params.get(m);
  if (info.special) return detail::evaluate_gp5(info, params);

  const Formula f = info.formula(params);
  std::optional<std::int64_t> d;
  if (params.has(Magnitude::D)) d = detail::dimension(params);
  if (detail::reads_dimension(f) && !d) throw usage_error("missing magnitude d");

  BoundValue out{info.id, info.name, info.direction, {}, Decimal(0), "", 0, {}, f.case_note};
  std::vector<std::vector<std::pair<std::string, Decimal>>> branch_terms;
  for (const auto& br : f.branches) {
    std::vector<std::pair<std::string, Decimal>> terms;
    Decimal sum = 0;
    for (const auto& t : br.terms) {
      Decimal v = t.coeff.to_decimal();
      for (const auto& fa : t.factors) v *= detail::power(params.get(fa.m), fa.exponent(d.value_or(0)));
      terms.emplace_back(detail::term_label(t, d), v);
      sum += v;
    }
    out.branch_totals.push_back(sum);
    branch_terms.push_back(std::move(terms));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.branch_totals.size(); ++i)
    if (out.branch_totals[i] < out.branch_totals[best]) best = i;
  out.branch = best;
  out.terms = std::move(branch_terms[best]);
  out.total = out.branch_totals[best];
  std::size_t dom = 0;
  for (std::size_t i = 1; i < out.terms.size(); ++i)
    if (out.terms[i].second > out.terms[dom].second) dom = i;
  out.dominant = out.terms[dom].first;
  return out;
}

/// Checks each hypothesis of the bound; << is read as <= with constant 1, ~ as within a factor 2.
inline Applicability applicability(BoundId id, const BoundParams& params) {
  const auto& info = bound_info(id);
  for (auto m : info.reads) (void)params.get(m);
  Applicability out;
  for (const auto& h : info.hypotheses) {
    for (auto m : h.reads) (void)params.get(m);
    if (!h.holds(params)) {
      out.applicable = false;
      out.violated.push_back(h.text);
    }
  }
  out.notes = {"<< read as <= with constant 1", "~ read as within a factor 2"};
  return out;
}

/// Magnitudes expressed as powers N^e of one growing parameter N.
using PowerRegime = std::map<Magnitude, Rational>;

/// Growth exponent of the bound in the regime: min over branches of max over terms
/// of sum e_i * regime[m_i]. Nullopt for piecewise or non-power formulas.
inline std::optional<Rational> asymptotic_exponent(BoundId id, const PowerRegime& regime,
                                                   std::optional<std::int64_t> d = std::nullopt) {
  const auto& info = bound_info(id);
  if (info.special || id == BoundId::KohSunOdd || id == BoundId::KohSunEven) return std::nullopt;
  BoundParams dummy;
  if (d) dummy.set(Magnitude::D, static_cast<double>(*d));
  const Formula f = info.formula(dummy);
  if (detail::reads_dimension(f) && !d) return std::nullopt;
  std::optional<Rational> best;
  for (const auto& br : f.branches) {
    std::optional<Rational> worst;
    for (const auto& t : br.terms) {
      Rational e(0);
      for (const auto& fa : t.factors) {
        auto it = regime.find(fa.m);
        if (it == regime.end()) return std::nullopt;
        e = e + fa.exponent(d.value_or(0)) * it->second;
      }
      if (!worst || e > *worst) worst = e;
    }
    if (!best || *worst < *best) best = worst;
  }
  return best;
}

struct ImprovementReport {
  BoundValue a;
  BoundValue b;
  /// "a", "b" or "equal" by numeric value at the given parameters.
  std::string smaller;
  /// larger / smaller (1 when equal).
  Decimal factor = 1;
  std::optional<Rational> exponent_a;
  std::optional<Rational> exponent_b;
  /// Exact asymptotic order when both are power products in the regime.
  std::optional<std::string> asymptotic_smaller;
};

inline ImprovementReport improvement_range(BoundId ida, BoundId idb, const BoundParams& params,
                                           const std::optional<PowerRegime>& regime = std::nullopt) {
  ImprovementReport r{evaluate(ida, params), evaluate(idb, params), "equal", 1, {}, {}, {}};
  if (r.a.total < r.b.total) {
    r.smaller = "a";
    r.factor = r.a.total == 0 ? Decimal(0) : r.b.total / r.a.total;
  } else if (r.b.total < r.a.total) {
    r.smaller = "b";
    r.factor = r.b.total == 0 ? Decimal(0) : r.a.total / r.b.total;
  }
  if (regime) {
    std::optional<std::int64_t> d;
    if (params.has(Magnitude::D)) d = detail::dimension(params);
    r.exponent_a = asymptotic_exponent(ida, *regime, d);
    r.exponent_b = asymptotic_exponent(idb, *regime, d);
    if (r.exponent_a && r.exponent_b) {
      r.asymptotic_smaller = *r.exponent_a < *r.exponent_b ? "a" : *r.exponent_b < *r.exponent_a ? "b" : "equal";
    }
  }
  return r;
}

}  // namespace fpinc
