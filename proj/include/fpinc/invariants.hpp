#pragma once

/**
 * @file invariants.hpp
 * @brief Exhaustive and seeded invariant suites over a small prime, run by the
 * CLI `invariants` command.
 */

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "fpinc/curves.hpp"
#include "fpinc/duality.hpp"
#include "fpinc/field.hpp"
#include "fpinc/harness.hpp"
#include "fpinc/incidence.hpp"
#include "fpinc/projective.hpp"

namespace fpinc {

struct SuiteResult {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  void check(bool ok, const std::string& what) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first_failure = what;
  }
  [[nodiscard]] bool passed() const { return failures == 0; }
};

namespace detail {

/// Every nondegenerate conic has p + 1 projective points; exhaustive for p <= 7, sampled above.
inline SuiteResult suite_conic_points(const FieldSpec& fs, Rng& rng) {
  SuiteResult r{"conic-point-count", 0, 0, {}};
  auto check = [&](const Conic& q) {
    if (!is_nondegenerate(q)) return;
    const auto n = enumerate_projective_points(q).size();
    r.check(n == fs.p() + 1, q.to_string() + " has " + std::to_string(n) + " points");
  };
  if (fs.p() <= 7) {
    for (const auto& q : all_conics(fs)) check(q);
  } else {
    const auto fam = random_family(rng, fs, FamilyKind::Conics, 500, 2);
    for (const auto& q : fam.as<Conic>()) check(q);
  }
  return r;
}

/// Nondegenerate conics through [0:1:0] and [1:0:0] are exactly the graphs of non-affine Moebius maps.
inline SuiteResult suite_mobius(const FieldSpec& fs) {
  SuiteResult r{"mobius-characterization", 0, 0, {}};
  if (fs.p() > 7) return r;
  const auto y_inf = ProjPoint2::from_ints(fs, 0, 1, 0), x_inf = ProjPoint2::from_ints(fs, 1, 0, 0);
  std::set<Conic> through;
  for (const auto& q : all_conics(fs))
    if (is_nondegenerate(q) && q.contains(y_inf) && q.contains(x_inf)) through.insert(q);
  std::set<Conic> graphs;
  for (const auto& m : all_mobius(fs))
    if (!m.is_affine()) graphs.insert(mobius_to_conic(m));
  r.check(through == graphs, "conic set differs from Moebius graphs");
  r.check(through.size() == fs.p() * fs.p() * (fs.p() - 1), "count " + std::to_string(through.size()));
  return r;
}

/// I(pi(P), L) = I(P, pi^{-1}(L)) for random transforms.
inline SuiteResult suite_projective_invariance(const FieldSpec& fs, Rng& rng, std::size_t trials) {
  SuiteResult r{"projective-invariance", 0, 0, {}};
  const auto all = all_projective_points(fs);
  for (std::size_t t = 0; t < trials; ++t) {
    std::optional<ProjTransform> pi;
    while (!pi) {
      std::vector<FieldElem> m;
      for (int i = 0; i < 9; ++i) m.push_back(random_elem(rng, fs));
      MatrixModP mat(fs, 3, 3, m);
      if (!mat.determinant().is_zero()) pi = ProjTransform(mat);
    }
    std::vector<ProjPoint2> pts;
    for (std::size_t i = 0; i < 20; ++i) pts.push_back(all[rng.below(all.size())]);
    std::vector<LineFp2> lines;
    while (lines.size() < 20) {
      const auto& a = all[rng.below(all.size())];
      const auto& b = all[rng.below(all.size())];
      if (a != b) lines.push_back(LineFp2::through(a, b));
    }
    const ProjTransform inv = pi->inverse();
    std::uint64_t lhs = 0, rhs = 0;
    for (const auto& l : lines) {
      const LineFp2 back = transform_line(inv, l);
      for (const auto& pt : pts) {
        lhs += l.contains(apply(*pi, pt)) ? 1 : 0;
        rhs += back.contains(pt) ? 1 : 0;
      }
    }
    r.check(lhs == rhs, "trial " + std::to_string(t));
  }
  return r;
}

/// Incidences with curves through the origin equal incidences of the dual lines with parameter points.
inline SuiteResult suite_duality(const FieldSpec& fs) {
  SuiteResult r{"duality", 0, 0, {}};
  const auto origin = AffinePoint::origin(fs, 2);
  const PointSet plane(all_affine_points(fs, 2));
  const PointSet pts = plane.without(origin);

  const auto circles = circle_dual(pts);
  const auto parabolas = parabola_dual(pts);
  for (const auto& par : plane) {
    const FieldElem r2 = par.x() * par.x() + par.y() * par.y();
    if (!r2.is_zero()) {
      const CircleSpec c(par, r2);
      for (std::size_t i = 0; i < circles.sources.size(); ++i)
        r.check(c.contains(circles.sources[i]) == circles.duals[i].contains(par), "circle " + c.to_string());
    }
    if (!par.x().is_zero()) {
      const ParabolaSpec s(par.x(), par.y(), fs.zero());
      for (std::size_t i = 0; i < parabolas.sources.size(); ++i)
        r.check(s.contains(parabolas.sources[i]) == parabolas.duals[i].contains(par), "parabola " + s.to_string());
    }
  }
  for (const auto& ex : parabolas.excluded) r.check(ex.x().is_zero(), "unexplained parabola exclusion");

  const auto hyper = hyperbola_dual(plane, origin);
  for (const auto& a : fs.elements())
    for (const auto& b : fs.elements()) {
      const FieldElem c = a * b;
      if (c.is_zero()) continue;
      const HyperbolaSpec h(a, b, c);
      const auto par = hyperbola_dual_point(h, origin);
      for (std::size_t i = 0; i < hyper.sources.size(); ++i)
        r.check(h.contains(hyper.sources[i]) == hyper.duals[i].contains(par), "hyperbola " + h.to_string());
    }
  for (const auto& ex : hyper.excluded) r.check(ex.x().is_zero() || ex.y().is_zero(), "unexplained hyperbola exclusion");
  if (fs.p() % 4 == 3) r.check(circles.injective(), "circle dual not injective for p = 3 mod 4");
  return r;
}

/// Packed engine equals the naive engine and every histogram satisfies sum k |C_{=k}| = I.
inline SuiteResult suite_engines(const FieldSpec& fs, Rng& rng, std::size_t trials) {
  SuiteResult r{"engine-equivalence", 0, 0, {}};
  const FamilyKind kinds[] = {FamilyKind::Lines, FamilyKind::Conics, FamilyKind::Circles, FamilyKind::Parabolas,
                              FamilyKind::Hyperbolas, FamilyKind::Mobius};
  const std::uint64_t pop = fs.p() * fs.p();
  for (std::size_t t = 0; t < trials; ++t) {
    const FamilyKind kind = kinds[t % std::size(kinds)];
    std::vector<AffinePoint> pts;
    for (auto idx : sample_distinct(rng, pop, 1 + rng.below(std::min<std::uint64_t>(pop, 60))))
      pts.push_back(point_from_index(fs, idx, 2));
    const PointSet ps(2, std::move(pts));
    // Lines are the smallest family (p^2 + p members); half of that keeps redraws cheap.
    const auto fam = random_family(rng, fs, kind, 1 + rng.below(std::min<std::uint64_t>(60, (pop + fs.p()) / 2)), 2);
    const auto naive = per_curve_incidences(ps, fam, {Engine::Naive, 1});
    const auto packed = per_curve_incidences(ps, fam, {Engine::Packed, 1});
    r.check(naive == packed, std::string(to_string(kind)) + " trial " + std::to_string(t));
    r.check(profile_from_counts(packed).consistent(), "histogram identity, trial " + std::to_string(t));
  }
  return r;
}

}  // namespace detail

/// All suites at prime p.
inline std::vector<SuiteResult> run_invariant_suites(std::uint64_t p, std::uint64_t seed) {
  const FieldSpec fs(p);
  Rng rng(seed);
  return {detail::suite_conic_points(fs, rng), detail::suite_mobius(fs), detail::suite_projective_invariance(fs, rng, 200),
          detail::suite_duality(fs), detail::suite_engines(fs, rng, 120)};
}

}  // namespace fpinc
