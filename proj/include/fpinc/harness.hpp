#pragma once

/**
 * @file harness.hpp
 * @brief Seeded instance generators, experiment runs and CSV/JSON report emission.
 *
 * Randomness comes from std::mt19937_64 seeded per trial with
 * splitmix64(seed, sweep, trial), and integers are drawn by rejection rather
 * than through std::uniform_int_distribution, whose output is not specified
 * across standard libraries. A run is therefore identical on every platform
 * and for every thread count.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ios>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fpinc/bounds.hpp"
#include "fpinc/curves.hpp"
#include "fpinc/errors.hpp"
#include "fpinc/field.hpp"
#include "fpinc/incidence.hpp"
#include "fpinc/projective.hpp"

namespace fpinc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  /// Substream for (seed, a, b).
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(a + 0x51ed27) ^ splitmix64(b * 0x2545f491 + 7)));
  }
  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw usage_error("Rng::below(0)");
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v = 0;
    do v = eng_();
    while (v >= limit);
    return v % n;
  }
  std::mt19937_64& engine() noexcept { return eng_; }

 private:
  std::mt19937_64 eng_;
};

enum class GeneratorKind { RandomUniform, CartesianProduct, OnCurve, CosetLike };
enum class FamilyKind { Lines, Conics, CartesianConics, Circles, Parabolas, Hyperbolas, Mobius, Spheres, Hyperplanes };

inline const char* to_string(GeneratorKind g) {
  switch (g) {
    case GeneratorKind::RandomUniform: return "random";
    case GeneratorKind::CartesianProduct: return "cartesian";
    case GeneratorKind::OnCurve: return "oncurve";
    case GeneratorKind::CosetLike: return "coset";
  }
  return "?";
}

inline const char* to_string(FamilyKind f) {
  switch (f) {
    case FamilyKind::Lines: return "lines";
    case FamilyKind::Conics: return "conics";
    case FamilyKind::CartesianConics: return "cartesian-conics";
    case FamilyKind::Circles: return "circles";
    case FamilyKind::Parabolas: return "parabolas";
    case FamilyKind::Hyperbolas: return "hyperbolas";
    case FamilyKind::Mobius: return "mobius";
    case FamilyKind::Spheres: return "spheres";
    case FamilyKind::Hyperplanes: return "hyperplanes";
  }
  return "?";
}

inline GeneratorKind parse_generator(const std::string& s) {
  for (auto g : {GeneratorKind::RandomUniform, GeneratorKind::CartesianProduct, GeneratorKind::OnCurve,
                 GeneratorKind::CosetLike})
    if (s == to_string(g)) return g;
  throw usage_error("unknown generator '" + s + "' (random, cartesian, oncurve, coset)");
}

inline FamilyKind parse_family(const std::string& s) {
  for (auto f : {FamilyKind::Lines, FamilyKind::Conics, FamilyKind::CartesianConics, FamilyKind::Circles,
                 FamilyKind::Parabolas, FamilyKind::Hyperbolas, FamilyKind::Mobius, FamilyKind::Spheres,
                 FamilyKind::Hyperplanes})
    if (s == to_string(f)) return f;
  throw usage_error("unknown family '" + s +
                    "' (lines, conics, cartesian-conics, circles, parabolas, hyperbolas, mobius, spheres, hyperplanes)");
}

/**
 * One experiment. The flat key=value file format uses the field names below;
 * list values are comma separated.
 *
 *   prime, seed, trials, threads, dim, k, generator, points, size_a, size_b,
 *   size_a_sweep, curve, coset_order, coset_shift_a, coset_shift_b, family,
 *   family_count, family_exponent, bounds
 *
 * `curve` (for generator=oncurve) is "conic:a,b,c,d,e,f", "circle:x,y,r",
 * "parabola:a,b,c" or "hyperbola:a,b,c". `family_exponent`, when set, makes
 * the family size round(|P|^family_exponent) and overrides family_count.
 * The coset generator builds (s_a H) x (s_b H) for the subgroup H of F_p^*
 * of order coset_order.
 */
struct ExperimentConfig {
  std::uint64_t prime = 101;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  unsigned threads = 1;
  std::size_t dim = 2;
  std::size_t k = 3;

  GeneratorKind generator = GeneratorKind::RandomUniform;
  std::size_t points = 50;
  std::size_t size_a = 4;
  std::size_t size_b = 4;
  std::vector<std::size_t> size_a_sweep;
  std::string curve;
  std::size_t coset_order = 0;
  std::uint64_t coset_shift_a = 1;
  std::uint64_t coset_shift_b = 1;

  FamilyKind family = FamilyKind::Conics;
  std::size_t family_count = 100;
  std::optional<double> family_exponent;

  std::vector<std::string> bounds;

  void set(const std::string& key, const std::string& value);
  void validate() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const auto r = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (const std::exception&) {
    throw usage_error("bad value for " + key + ": '" + v + "'");
  }
}

inline std::vector<std::int64_t> parse_ints(const std::string& key, const std::string& v) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(v, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(part, &used));
      if (used != part.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw usage_error("bad value for " + key + ": '" + v + "'");
    }
  }
  return out;
}

}  // namespace detail

inline void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  if (key == "prime") prime = detail::parse_u64(key, v);
  else if (key == "seed") seed = detail::parse_u64(key, v);
  else if (key == "trials") trials = detail::parse_u64(key, v);
  else if (key == "threads") threads = static_cast<unsigned>(detail::parse_u64(key, v));
  else if (key == "dim") dim = detail::parse_u64(key, v);
  else if (key == "k") k = detail::parse_u64(key, v);
  else if (key == "generator") generator = parse_generator(v);
  else if (key == "points") points = detail::parse_u64(key, v);
  else if (key == "size_a") size_a = detail::parse_u64(key, v);
  else if (key == "size_b") size_b = detail::parse_u64(key, v);
  else if (key == "size_a_sweep") {
    size_a_sweep.clear();
    for (const auto& s : detail::split(v, ',')) size_a_sweep.push_back(detail::parse_u64(key, s));
  } else if (key == "curve") curve = v;
  else if (key == "coset_order") coset_order = detail::parse_u64(key, v);
  else if (key == "coset_shift_a") coset_shift_a = detail::parse_u64(key, v);
  else if (key == "coset_shift_b") coset_shift_b = detail::parse_u64(key, v);
  else if (key == "family") family = parse_family(v);
  else if (key == "family_count") family_count = detail::parse_u64(key, v);
  else if (key == "family_exponent") {
    try {
      family_exponent = std::stod(v);
    } catch (const std::exception&) {
      throw usage_error("bad value for family_exponent: '" + v + "'");
    }
  } else if (key == "bounds") {
    bounds = detail::split(v, ',');
    for (const auto& b : bounds) (void)parse_bound_id(b);
  } else {
    throw usage_error("unknown config key '" + key + "'");
  }
}

inline void ExperimentConfig::validate() const {
  (void)FieldSpec(prime);
  if (dim < 1) throw usage_error("dim must be >= 1");
  const bool planar_family = family != FamilyKind::Spheres && family != FamilyKind::Hyperplanes;
  if (planar_family && dim != 2) throw usage_error(std::string(to_string(family)) + " needs dim = 2");
  if (generator != GeneratorKind::RandomUniform && dim != 2) throw usage_error("only the random generator supports dim != 2");
  if (generator == GeneratorKind::RandomUniform && points == 0) throw usage_error("points must be positive");
  if (generator == GeneratorKind::CartesianProduct && (size_a == 0 || size_b == 0))
    throw usage_error("size_a and size_b must be positive");
  for (auto s : size_a_sweep)
    if (s == 0) throw usage_error("size_a_sweep entries must be positive");
  if (generator == GeneratorKind::CosetLike) {
    if (coset_order == 0 || (prime - 1) % coset_order != 0) throw usage_error("coset_order must divide p - 1");
    if (coset_shift_a % prime == 0 || coset_shift_b % prime == 0) throw usage_error("coset shifts must be nonzero");
  }
  if (generator == GeneratorKind::OnCurve && curve.empty()) throw usage_error("generator=oncurve needs curve");
  for (const auto& b : bounds) (void)parse_bound_id(b);
}

/// Reads key=value lines ('#' starts a comment) into cfg.
inline void load_config(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw usage_error("config line " + std::to_string(lineno) + ": expected key=value");
    cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file " + path);
  load_config(cfg, in);
}

namespace detail {

inline FieldElem random_elem(Rng& rng, const FieldSpec& fs) { return FieldElem::from_canonical(rng.below(fs.p()), fs.p()); }
inline FieldElem random_nonzero(Rng& rng, const FieldSpec& fs) {
  return FieldElem::from_canonical(1 + rng.below(fs.p() - 1), fs.p());
}

/// `count` distinct values of [0, n), in draw order.
inline std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t n, std::size_t count) {
  if (count > n) throw usage_error("requested " + std::to_string(count) + " items from a population of " + std::to_string(n));
  std::vector<std::uint64_t> out;
  if (count * 2 <= n) {
    std::set<std::uint64_t> seen;
    while (out.size() < count) {
      const auto v = rng.below(n);
      if (seen.insert(v).second) out.push_back(v);
    }
    return out;
  }
  std::vector<std::uint64_t> all(n);
  for (std::uint64_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(count);
  return all;
}

inline std::uint64_t checked_pow(std::uint64_t p, std::size_t d) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (r > (~0ULL) / p) return ~0ULL;
    r *= p;
  }
  return r;
}

inline AffinePoint point_from_index(const FieldSpec& fs, std::uint64_t idx, std::size_t dim) {
  std::vector<FieldElem> c;
  for (std::size_t i = 0; i < dim; ++i) {
    c.push_back(FieldElem::from_canonical(idx % fs.p(), fs.p()));
    idx /= fs.p();
  }
  return AffinePoint(std::move(c));
}

inline std::vector<AffinePoint> curve_points(const FieldSpec& fs, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw usage_error("curve '" + text + "' needs kind:coefficients");
  const std::string kind = text.substr(0, colon);
  const auto v = parse_ints("curve", text.substr(colon + 1));
  auto need = [&](std::size_t n) {
    if (v.size() != n) throw usage_error("curve " + kind + " takes " + std::to_string(n) + " coefficients");
  };
  if (kind == "conic") {
    need(6);
    return enumerate_points(Conic::from_ints(fs, v[0], v[1], v[2], v[3], v[4], v[5]));
  }
  if (kind == "circle") {
    need(3);
    return enumerate_points(CircleSpec(AffinePoint(fs.elem(v[0]), fs.elem(v[1])), fs.elem(v[2])));
  }
  if (kind == "parabola") {
    need(3);
    return enumerate_points(ParabolaSpec(fs.elem(v[0]), fs.elem(v[1]), fs.elem(v[2])));
  }
  if (kind == "hyperbola") {
    need(3);
    return enumerate_points(HyperbolaSpec(fs.elem(v[0]), fs.elem(v[1]), fs.elem(v[2])));
  }
  throw usage_error("unknown curve kind '" + kind + "'");
}

inline std::vector<FieldElem> coset(const FieldSpec& fs, std::size_t order, std::uint64_t shift) {
  const std::uint64_t p = fs.p();
  // A generator of the order-`order` subgroup: g^((p-1)/order) for a primitive root g.
  std::vector<std::uint64_t> primes;
  std::uint64_t m = p - 1;
  for (std::uint64_t q = 2; q * q <= m; ++q) {
    if (m % q == 0) {
      primes.push_back(q);
      while (m % q == 0) m /= q;
    }
  }
  if (m > 1) primes.push_back(m);
  std::uint64_t g = 2;
  for (;; ++g) {
    bool primitive = true;
    for (auto q : primes)
      if (powmod(g, (p - 1) / q, p) == 1) primitive = false;
    if (primitive) break;
  }
  const std::uint64_t h = powmod(g, (p - 1) / order, p);
  std::vector<FieldElem> out;
  std::uint64_t cur = shift % p;
  for (std::size_t i = 0; i < order; ++i) {
    out.push_back(FieldElem::from_canonical(cur, p));
    cur = mulmod(cur, h, p);
  }
  return out;
}

inline std::vector<FieldElem> random_subset(Rng& rng, const FieldSpec& fs, std::size_t n) {
  std::vector<FieldElem> out;
  for (auto v : sample_distinct(rng, fs.p(), n)) out.push_back(FieldElem::from_canonical(v, fs.p()));
  return out;
}

inline PointSet product(const std::vector<FieldElem>& a, const std::vector<FieldElem>& b) {
  std::vector<AffinePoint> pts;
  for (const auto& x : a)
    for (const auto& y : b) pts.emplace_back(x, y);
  return PointSet(2, std::move(pts));
}

/// `count` distinct members, in draw order. Families are sets, so repeats are redrawn.
template <typename T, typename Draw>
std::vector<T> draw_members(std::size_t count, Draw draw) {
  std::vector<T> out;
  out.reserve(count);
  std::set<T> seen;
  const std::size_t max_draws = 64 * count + 1024;
  for (std::size_t tries = 0; out.size() < count; ++tries) {
    if (tries == max_draws) throw usage_error("family has fewer than " + std::to_string(count) + " distinct members");
    T m = draw();
    if (seen.insert(m).second) out.push_back(std::move(m));
  }
  return out;
}

inline CurveFamily random_family(Rng& rng, const FieldSpec& fs, FamilyKind kind, std::size_t count, std::size_t dim) {
  switch (kind) {
    case FamilyKind::Lines:
      return CurveFamily(draw_members<LineFp2>(count, [&] {
        for (;;) {
          const FieldElem a = random_elem(rng, fs), b = random_elem(rng, fs);
          if (a.is_zero() && b.is_zero()) continue;
          return LineFp2(a, b, random_elem(rng, fs));
        }
      }));
    case FamilyKind::Conics:
      return CurveFamily(draw_members<Conic>(count, [&] {
        for (;;) {
          std::array<FieldElem, 6> k{fs.zero(), fs.zero(), fs.zero(), fs.zero(), fs.zero(), fs.zero()};
          for (auto& c : k) c = random_elem(rng, fs);
          bool any = false;
          for (const auto& c : k) any = any || !c.is_zero();
          if (!any) continue;
          Conic q = Conic::from_array(k);
          if (is_nondegenerate(q)) return q;
        }
      }));
    case FamilyKind::CartesianConics:
      // a x^2 + xy + b y^2 + d x + e y + f
      return CurveFamily(draw_members<Conic>(count, [&] {
        for (;;) {
          Conic q = Conic::from_array({random_elem(rng, fs), fs.one(), random_elem(rng, fs), random_elem(rng, fs),
                                       random_elem(rng, fs), random_elem(rng, fs)});
          if (is_nondegenerate(q)) return q;
        }
      }));
    case FamilyKind::Circles:
      return CurveFamily(draw_members<CircleSpec>(count, [&] {
        return CircleSpec(AffinePoint(random_elem(rng, fs), random_elem(rng, fs)), random_nonzero(rng, fs));
      }));
    case FamilyKind::Parabolas:
      return CurveFamily(draw_members<ParabolaSpec>(
          count, [&] { return ParabolaSpec(random_nonzero(rng, fs), random_elem(rng, fs), random_elem(rng, fs)); }));
    case FamilyKind::Hyperbolas:
      return CurveFamily(draw_members<HyperbolaSpec>(
          count, [&] { return HyperbolaSpec(random_elem(rng, fs), random_elem(rng, fs), random_nonzero(rng, fs)); }));
    case FamilyKind::Mobius:
      return CurveFamily(draw_members<Mobius>(count, [&] {
        for (;;) {
          const FieldElem a = random_elem(rng, fs), b = random_elem(rng, fs), c = random_elem(rng, fs),
                          d = random_elem(rng, fs);
          if (!(a * d - b * c).is_zero()) return Mobius(a, b, c, d);
        }
      }));
    case FamilyKind::Spheres:
      return CurveFamily(draw_members<Sphere>(count, [&] {
        std::vector<FieldElem> c;
        for (std::size_t i = 0; i < dim; ++i) c.push_back(random_elem(rng, fs));
        return Sphere(AffinePoint(std::move(c)), random_nonzero(rng, fs));
      }));
    case FamilyKind::Hyperplanes:
      return CurveFamily(draw_members<Hyperplane>(count, [&] {
        for (;;) {
          std::vector<FieldElem> n;
          bool any = false;
          for (std::size_t i = 0; i < dim; ++i) {
            n.push_back(random_elem(rng, fs));
            any = any || !n.back().is_zero();
          }
          if (any) return Hyperplane(std::move(n), random_elem(rng, fs));
        }
      }));
  }
  throw usage_error("unknown family");
}

}  // namespace detail

struct Instance {
  PointSet points{2};
  CurveFamily curves{std::vector<Conic>{}};
  /// |A|, |B| for product generators.
  std::optional<std::pair<std::size_t, std::size_t>> cartesian;
  std::string descriptor;
};

/// Generates the instance of one trial. `size_a` overrides cfg.size_a (used by sweeps).
inline Instance generate(const ExperimentConfig& cfg, std::size_t trial = 0, std::size_t sweep = 0,
                         std::optional<std::size_t> size_a = std::nullopt) {
  cfg.validate();
  const FieldSpec fs(cfg.prime);
  Rng rng = Rng::substream(cfg.seed, sweep, trial);
  Instance inst;
  std::ostringstream desc;
  desc << to_string(cfg.generator);

  switch (cfg.generator) {
    case GeneratorKind::RandomUniform: {
      const std::uint64_t pop = detail::checked_pow(cfg.prime, cfg.dim);
      std::vector<AffinePoint> pts;
      for (auto idx : detail::sample_distinct(rng, pop, cfg.points)) pts.push_back(detail::point_from_index(fs, idx, cfg.dim));
      inst.points = PointSet(cfg.dim, std::move(pts));
      desc << "(" << cfg.points << ")";
      break;
    }
    case GeneratorKind::CartesianProduct: {
      const std::size_t a = size_a.value_or(cfg.size_a);
      const auto av = detail::random_subset(rng, fs, a);
      const auto bv = detail::random_subset(rng, fs, cfg.size_b);
      inst.points = detail::product(av, bv);
      inst.cartesian = std::make_pair(std::min(a, cfg.size_b), std::max(a, cfg.size_b));
      desc << "(" << a << "x" << cfg.size_b << ")";
      break;
    }
    case GeneratorKind::OnCurve: {
      const auto on = detail::curve_points(fs, cfg.curve);
      std::vector<AffinePoint> pts;
      for (auto i : detail::sample_distinct(rng, on.size(), cfg.points)) pts.push_back(on[i]);
      inst.points = PointSet(2, std::move(pts));
      desc << "(" << cfg.curve << "," << cfg.points << ")";
      break;
    }
    case GeneratorKind::CosetLike: {
      const auto av = detail::coset(fs, cfg.coset_order, cfg.coset_shift_a);
      const auto bv = detail::coset(fs, cfg.coset_order, cfg.coset_shift_b);
      inst.points = detail::product(av, bv);
      inst.cartesian = std::make_pair(av.size(), bv.size());
      desc << "(" << cfg.coset_order << ";" << cfg.coset_shift_a << "," << cfg.coset_shift_b << ")";
      break;
    }
  }

  std::size_t count = cfg.family_count;
  if (cfg.family_exponent) {
    count = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(inst.points.size()), *cfg.family_exponent)));
  }
  inst.curves = detail::random_family(rng, fs, cfg.family, count, cfg.dim);
  desc << "/" << to_string(cfg.family) << "(" << count << ")";
  inst.descriptor = desc.str();
  return inst;
}

struct BoundEntry {
  std::string name;
  Decimal value;
  bool applicable = false;
  std::vector<std::string> violated;
  /// measured / value when applicable and value > 0.
  std::optional<Decimal> ratio;
};

struct ReportRow {
  std::size_t trial = 0;
  std::size_t size_a = 0;
  std::string instance;
  std::size_t points = 0;
  std::size_t curves = 0;
  std::uint64_t incidences = 0;
  std::size_t max_richness = 0;
  /// Curves with at least k points.
  std::size_t rich = 0;
  std::string histogram;
  std::vector<BoundEntry> bounds;
  double wall_ms = 0;
};

struct Report {
  std::vector<std::string> bounds;
  std::size_t k = 3;
  std::vector<ReportRow> rows;
};

namespace detail {

inline std::string histogram_summary(const IncidenceProfile& prof) {
  std::string s;
  for (const auto& [k, n] : prof.histogram) {
    if (!s.empty()) s += ';';
    s += std::to_string(k) + ":" + std::to_string(n);
  }
  return s;
}

inline BoundParams row_params(const ExperimentConfig& cfg, const Instance& inst) {
  BoundParams bp;
  bp.set(Magnitude::SizeP, static_cast<std::uint64_t>(inst.points.size()))
      .set(Magnitude::SizeC, static_cast<std::uint64_t>(inst.curves.size()))
      .set(Magnitude::P, cfg.prime)
      .set(Magnitude::Q, cfg.prime)
      .set(Magnitude::K, static_cast<std::uint64_t>(cfg.k))
      .set(Magnitude::D, static_cast<std::uint64_t>(cfg.dim));
  if (inst.cartesian) {
    bp.set(Magnitude::SizeA, static_cast<std::uint64_t>(inst.cartesian->first))
        .set(Magnitude::SizeB, static_cast<std::uint64_t>(inst.cartesian->second));
  }
  bp.circles = cfg.family == FamilyKind::Circles;
  return bp;
}

inline bool reads(const BoundInfo& info, Magnitude m) {
  return std::find(info.reads.begin(), info.reads.end(), m) != info.reads.end();
}

inline ReportRow run_trial(const ExperimentConfig& cfg, std::size_t trial, std::size_t sweep,
                           std::optional<std::size_t> size_a) {
  const auto start = std::chrono::steady_clock::now();
  const Instance inst = generate(cfg, trial, sweep, size_a);
  const auto prof = incidence_histogram(inst.points, inst.curves);
  ReportRow row;
  row.trial = trial;
  row.size_a = size_a.value_or(inst.cartesian ? cfg.size_a : 0);
  row.instance = inst.descriptor;
  row.points = inst.points.size();
  row.curves = inst.curves.size();
  row.incidences = prof.total;
  row.max_richness = prof.max_richness();
  row.rich = prof.rich_count(cfg.k);
  row.histogram = histogram_summary(prof);

  const BoundParams bp = row_params(cfg, inst);
  for (const auto& name : cfg.bounds) {
    const BoundId id = parse_bound_id(name);
    const auto& info = bound_info(id);
    BoundEntry e{name, Decimal(0), false, {}, std::nullopt};
    bool evaluable = true;
    for (auto m : info.reads) evaluable = evaluable && bp.has(m);
    if (!evaluable) {
      e.violated.push_back("magnitudes not defined for this instance");
    } else {
      e.value = evaluate(id, bp).total;
      const auto app = applicability(id, bp);
      e.applicable = app.applicable;
      e.violated = app.violated;
      const Decimal measured(static_cast<std::uint64_t>(reads(info, Magnitude::K) ? row.rich : row.incidences));
      if (e.applicable && e.value > 0) e.ratio = measured / e.value;
    }
    row.bounds.push_back(std::move(e));
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace detail

/// All trials (times every sweep size), in (sweep, trial) order regardless of thread count.
inline Report run(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep;
  rep.bounds = cfg.bounds;
  rep.k = cfg.k;
  struct Task {
    std::size_t sweep;
    std::size_t trial;
    std::optional<std::size_t> size_a;
  };
  std::vector<Task> tasks;
  if (cfg.size_a_sweep.empty()) {
    for (std::size_t t = 0; t < cfg.trials; ++t) tasks.push_back({0, t, std::nullopt});
  } else {
    for (std::size_t s = 0; s < cfg.size_a_sweep.size(); ++s)
      for (std::size_t t = 0; t < cfg.trials; ++t) tasks.push_back({s, t, cfg.size_a_sweep[s]});
  }
  rep.rows.resize(tasks.size());
  const unsigned threads = std::max(1U, cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads);
  if (threads == 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      rep.rows[i] = detail::run_trial(cfg, tasks[i].trial, tasks[i].sweep, tasks[i].size_a);
    return rep;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < tasks.size(); i += threads)
            rep.rows[i] = detail::run_trial(cfg, tasks[i].trial, tasks[i].sweep, tasks[i].size_a);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rep;
}

enum class Format { Csv, Json };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw usage_error("unknown format '" + s + "' (csv, json)");
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string fixed6(const Decimal& v) { return v.str(6, std::ios_base::fixed); }

inline std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : sep) + x;
  return s;
}

}  // namespace detail

/// CSV (RFC 4180 quoting, '\n' line ends, ratios with 6 fractional digits) or a JSON array.
/// With timing = false the wall-time column is omitted.
inline std::string emit(const Report& rep, Format fmt, bool timing = true) {
  if (fmt == Format::Json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
      nlohmann::ordered_json o;
      o["trial"] = r.trial;
      o["size_a"] = r.size_a;
      o["instance"] = r.instance;
      o["points"] = r.points;
      o["curves"] = r.curves;
      o["incidences"] = r.incidences;
      o["max_richness"] = r.max_richness;
      o["k"] = rep.k;
      o["rich"] = r.rich;
      o["histogram"] = r.histogram;
      nlohmann::ordered_json bs = nlohmann::ordered_json::array();
      for (const auto& b : r.bounds) {
        nlohmann::ordered_json jb;
        jb["bound"] = b.name;
        jb["value"] = to_decimal_string(b.value);
        jb["applicable"] = b.applicable;
        jb["violated"] = b.violated;
        jb["ratio"] = b.ratio ? nlohmann::ordered_json(detail::fixed6(*b.ratio)) : nlohmann::ordered_json(nullptr);
        bs.push_back(std::move(jb));
      }
      o["bounds"] = std::move(bs);
      if (timing) o["wall_ms"] = r.wall_ms;
      arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
  }

  std::vector<std::string> header = {"trial", "size_a", "instance", "points", "curves", "incidences",
                                     "max_richness", "k", "rich", "histogram"};
  for (const auto& b : rep.bounds) {
    header.push_back(b + ".value");
    header.push_back(b + ".applicable");
    header.push_back(b + ".violated");
    header.push_back(b + ".ratio");
  }
  if (timing) header.push_back("wall_ms");
  std::string out;
  std::vector<std::string> cells;
  for (const auto& h : header) cells.push_back(detail::csv_field(h));
  out += detail::join(cells, ",") + "\n";
  for (const auto& r : rep.rows) {
    cells = {std::to_string(r.trial),      std::to_string(r.size_a),       detail::csv_field(r.instance),
             std::to_string(r.points),     std::to_string(r.curves),       std::to_string(r.incidences),
             std::to_string(r.max_richness), std::to_string(rep.k),        std::to_string(r.rich),
             detail::csv_field(r.histogram)};
    for (const auto& b : r.bounds) {
      cells.push_back(to_decimal_string(b.value));
      cells.push_back(b.applicable ? "true" : "false");
      cells.push_back(detail::csv_field(detail::join(b.violated, "; ")));
      cells.push_back(b.ratio ? detail::fixed6(*b.ratio) : "");
    }
    if (timing) {
      std::ostringstream ms;
      ms.setf(std::ios::fixed);
      ms.precision(3);
      ms << r.wall_ms;
      cells.push_back(ms.str());
    }
    out += detail::join(cells, ",") + "\n";
  }
  return out;
}

/// Splits CSV text into records (RFC 4180 quoting).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (any) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fpinc
