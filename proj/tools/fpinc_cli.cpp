// fpinc: command-line front end for the incidence library.
//
// Exit codes: 0 success, 1 usage error, 2 invariant-suite failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpinc/fpinc.hpp"

namespace {

using namespace fpinc;

struct Common {
  std::optional<std::uint64_t> prime;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
  std::string config;
  std::string out;
  std::string format = "csv";
  bool no_timing = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--prime", c.prime, "odd prime p");
  cmd->add_option("--seed", c.seed, "64-bit seed");
  cmd->add_option("--trials", c.trials, "number of trials");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  cmd->add_option("--config", c.config, "key=value experiment file");
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--no-timing", c.no_timing, "omit wall-time columns");
  cmd->add_option("--set", c.sets, "override a config key (key=value), repeatable");
}

ExperimentConfig build_config(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config.empty()) load_config_file(cfg, c.config);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw usage_error("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.prime) cfg.prime = *c.prime;
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (c.threads) cfg.threads = *c.threads;
  cfg.validate();
  return cfg;
}

void write_output(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw usage_error("cannot write " + c.out);
  f << text;
}

/// Rows of string cells, emitted as CSV or a JSON array of objects.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::string render(Format fmt) const {
    if (fmt == Format::Json) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json o;
        for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
        arr.push_back(std::move(o));
      }
      return arr.dump(2) + "\n";
    }
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + detail::csv_field(cells[i]);
      out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

std::string values_string(const std::set<FieldElem>& vals) {
  std::string s;
  for (const auto& v : vals) s += (s.empty() ? "" : " ") + std::to_string(v.value());
  return s;
}

PointSet random_points(const FieldSpec& fs, Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<AffinePoint> pts;
  for (auto idx : detail::sample_distinct(rng, detail::checked_pow(fs.p(), dim), n))
    pts.push_back(detail::point_from_index(fs, idx, dim));
  return PointSet(dim, std::move(pts));
}

DistancePolynomial parse_poly(const std::string& s) {
  if (s == "sumsq") return DistancePolynomial::sum_squares();
  if (s == "product") return DistancePolynomial::product();
  if (s == "parabola") return DistancePolynomial::parabola();
  throw usage_error("unknown polynomial '" + s + "' (sumsq, product, parabola)");
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_ms(double ms) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << ms;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incidence geometry over prime fields"};
  app.require_subcommand(1);

  Common c_inc, c_rich, c_inv, c_pin, c_img, c_dist, c_beck, c_bench;

  auto* inc = app.add_subcommand("incidence", "count incidences, histogram and bound comparison");
  add_common(inc, c_inc);

  auto* rich = app.add_subcommand("rich", "k-rich curves of one generated instance");
  add_common(rich, c_rich);
  std::optional<std::size_t> rich_k;
  rich->add_option("-k", rich_k, "richness threshold");

  auto* inv = app.add_subcommand("invariants", "run the small-prime invariant suites");
  add_common(inv, c_inv);

  auto* pin = app.add_subcommand("pinned", "best pinned distance set of a random planar set");
  add_common(pin, c_pin);
  std::size_t pin_points = 60;
  std::string pin_poly = "sumsq";
  bool pin_any_p = false;
  pin->add_option("--points", pin_points, "|E|");
  pin->add_option("--poly", pin_poly, "sumsq, product or parabola");
  pin->add_flag("--allow-any-p", pin_any_p, "do not require p = 3 mod 4");

  auto* img = app.add_subcommand("image", "polynomial image f(E) and the E+F incidence check");
  add_common(img, c_img);
  std::size_t img_e = 30, img_f = 10;
  std::string img_poly = "product";
  img->add_option("--points", img_e, "|E|");
  img->add_option("--points-f", img_f, "|F|");
  img->add_option("--poly", img_poly, "sumsq, product or parabola");

  auto* dist = app.add_subcommand("distset", "quadrance distance set of two random sets");
  add_common(dist, c_dist);
  std::size_t dist_e = 30, dist_f = 30, dist_d = 2;
  dist->add_option("--points", dist_e, "|E|");
  dist->add_option("--points-f", dist_f, "|F|");
  dist->add_option("--dim", dist_d, "dimension d");

  auto* beck = app.add_subcommand("beck", "conics spanned by a random planar set");
  add_common(beck, c_beck);
  std::size_t beck_points = 15;
  beck->add_option("--points", beck_points, "|P|");

  auto* bench = app.add_subcommand("bench", "time the packed conic engine");
  add_common(bench, c_bench);
  std::size_t bench_points = 10000, bench_curves = 10000;
  std::vector<unsigned> bench_threads{1, 8};
  bench->add_option("--points", bench_points, "|P|");
  bench->add_option("--curves", bench_curves, "|C|");
  bench->add_option("--thread-list", bench_threads, "thread counts to time")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (inc->parsed()) {
      const auto cfg = build_config(c_inc);
      write_output(c_inc, emit(run(cfg), parse_format(c_inc.format), !c_inc.no_timing));
      return 0;
    }

    if (rich->parsed()) {
      auto cfg = build_config(c_rich);
      if (rich_k) cfg.k = *rich_k;
      const auto inst = generate(cfg);
      const auto r = rich_curves(inst.points, inst.curves, cfg.k, {Engine::Packed, cfg.threads});
      Table t{{"instance", "k", "curve", "richness"}, {}};
      for (std::size_t i = 0; i < r.curves.size(); ++i)
        t.rows.push_back({inst.descriptor, std::to_string(cfg.k), r.curves.member_string(i), std::to_string(r.richness[i])});
      write_output(c_rich, t.render(parse_format(c_rich.format)));
      return 0;
    }

    if (inv->parsed()) {
      std::vector<std::uint64_t> primes = {3, 5, 7};
      if (c_inv.prime) primes = {*c_inv.prime};
      Table t{{"prime", "suite", "cases", "failures", "first_failure"}, {}};
      bool ok = true;
      for (auto p : primes) {
        for (const auto& s : run_invariant_suites(p, c_inv.seed.value_or(1))) {
          ok = ok && s.passed();
          t.rows.push_back({std::to_string(p), s.name, std::to_string(s.cases), std::to_string(s.failures), s.first_failure});
        }
      }
      write_output(c_inv, t.render(parse_format(c_inv.format)));
      return ok ? 0 : 2;
    }

    if (pin->parsed()) {
      const FieldSpec fs(c_pin.prime.value_or(31));
      const auto f = parse_poly(pin_poly);
      Table t{{"trial", "size", "pin", "values", "ratio", "violated", "distinct"}, {}};
      for (std::size_t trial = 0; trial < c_pin.trials.value_or(1); ++trial) {
        Rng rng = Rng::substream(c_pin.seed.value_or(1), 0, trial);
        const auto e = random_points(fs, rng, pin_points, 2);
        const auto r = pinned_distance_best(e, f, {!pin_any_p});
        t.rows.push_back({std::to_string(trial), std::to_string(e.size()), r.pin.to_string(),
                          std::to_string(r.values.size()), detail::fixed6(r.ratio), detail::join(r.violated, "; "),
                          values_string(r.values)});
      }
      write_output(c_pin, t.render(parse_format(c_pin.format)));
      return 0;
    }

    if (img->parsed()) {
      const FieldSpec fs(c_img.prime.value_or(31));
      const auto f = parse_poly(img_poly);
      Table t{{"trial", "size_e", "size_f", "image", "sumset", "pruned", "axis_condition", "incidences", "target",
               "bound", "violated"},
              {}};
      for (std::size_t trial = 0; trial < c_img.trials.value_or(1); ++trial) {
        Rng rng = Rng::substream(c_img.seed.value_or(1), 0, trial);
        const auto e = random_points(fs, rng, img_e, 2);
        const auto fset = random_points(fs, rng, img_f, 2);
        const auto r = polynomial_image_check(e, fset, f);
        t.rows.push_back({std::to_string(trial), std::to_string(e.size()), std::to_string(fset.size()),
                          std::to_string(r.image.size()), std::to_string(r.sumset.size()), std::to_string(r.pruned.size()),
                          r.axis_condition ? "true" : "false", std::to_string(r.incidences), std::to_string(r.target),
                          to_decimal_string(r.bound.total), detail::join(r.hypotheses.violated, "; ")});
      }
      write_output(c_img, t.render(parse_format(c_img.format)));
      return 0;
    }

    if (dist->parsed()) {
      const FieldSpec fs(c_dist.prime.value_or(11));
      Table t{{"trial", "size_e", "size_f", "d", "distances", "best_pin", "pinned"}, {}};
      for (std::size_t trial = 0; trial < c_dist.trials.value_or(1); ++trial) {
        Rng rng = Rng::substream(c_dist.seed.value_or(1), 0, trial);
        const auto e = random_points(fs, rng, dist_e, dist_d);
        const auto fset = random_points(fs, rng, dist_f, dist_d);
        const auto r = distance_set(e, fset, dist_d);
        t.rows.push_back({std::to_string(trial), std::to_string(e.size()), std::to_string(fset.size()),
                          std::to_string(dist_d), std::to_string(r.values.size()),
                          r.best_pin ? r.best_pin->to_string() : "", std::to_string(r.best_pinned.size())});
      }
      write_output(c_dist, t.render(parse_format(c_dist.format)));
      return 0;
    }

    if (beck->parsed()) {
      const FieldSpec fs(c_beck.prime.value_or(31));
      Table t{{"trial", "size", "max_collinear", "conics", "gp_five_tuples", "gp_product", "lower_bound", "notes"}, {}};
      for (std::size_t trial = 0; trial < c_beck.trials.value_or(1); ++trial) {
        Rng rng = Rng::substream(c_beck.seed.value_or(1), 0, trial);
        const auto pts = random_points(fs, rng, beck_points, 2);
        const auto r = beck_conic_count(pts);
        t.rows.push_back({std::to_string(trial), std::to_string(pts.size()), std::to_string(r.max_collinear),
                          std::to_string(r.conic_count), std::to_string(r.gp_five_tuples), to_decimal_string(r.gp_product),
                          to_decimal_string(r.lower_bound_value), detail::join(r.notes, "; ")});
      }
      write_output(c_beck, t.render(parse_format(c_beck.format)));
      return 0;
    }

    if (bench->parsed()) {
      const FieldSpec fs(c_bench.prime.value_or(2147483647ULL));
      Rng rng(c_bench.seed.value_or(1));
      const auto pts = random_points(fs, rng, bench_points, 2);
      const auto fam = detail::random_family(rng, fs, FamilyKind::Conics, bench_curves, 2);
      Table t{{"threads", "points", "curves", "incidences", "ms", "speedup", "identical"}, {}};
      std::optional<double> base;
      std::optional<std::vector<std::uint32_t>> reference;
      for (auto th : bench_threads) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto counts = per_curve_incidences(pts, fam, {Engine::Packed, th});
        const double ms = ms_since(t0);
        if (!base) base = ms;
        if (!reference) reference = counts;
        std::uint64_t total = 0;
        for (auto x : counts) total += x;
        t.rows.push_back({std::to_string(th), std::to_string(pts.size()), std::to_string(fam.size()), std::to_string(total),
                          c_bench.no_timing ? "" : fmt_ms(ms), c_bench.no_timing ? "" : fmt_ms(*base / ms),
                          counts == *reference ? "true" : "false"});
      }
      write_output(c_bench, t.render(parse_format(c_bench.format)));
      return 0;
    }
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
