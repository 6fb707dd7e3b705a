#include <gtest/gtest.h>

#include "json.hpp"
#include <sstream>

#include "support.hpp"

using namespace fpinc;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.prime = 31;
  cfg.seed = 7;
  cfg.trials = 3;
  cfg.points = 80;
  cfg.family_count = 60;
  cfg.bounds = {"thm1.1", "eq4"};
  return cfg;
}

}  // namespace

TEST(Rng, BelowStaysInRangeAndSubstreamsDiffer) {
  auto a = Rng::substream(1, 0, 0), b = Rng::substream(1, 0, 1), c = Rng::substream(1, 0, 0);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.below(1000), y = b.below(1000), z = c.below(1000);
    EXPECT_LT(x, 1000u);
    EXPECT_EQ(x, z);
    differ = differ || x != y;
  }
  EXPECT_TRUE(differ);
  EXPECT_THROW((void)a.below(0), usage_error);
}

TEST(Generate, CartesianSize) {
  ExperimentConfig cfg;
  cfg.prime = 7;
  cfg.generator = GeneratorKind::CartesianProduct;
  cfg.size_a = 3;
  cfg.size_b = 4;
  const auto inst = generate(cfg);
  EXPECT_EQ(inst.points.size(), 12u);
  ASSERT_TRUE(inst.cartesian.has_value());
  EXPECT_EQ(*inst.cartesian, std::make_pair(std::size_t{3}, std::size_t{4}));
}

TEST(Generate, Deterministic) {
  const auto cfg = small_config();
  const auto a = generate(cfg, 2), b = generate(cfg, 2);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.curves, b.curves);
  EXPECT_EQ(a.descriptor, b.descriptor);
  EXPECT_NE(generate(cfg, 1).points, a.points);
}

TEST(Generate, CircleFamilyInvariants) {
  ExperimentConfig cfg;
  cfg.prime = 31;
  cfg.family = FamilyKind::Circles;
  cfg.family_count = 100;
  const auto inst = generate(cfg);
  const auto& circles = inst.curves.as<CircleSpec>();
  EXPECT_EQ(circles.size(), 100u);
  for (const auto& c : circles) EXPECT_FALSE(c.r.is_zero());
  EXPECT_LE(std::set<CircleSpec>(circles.begin(), circles.end()).size(), 100u);
}

TEST(Generate, OtherGenerators) {
  ExperimentConfig cfg;
  cfg.prime = 31;
  cfg.generator = GeneratorKind::OnCurve;
  cfg.curve = "parabola:1,0,0";
  cfg.points = 20;
  for (const auto& pt : generate(cfg).points) EXPECT_EQ(pt.y(), pt.x() * pt.x());

  cfg.generator = GeneratorKind::CosetLike;
  cfg.coset_order = 5;
  cfg.coset_shift_a = 1;
  cfg.coset_shift_b = 3;
  const auto inst = generate(cfg);
  EXPECT_EQ(inst.points.size(), 25u);
  for (const auto& pt : inst.points) {
    EXPECT_EQ(pt.x().pow(5).value(), 1u);
    EXPECT_EQ((pt.y() * invert(FieldSpec(31).elem(3))).pow(5).value(), 1u);
  }

  cfg.generator = GeneratorKind::RandomUniform;
  cfg.dim = 3;
  cfg.family = FamilyKind::Spheres;
  cfg.points = 40;
  const auto sph = generate(cfg);
  EXPECT_EQ(sph.points.dim(), 3u);
  EXPECT_EQ(sph.curves.kind(), CurveKind::Spheres);
}

TEST(Generate, FamilyExponentScalesCount) {
  ExperimentConfig cfg;
  cfg.prime = 101;
  cfg.generator = GeneratorKind::CartesianProduct;
  cfg.size_a = cfg.size_b = 3;
  cfg.family = FamilyKind::CartesianConics;
  cfg.family_exponent = 2.5;
  EXPECT_EQ(generate(cfg).curves.size(), 243u);
}

TEST(Generate, RequestsBeyondPopulationRejected) {
  ExperimentConfig cfg;
  cfg.prime = 5;
  cfg.points = 26;
  EXPECT_THROW((void)generate(cfg), usage_error);
  cfg.points = 25;
  EXPECT_EQ(generate(cfg).points.size(), 25u);
  cfg.generator = GeneratorKind::CartesianProduct;
  cfg.size_a = 6;
  EXPECT_THROW((void)generate(cfg), usage_error);
}

TEST(Run, ZeroTrialsIsEmpty) {
  auto cfg = small_config();
  cfg.trials = 0;
  EXPECT_TRUE(run(cfg).rows.empty());
  const auto csv = emit(run(cfg), Format::Csv, false);
  EXPECT_EQ(parse_csv(csv).size(), 1u);
}

TEST(Run, IncidencesMatchNaiveRecount) {
  auto cfg = small_config();
  cfg.trials = 1;
  const auto rep = run(cfg);
  ASSERT_EQ(rep.rows.size(), 1u);
  const auto inst = generate(cfg, 0);
  std::uint64_t naive = 0;
  for (const auto& q : inst.curves.as<Conic>())
    for (const auto& pt : inst.points) naive += q.contains(pt);
  EXPECT_EQ(rep.rows[0].incidences, naive);
  ASSERT_EQ(rep.rows[0].bounds.size(), 2u);
  EXPECT_EQ(rep.rows[0].bounds[0].name, "thm1.1");
  EXPECT_EQ(rep.rows[0].bounds[0].ratio.has_value(), rep.rows[0].bounds[0].applicable);
}

TEST(Run, SweepShape) {
  ExperimentConfig cfg;
  cfg.prime = 101;
  cfg.generator = GeneratorKind::CartesianProduct;
  cfg.size_a_sweep = {4, 8, 16};
  cfg.size_b = 16;
  cfg.trials = 2;
  cfg.family_count = 20;
  const auto rep = run(cfg);
  ASSERT_EQ(rep.rows.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(rep.rows[i].size_a, cfg.size_a_sweep[i / 2]);
    EXPECT_EQ(rep.rows[i].trial, i % 2);
    EXPECT_EQ(rep.rows[i].points, cfg.size_a_sweep[i / 2] * 16);
  }
}

TEST(Run, ParallelMatchesSerial) {
  auto cfg = small_config();
  cfg.trials = 9;
  const auto serial = emit(run(cfg), Format::Csv, false);
  cfg.threads = 4;
  EXPECT_EQ(emit(run(cfg), Format::Csv, false), serial);
  cfg.threads = 3;
  EXPECT_EQ(emit(run(cfg), Format::Json, false), [&] {
    auto c = cfg;
    c.threads = 1;
    return emit(run(c), Format::Json, false);
  }());
}

TEST(Run, ErrorsInWorkersPropagate) {
  ExperimentConfig cfg;
  cfg.prime = 5;
  cfg.points = 26;
  cfg.trials = 4;
  cfg.threads = 2;
  EXPECT_THROW((void)run(cfg), usage_error);
}

TEST(Emit, CsvRoundTrip) {
  auto cfg = small_config();
  cfg.trials = 1;
  const auto rep = run(cfg);
  const auto rows = parse_csv(emit(rep, Format::Csv, true));
  ASSERT_EQ(rows.size(), 2u);
  const auto& h = rows[0];
  const auto& r = rows[1];
  ASSERT_EQ(h.size(), r.size());
  EXPECT_EQ(h.front(), "trial");
  EXPECT_EQ(h.back(), "wall_ms");
  const auto col = [&](const std::string& name) {
    const auto it = std::find(h.begin(), h.end(), name);
    EXPECT_NE(it, h.end()) << name;
    return r[static_cast<std::size_t>(it - h.begin())];
  };
  const auto& row = rep.rows[0];
  EXPECT_EQ(col("instance"), row.instance);
  EXPECT_EQ(col("incidences"), std::to_string(row.incidences));
  EXPECT_EQ(col("histogram"), row.histogram);
  EXPECT_EQ(col("thm1.1.value"), to_decimal_string(row.bounds[0].value));
  EXPECT_EQ(col("thm1.1.applicable"), row.bounds[0].applicable ? "true" : "false");
  if (row.bounds[0].ratio) {
    const auto ratio = col("thm1.1.ratio");
    ASSERT_NE(ratio.find('.'), std::string::npos);
    EXPECT_EQ(ratio.size() - ratio.find('.') - 1, 6u);
  }
}

TEST(Emit, CsvQuoting) {
  Report rep;
  rep.bounds = {};
  ReportRow row;
  row.instance = "a,\"b\"\nc";
  row.histogram = "1:2";
  rep.rows.push_back(row);
  const auto text = emit(rep, Format::Csv, false);
  EXPECT_NE(text.find("\"a,\"\"b\"\"\nc\""), std::string::npos);
  const auto rows = parse_csv(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][2], row.instance);
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Emit, JsonParsesStrictly) {
  auto cfg = small_config();
  cfg.trials = 2;
  const auto text = emit(run(cfg), Format::Json, true);
  const auto j = nlohmann::json::parse(text);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 2u);
  EXPECT_TRUE(j[0].contains("incidences"));
  EXPECT_TRUE(j[0].contains("wall_ms"));
  EXPECT_EQ(j[0]["bounds"][0]["bound"], "thm1.1");
  EXPECT_EQ(nlohmann::json::parse(emit(Report{}, Format::Json)).size(), 0u);
  EXPECT_THROW((void)parse_format("xml"), usage_error);
}

TEST(Emit, DeterministicWithoutTiming) {
  auto cfg = small_config();
  EXPECT_EQ(emit(run(cfg), Format::Csv, false), emit(run(cfg), Format::Csv, false));
}

TEST(Config, ParsesKeyValueText) {
  ExperimentConfig cfg;
  std::istringstream in(
      "# comment\n"
      "prime = 211\n"
      "seed=9  # trailing\n"
      "generator = cartesian\n"
      "size_a_sweep = 4, 8\n"
      "family = circles\n"
      "bounds = thm1.3,eq5\n"
      "\n");
  load_config(cfg, in);
  EXPECT_EQ(cfg.prime, 211u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.generator, GeneratorKind::CartesianProduct);
  EXPECT_EQ(cfg.size_a_sweep, (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(cfg.family, FamilyKind::Circles);
  EXPECT_EQ(cfg.bounds, (std::vector<std::string>{"thm1.3", "eq5"}));
}

TEST(Config, Errors) {
  ExperimentConfig cfg;
  EXPECT_THROW(cfg.set("nosuch", "1"), usage_error);
  EXPECT_THROW(cfg.set("prime", "abc"), usage_error);
  EXPECT_THROW(cfg.set("bounds", "thm1.1,nosuch"), usage_error);
  EXPECT_THROW(cfg.set("generator", "fractal"), usage_error);
  std::istringstream bad("prime\n");
  EXPECT_THROW(load_config(cfg, bad), usage_error);
  ExperimentConfig v;
  v.prime = 9;
  EXPECT_THROW(v.validate(), usage_error);
  v.prime = 7;
  v.generator = GeneratorKind::CosetLike;
  v.coset_order = 4;
  EXPECT_THROW(v.validate(), usage_error);
  EXPECT_THROW(load_config_file(v, "/nonexistent/fpinc.cfg"), usage_error);
}
