#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hfcfdt/harness/config.hpp"
#include "hfcfdt/harness/geometry.hpp"
#include "hfcfdt/harness/report.hpp"
#include "hfcfdt/harness/scenario.hpp"
#include "hfcfdt/training.hpp"
#include "oracles.hpp"

using namespace hfcfdt;
using namespace hfcfdt::harness;

namespace {

RunSetup default_setup(double duration = 12.0) {
  auto doc = ConfigDocument::parse("[scenario]\nduration = " + std::to_string(duration) + "\n");
  return load_run_setup(doc);
}

fdt::FuzzyDecisionTree uniform_tree(fdt::ControlRule rule) {
  training::PartitionSpec spec;
  spec.ground = {0.8, 0.9, 1.1, 1.2};
  spec.length = {{{0.9, 1.1}, {0.9, 1.1}, {0.9, 1.1}}};
  auto t = training::tree_skeleton(spec);
  t.leaves.fill(rule);
  t.trained = true;
  return t;
}

std::string csv(const TrajectoryLog& log) {
  std::ostringstream ss;
  write_trajectory(ss, log);
  return ss.str();
}

}  // namespace

TEST(Geometry, WrapAngle) {
  EXPECT_NEAR(wrap_angle(3 * M_PI), M_PI, 1e-12);
  EXPECT_NEAR(wrap_angle(-M_PI), M_PI, 1e-12);
  EXPECT_NEAR(wrap_angle(0.5 - 4 * M_PI), 0.5, 1e-12);
}

TEST(Geometry, SeparatingAxisMatchesSamplingOracle) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> pos(-3, 3), half(0.2, 2.0), ang(-M_PI, M_PI);
  int overlapping = 0;
  for (int i = 0; i < 1000; ++i) {
    const oracle::Rect a{pos(rng), pos(rng), half(rng), half(rng), ang(rng)};
    const oracle::Rect b{pos(rng), pos(rng), half(rng), half(rng), ang(rng)};
    const OrientedRect ra{{a.cx, a.cy}, a.hl, a.hw, a.angle};
    const OrientedRect rb{{b.cx, b.cy}, b.hl, b.hw, b.angle};
    const bool got = overlaps(ra, rb);
    ASSERT_EQ(got, oracle::sampled_overlap(a, b)) << i << " separation " << separation(ra, rb);
    overlapping += got;
  }
  // Both outcomes are exercised.
  EXPECT_GT(overlapping, 100);
  EXPECT_LT(overlapping, 900);
}

TEST(Geometry, TouchingCountsAsOverlap) {
  const auto a = OrientedRect::axis_aligned(0, 0, 1, 1);
  const auto b = OrientedRect::axis_aligned(1, 0, 2, 1);
  EXPECT_TRUE(overlaps(a, b));
  EXPECT_FALSE(overlaps(a, OrientedRect::axis_aligned(1.01, 0, 2, 1)));
  EXPECT_NEAR(separation(a, OrientedRect::axis_aligned(1.25, 0, 2, 1)), 0.25, 1e-12);
}

TEST(Geometry, PolylineQueries) {
  const Polyline p({{0, 0}, {1, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(p.length(), 2.0);
  EXPECT_EQ(p.point_at(1.5), (Vec2{1, 0.5}));
  EXPECT_EQ(p.point_at(2.5), (Vec2{1, 1.5}));  // extrapolates
  EXPECT_EQ(p.tangent_at(0.5), (Vec2{1, 0}));
  EXPECT_NEAR(p.project({0.5, 0.3}, 0, 2), 0.5, 1e-12);
  // Window excludes the first leg: nearest admissible point is (1, 0.3).
  EXPECT_NEAR(p.project({0.5, 0.3}, 1.2, 2), 1.3, 1e-12);
  EXPECT_NEAR(p.project({0.5, 0.1}, 1.2, 2), 1.2, 1e-12);
  EXPECT_NEAR(p.distance_to({2, 0.5}), 1.0, 1e-12);
  EXPECT_THROW(Polyline({{0, 0}}), ConfigError);
  EXPECT_THROW(Polyline({{0, 0}, {0, 0}}), ConfigError);
}

TEST(ScenarioLayout, PathEndsAtTargetAndFitsSlot) {
  const auto s = default_setup().scenario;
  const auto end = s.path.points().back();
  EXPECT_NEAR(end.x, s.target.x, 1e-9);
  EXPECT_NEAR(end.y, s.target.y, 1e-9);
  EXPECT_EQ(s.path.points().front(), (Vec2{s.start.x, s.start.y}));
  const auto body = s.body.at(s.target.x, s.target.y, s.target.theta);
  for (const auto& c : body.corners()) EXPECT_TRUE(s.slot.contains(c));
  EXPECT_FALSE(overlaps(body, s.rear_neighbor));
  EXPECT_FALSE(overlaps(body, s.front_neighbor));
  // The reference path itself is collision-free.
  for (double t = 0; t <= s.path.length(); t += 0.05) {
    const auto p = s.path.point_at(t);
    const auto d = s.path.tangent_at(t);
    const auto b = s.body.at(p.x, p.y, std::atan2(-d.y, -d.x));
    ASSERT_FALSE(overlaps(b, s.rear_neighbor)) << t;
    ASSERT_FALSE(overlaps(b, s.front_neighbor)) << t;
  }
}

TEST(ScenarioLayout, Validation) {
  Scenario s;
  s.record_interval = 0.2;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.control_dt = 0.03;  // 0.1 is not a multiple
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.duration = 12.05;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.geometry.slot_length = 4.0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Run, RowCountAndExactGrid) {
  const auto setup = default_setup(12.0);
  const auto log = run_scenario(Controller::Fbos, setup);
  ASSERT_EQ(log.rows.size(), 121u);
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    EXPECT_EQ(log.rows[k].index, k);
    EXPECT_EQ(log.rows[k].t, static_cast<double>(k) / 10.0);
  }
  const auto text = csv(log);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x,y,theta,v,phi,p_motor,v_servo,delta_motor,delta_servo");
  EXPECT_NE(text.find("\n12.0,"), std::string::npos);
  EXPECT_NE(text.find("\n0.3,"), std::string::npos);
  EXPECT_EQ(grid_time(0), "0.0");
  EXPECT_EQ(grid_time(314), "31.4");
}

TEST(Run, SameSeedSameBytes) {
  const auto setup = default_setup(8.0);
  EXPECT_EQ(csv(run_scenario(Controller::Fbos, setup)), csv(run_scenario(Controller::Fbos, setup)));
  auto other = setup;
  other.scenario.seed = setup.scenario.seed + 1;
  EXPECT_NE(csv(run_scenario(Controller::Fbos, setup)), csv(run_scenario(Controller::Fbos, other)));
}

TEST(Run, NeutralTreeReproducesFbos) {
  auto setup = default_setup(60.0);
  setup.plant.mu = 0.6;
  setup.plant.wheelbase = 3.5;
  const auto tree = uniform_tree({1.0, 1.0});
  const auto fbos = run_scenario(Controller::Fbos, setup);
  const auto fdt = run_scenario(Controller::HfcFdt, setup, &tree);
  EXPECT_EQ(csv(fbos), csv(fdt));
  EXPECT_TRUE(fdt.indicators.has_value());
  EXPECT_FALSE(fbos.indicators.has_value());
}

TEST(Run, SupervisorScalesAreLogged) {
  const auto setup = default_setup(2.0);
  const auto tree = uniform_tree({1.3, 0.9});
  const auto log = run_scenario(Controller::HfcFdt, setup, &tree);
  for (const auto& r : log.rows) {
    EXPECT_NEAR(r.delta_motor, 1.3, 1e-9);
    EXPECT_NEAR(r.delta_servo, 0.9, 1e-9);
  }
}

TEST(Run, HfcFdtNeedsTree) { EXPECT_THROW(run_scenario(Controller::HfcFdt, default_setup()), ConfigError); }

TEST(Run, NominalParksForAllControllers) {
  const auto setup = default_setup(60.0);
  const auto tree = uniform_tree({1.0, 1.0});
  const auto cmp = compare(setup, tree);
  for (Controller c : kAllControllers) {
    EXPECT_TRUE(cmp[c].metrics.parked) << to_string(c);
    EXPECT_FALSE(cmp[c].metrics.collision) << to_string(c);
  }
}

TEST(Metrics, ErrorsAgainstTarget) {
  const auto sc = default_setup().scenario;
  TrajectoryLog log;
  log.rows.push_back({0, 0.0, sc.target.x, sc.target.y, sc.target.theta});
  auto m = compute_metrics(log, sc);
  EXPECT_EQ(m.final_position_error, 0.0);
  EXPECT_EQ(m.final_heading_error, 0.0);
  EXPECT_TRUE(m.parked);
  EXPECT_EQ(m.time_to_park, 0.0);

  log.rows[0].x += 0.1;
  m = compute_metrics(log, sc);
  EXPECT_NEAR(m.final_position_error, 0.1, 1e-12);
  EXPECT_EQ(m.final_heading_error, 0.0);
}

TEST(Metrics, TimeToParkIsStartOfFinalStay) {
  const auto sc = default_setup().scenario;
  TrajectoryLog log;
  const double x = sc.target.x, y = sc.target.y;
  log.rows = {{0, 0.0, x, y}, {1, 0.1, x + 1, y}, {2, 0.2, x + 0.01, y}, {3, 0.3, x, y}};
  const auto m = compute_metrics(log, sc);
  ASSERT_TRUE(m.time_to_park.has_value());
  EXPECT_EQ(*m.time_to_park, 0.2);
  EXPECT_NEAR(m.path_length, 1.0 + 0.99 + 0.01, 1e-12);
}

TEST(Metrics, CollisionAgreesWithRectangleOracle) {
  const auto sc = default_setup().scenario;
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> xs(-2, 10), ys(-1, 5), th(-1, 1);
  for (int i = 0; i < 300; ++i) {
    TrajectoryLog log;
    const double x = xs(rng), y = ys(rng), t = th(rng);
    log.rows = {{0, 0.0, x, y, t}, {1, 0.1, sc.target.x, sc.target.y, 0.0}};
    const auto m = compute_metrics(log, sc);
    const auto b = sc.body.at(x, y, t);
    const oracle::Rect body{b.center.x, b.center.y, b.half_length, b.half_width, b.angle};
    const auto& rn = sc.rear_neighbor;
    const auto& fn = sc.front_neighbor;
    const bool want = oracle::sampled_overlap(body, {rn.center.x, rn.center.y, rn.half_length, rn.half_width, 0}) ||
                      oracle::sampled_overlap(body, {fn.center.x, fn.center.y, fn.half_length, fn.half_width, 0});
    ASSERT_EQ(m.collision, want) << x << "," << y << "," << t;
    if (m.collision) {
      EXPECT_FALSE(m.time_to_park.has_value());
      EXPECT_FALSE(m.parked);
    }
  }
}

TEST(Config, ParsesAllValueKinds) {
  const auto doc = ConfigDocument::parse(
      "seed = 12 # trailing comment\n"
      "[grid]\n"
      "mu = [0.5, 1.0, 1.5]\n"
      "name = \"test\"\n"
      "flag = true\n");
  EXPECT_EQ(doc.unsigned_integer("seed", 0), 12u);
  EXPECT_EQ(doc.numbers("grid.mu", {}), (std::vector<double>{0.5, 1.0, 1.5}));
  EXPECT_EQ(doc.string("grid.name", ""), "test");
  EXPECT_TRUE(doc.boolean("grid.flag", false));
  EXPECT_EQ(doc.number("grid.missing", 4.5), 4.5);
}

TEST(Config, Errors) {
  EXPECT_THROW(ConfigDocument::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("[broken\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("just text\n"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("x = 1.2.3\n"), ConfigError);
  EXPECT_THROW(load_run_setup(ConfigDocument::parse("[geometry]\nslot_lenght = 7\n")), ConfigError);
  EXPECT_THROW(load_run_setup(ConfigDocument::parse("[plant]\nmu = \"low\"\n")), ConfigError);
  EXPECT_THROW(load_run_setup(ConfigDocument::parse("[plant]\nmu = -1\n")), ConfigError);
  EXPECT_THROW(load_run_setup(ConfigDocument::parse("seed = -4\n")), ConfigError);
  EXPECT_THROW(load_run_setup(ConfigDocument::parse("[scenario]\nrecord_interval = 0.05\n")), ConfigError);
  EXPECT_THROW(load_grid_setup(ConfigDocument::parse("[grid]\nmu = [1.0]\n")), ConfigError);
  EXPECT_THROW(ConfigDocument::load("/nonexistent/file.toml"), ConfigError);
}

TEST(Config, ErrorNamesLine) {
  try {
    ConfigDocument::parse("a = 1\n\nb = oops\n", "f.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("f.toml:3"), std::string::npos);
  }
}

TEST(Config, ShippedFilesLoad) {
  const std::string root = HFCFDT_SOURCE_DIR;
  const auto nominal = load_run_setup(root + "/configs/scenario.toml");
  const auto stress = load_run_setup(root + "/configs/stress.toml");
  EXPECT_DOUBLE_EQ(stress.plant.mu, 0.6 * nominal.plant.mu_nominal);
  EXPECT_DOUBLE_EQ(stress.plant.wheelbase, 1.4 * nominal.plant.wheelbase_nominal);
  // Defaults in code and the documented nominal file agree.
  const auto defaults = default_setup(60.0);
  EXPECT_EQ(nominal.scenario.path.points(), defaults.scenario.path.points());
  EXPECT_EQ(nominal.plant.k_v, defaults.plant.k_v);
  const auto grid = load_grid_setup(root + "/configs/plant_grid.toml");
  EXPECT_EQ(grid.grid.mu_values.size(), 6u);
  EXPECT_EQ(grid.grid.wheelbase_values.size(), 6u);
}

TEST(Report, MetricsAndOverlay) {
  const auto setup = default_setup(4.0);
  const auto cmp = compare(setup, uniform_tree({1.1, 1.1}));
  std::ostringstream m, svg;
  write_metrics(m, cmp);
  EXPECT_EQ(m.str().substr(0, m.str().find('\n')), kMetricsHeader);
  EXPECT_NE(m.str().find("\nhfcfdt,"), std::string::npos);
  write_overlay(svg, setup.scenario, cmp);
  const auto s = svg.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  for (const char* id : {"id=\"fbos\"", "id=\"hfc\"", "id=\"hfcfdt\""}) EXPECT_NE(s.find(id), std::string::npos);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}
