#pragma once

// Closed-loop parallel-parking runs under FBOS (base controller alone), HFC
// (base controller + decoupled supervisor) and HFC-FDT (base controller +
// decision-tree supervisor), plus the metrics used to compare them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hfcfdt/base_controller.hpp"
#include "hfcfdt/errors.hpp"
#include "hfcfdt/fdt_supervisor.hpp"
#include "hfcfdt/harness/geometry.hpp"
#include "hfcfdt/plant.hpp"
#include "hfcfdt/training.hpp"

namespace hfcfdt::harness {

enum class Controller { Fbos, Hfc, HfcFdt };

inline constexpr std::array<Controller, 3> kAllControllers = {Controller::Fbos, Controller::Hfc, Controller::HfcFdt};

constexpr std::string_view to_string(Controller c) noexcept {
  switch (c) {
    case Controller::Fbos: return "fbos";
    case Controller::Hfc: return "hfc";
    case Controller::HfcFdt: return "hfcfdt";
  }
  return "?";
}

inline Controller parse_controller(std::string_view s) {
  for (Controller c : kAllControllers) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown controller '" + std::string(s) + "' (expected fbos, hfc or hfcfdt)");
}

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Slot row along the curb (y = 0 .. slot_depth); the target slot spans
/// x = 0 .. slot_length with one neighbour slot on each side. The vehicle
/// starts in the lane beside the front neighbour and reverses in.
struct ParkingGeometry {
  double slot_length = 7.0;      // m
  double slot_depth = 2.4;       // m
  double lane_gap = 1.0;         // m, slot edge to vehicle side at the start
  double approach_length = 2.0;  // m, initial straight reverse
  double arc_radius = 6.0;       // m, turn-in arc
  double counter_radius = 4.35;  // m, straightening arc
  double final_straight = 0.6;   // m
  double rear_gap = 0.2;         // m, rear neighbour to rear bumper at the target
  double path_spacing = 0.02;    // m, polyline resolution on arcs
};

struct ControlTuning {
  double lookahead = 1.0;        // m, preview distance along the path (0 = plain cross-track)
  double e_max = 0.3;            // m, lateral preview error mapped to |e| = 1
  double edot_max = 0.1;         // 1/s, normalised error rate mapped to |edot| = 1
  double speed_edot_max = 2.0;   // 1/s, normalised speed-error rate mapped to |edot| = 1
  double rate_filter = 0.1;      // s, low-pass time constant of the error derivatives
  double stop_lead_time = 0.5;   // s, power is cut when remaining path <= v * lead time
};

struct ParkTolerance {
  double position = 0.15;    // m
  double heading_deg = 5.0;  // deg

  double heading_rad() const noexcept { return heading_deg * 3.14159265358979323846 / 180.0; }
};

struct VehicleBody {
  double length = 4.2;
  double width = 1.7;
  double rear_overhang = 0.8;

  /// Body rectangle for a rear-axle pose.
  OrientedRect at(double x, double y, double theta) const noexcept {
    const double ahead = 0.5 * length - rear_overhang;
    return {{x + ahead * std::cos(theta), y + ahead * std::sin(theta)}, 0.5 * length, 0.5 * width, theta};
  }
};

inline constexpr double kRecordInterval = 0.1;

struct Scenario {
  ParkingGeometry geometry;
  ControlTuning control;
  ParkTolerance tolerance;
  VehicleBody body;
  double duration = 60.0;           // s
  double record_interval = kRecordInterval;
  double control_dt = 0.01;         // s
  std::uint64_t seed = 0;
  double jitter_lateral = 0.05;     // m, uniform initial-pose offset amplitude
  double jitter_heading = 0.01;     // rad

  // Derived by build().
  Polyline path;
  Pose start;
  Pose target;
  OrientedRect slot;
  OrientedRect rear_neighbor;
  OrientedRect front_neighbor;

  /// Integer number of control ticks per log row.
  std::size_t decimation() const {
    const double ratio = record_interval / control_dt;
    const double r = std::round(ratio);
    if (!(r >= 1.0) || std::abs(ratio - r) > 1e-9) {
      throw ConfigError("record interval must be an integer multiple of the control period");
    }
    return static_cast<std::size_t>(r);
  }

  std::size_t record_count() const {
    const double ratio = duration / record_interval;
    const double r = std::round(ratio);
    if (!(r >= 1.0) || std::abs(ratio - r) > 1e-9) {
      throw ConfigError("duration must be a positive multiple of the record interval");
    }
    return static_cast<std::size_t>(r);
  }

  void validate() const {
    if (std::abs(record_interval - kRecordInterval) > 1e-12) throw ConfigError("record interval is fixed at 0.1 s");
    if (!(control_dt > 0.0 && control_dt <= 0.05)) throw ConfigError("control_dt must be in (0, 0.05] s");
    decimation();
    record_count();
    const auto& g = geometry;
    if (!(g.slot_length > body.length && g.slot_depth > body.width)) {
      throw ConfigError("parking slot is too small for the vehicle body");
    }
    if (!(g.arc_radius > 0.0 && g.counter_radius > 0.0 && g.approach_length >= 0.0 && g.final_straight >= 0.0 &&
          g.lane_gap >= 0.0 && g.path_spacing > 0.0 && g.rear_gap >= 0.0)) {
      throw ConfigError("parking geometry values must be non-negative");
    }
    if (g.rear_gap + body.length > g.slot_length) throw ConfigError("target pose leaves the vehicle outside the slot");
    const auto& c = control;
    if (!(c.lookahead >= 0.0 && c.e_max > 0.0 && c.edot_max > 0.0 && c.speed_edot_max > 0.0 && c.rate_filter >= 0.0 &&
          c.stop_lead_time >= 0.0)) {
      throw ConfigError("control tuning values must be positive");
    }
    if (!(tolerance.position > 0.0 && tolerance.heading_deg > 0.0)) throw ConfigError("park tolerances must be > 0");
  }

  /// Lays out the slots and the reference path: reverse straight, turn-in
  /// arc toward the curb, counter-arc that straightens, short final straight.
  void build() {
    const auto& g = geometry;
    target = {g.rear_gap + body.rear_overhang, 0.5 * g.slot_depth, 0.0};
    const double y_start = g.slot_depth + g.lane_gap + 0.5 * body.width;
    const double dy = y_start - target.y;
    const double R1 = g.arc_radius;
    const double R2 = g.counter_radius;
    if (!(dy > 0.0 && dy < 2.0 * (R1 + R2))) throw ConfigError("arc radii cannot produce the required lateral shift");
    const double alpha = std::acos(1.0 - dy / (R1 + R2));
    const double x_b = target.x + g.final_straight + (R1 + R2) * std::sin(alpha);
    const Vec2 a{x_b + g.approach_length, y_start};
    const Vec2 b{x_b, y_start};

    std::vector<Vec2> pts;
    auto push = [&pts](Vec2 p) {
      if (pts.empty() || norm(p - pts.back()) > 1e-9) pts.push_back(p);
    };
    auto segments = [&](double len) {
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / g.path_spacing)));
    };
    const auto straight_n = segments(g.approach_length);
    for (std::size_t i = 0; i <= straight_n; ++i) {
      push(a + (static_cast<double>(i) / static_cast<double>(straight_n)) * (b - a));
    }
    constexpr double kHalfPi = 1.57079632679489661923;
    const Vec2 c1{x_b, y_start - R1};
    const auto n1 = segments(R1 * alpha);
    for (std::size_t i = 1; i <= n1; ++i) {
      const double ang = kHalfPi + alpha * static_cast<double>(i) / static_cast<double>(n1);
      push(c1 + R1 * Vec2{std::cos(ang), std::sin(ang)});
    }
    const Vec2 c2 = c1 + (R1 + R2) * Vec2{-std::sin(alpha), std::cos(alpha)};
    const auto n2 = segments(R2 * alpha);
    for (std::size_t i = 1; i <= n2; ++i) {
      const double ang = (alpha - kHalfPi) - alpha * static_cast<double>(i) / static_cast<double>(n2);
      push(c2 + R2 * Vec2{std::cos(ang), std::sin(ang)});
    }
    const Vec2 p2 = pts.back();
    const Vec2 t{target.x, target.y};
    const auto final_n = segments(norm(t - p2));
    for (std::size_t i = 1; i <= final_n; ++i) {
      push(p2 + (static_cast<double>(i) / static_cast<double>(final_n)) * (t - p2));
    }
    path = Polyline(std::move(pts));
    start = {a.x, a.y, 0.0};

    slot = OrientedRect::axis_aligned(0.0, 0.0, g.slot_length, g.slot_depth);
    rear_neighbor = OrientedRect::axis_aligned(-g.slot_length, 0.0, 0.0, g.slot_depth);
    front_neighbor = OrientedRect::axis_aligned(g.slot_length, 0.0, 2.0 * g.slot_length, g.slot_depth);
  }
};

struct TrajectoryRow {
  std::size_t index = 0;  // t = index / 10 (exact decimal on the 0.1 s grid)
  double t = 0.0;
  double x = 0.0, y = 0.0, theta = 0.0, v = 0.0, phi = 0.0;
  double p_motor = 0.0, v_servo = 0.0;
  double delta_motor = 1.0, delta_servo = 1.0;
};

struct TrajectoryLog {
  Controller controller = Controller::Fbos;
  std::optional<fdt::NoiseIndicators> indicators;
  std::vector<TrajectoryRow> rows;
};

struct Metrics {
  double final_position_error = 0.0;  // m
  double final_heading_error = 0.0;   // rad
  double max_cross_track = 0.0;       // m
  std::optional<double> time_to_park; // s
  bool collision = false;
  double path_length = 0.0;           // m
  bool parked = false;
};

/// Everything a run needs besides the controller choice.
struct RunSetup {
  plant::PlantParams plant;
  plant::CalibrationConfig calibration;
  Scenario scenario;
};

namespace detail {

/// First-order filtered finite difference.
class RateEstimator {
 public:
  double update(double value, double dt, double time_constant) {
    if (!primed_) {
      primed_ = true;
      prev_ = value;
      return rate_;
    }
    const double raw = (value - prev_) / dt;
    prev_ = value;
    rate_ += dt / (time_constant + dt) * (raw - rate_);
    return rate_;
  }

 private:
  bool primed_ = false;
  double prev_ = 0.0;
  double rate_ = 0.0;
};

/// Tracking loop around the base controller. The servo channel sees the
/// lateral offset of a preview point on the path in the body frame; the
/// motor channel sees the speed error against the cruise speed.
class ParkingLoop {
 public:
  ParkingLoop(const RunSetup& setup, const bfc::BaseController& bfc, fdt::ControlRule scalars)
      : setup_(setup), bfc_(bfc), scalars_(scalars) {}

  struct Output {
    double p_motor = 0.0;
    double v_servo = 0.0;
  };

  Output update(const plant::VehicleState& s, double dt) {
    const Scenario& sc = setup_.scenario;
    const ControlTuning& c = sc.control;
    const Polyline& path = sc.path;
    const Vec2 pos{s.x, s.y};

    progress_ = path.project(pos, progress_ - 1.0, progress_ + 2.0);
    double along = progress_;
    if (progress_ >= path.length()) along = path.length() + dot(pos - path.point_at(path.length()), path.tangent_at(path.length()));
    const double remaining = path.length() - along;

    const Vec2 preview = path.point_at(progress_ + c.lookahead);
    const Vec2 d = preview - pos;
    const double lateral = -std::sin(s.theta) * d.x + std::cos(s.theta) * d.y;
    const double e_servo = std::clamp(lateral / c.e_max, -1.0, 1.0);
    const double edot_servo = servo_rate_.update(e_servo, dt, c.rate_filter) / c.edot_max;
    const double u_servo = bfc_.infer(e_servo, edot_servo);

    const double v_opt = setup_.calibration.v_optimal;
    const double e_motor = std::clamp((v_opt - s.v) / v_opt, -1.0, 1.0);
    const double edot_motor = motor_rate_.update(e_motor, dt, c.rate_filter) / c.speed_edot_max;
    if (!stopped_ && remaining <= s.v * c.stop_lead_time && s.v > 0.0) stopped_ = true;
    const double u_motor = stopped_ ? -1.0 : bfc_.infer(e_motor, edot_motor);

    const auto raw = bfc_.map_to_actuators({u_motor, u_servo});
    const auto [p, v] = fdt::combined_control(raw.p_motor, raw.v_servo, scalars_, setup_.plant.actuators);
    return {p, v};
  }

 private:
  const RunSetup& setup_;
  const bfc::BaseController& bfc_;
  fdt::ControlRule scalars_;
  double progress_ = 0.0;
  bool stopped_ = false;
  RateEstimator servo_rate_;
  RateEstimator motor_rate_;
};

inline double jitter(std::mt19937_64& rng, double amplitude) {
  return amplitude * (2.0 * training::unit_uniform(rng) - 1.0);
}

}  // namespace detail

/// Indicators measured on a separate probe vehicle with the run's
/// disturbances, before the maneuver.
inline fdt::NoiseIndicators measure_indicators(const plant::PlantParams& params, const plant::CalibrationConfig& cfg) {
  plant::Plant probe(params);
  const double r_speed = plant::measure_r_speed(probe, cfg);
  const double r_length = plant::measure_r_length(probe, cfg);
  return {r_speed, r_length};
}

inline TrajectoryLog run_scenario(Controller controller, const RunSetup& setup,
                                  const fdt::FuzzyDecisionTree* tree = nullptr,
                                  const fdt::HfcSupervisor& hfc = fdt::HfcSupervisor{}) {
  const Scenario& sc = setup.scenario;
  sc.validate();
  setup.plant.validate();
  setup.calibration.validate();

  TrajectoryLog log;
  log.controller = controller;
  fdt::ControlRule scalars{1.0, 1.0};
  if (controller == Controller::HfcFdt) {
    if (tree == nullptr) throw ConfigError("the hfcfdt controller needs a tree artifact");
    tree->validate();
  }
  if (controller != Controller::Fbos) {
    log.indicators = measure_indicators(setup.plant, setup.calibration);
    scalars = controller == Controller::Hfc ? hfc(*log.indicators) : fdt::supervise(*tree, *log.indicators);
  }

  std::mt19937_64 rng(sc.seed);
  plant::VehicleState init;
  const double lateral = detail::jitter(rng, sc.jitter_lateral);
  const double heading = detail::jitter(rng, sc.jitter_heading);
  init.x = sc.start.x - lateral * std::sin(sc.start.theta);
  init.y = sc.start.y + lateral * std::cos(sc.start.theta);
  init.theta = sc.start.theta + heading;

  plant::Plant vehicle(setup.plant, init);
  bfc::BaseController bfc(bfc::BfcConfig::standard(setup.plant.actuators));
  detail::ParkingLoop loop(setup, bfc, scalars);

  const std::size_t decim = sc.decimation();
  const std::size_t ticks = sc.record_count() * decim;
  log.rows.reserve(sc.record_count() + 1);
  for (std::size_t i = 0; i <= ticks; ++i) {
    const auto cmd = loop.update(vehicle.state(), sc.control_dt);
    if (i % decim == 0) {
      const auto& s = vehicle.state();
      const std::size_t k = i / decim;
      log.rows.push_back({k, static_cast<double>(k) / 10.0, s.x, s.y, s.theta, s.v, s.phi, cmd.p_motor,
                          cmd.v_servo, scalars.delta_motor, scalars.delta_servo});
    }
    if (i < ticks) vehicle.advance(cmd.p_motor, cmd.v_servo, sc.control_dt, plant::Gear::Reverse);
  }
  return log;
}

inline Metrics compute_metrics(const TrajectoryLog& log, const Scenario& sc) {
  if (log.rows.empty()) throw ConfigError("cannot compute metrics of an empty log");
  Metrics m;
  const auto pos_err = [&](const TrajectoryRow& r) { return std::hypot(r.x - sc.target.x, r.y - sc.target.y); };
  const auto head_err = [&](const TrajectoryRow& r) { return std::abs(wrap_angle(r.theta - sc.target.theta)); };
  const auto& last = log.rows.back();
  m.final_position_error = pos_err(last);
  m.final_heading_error = head_err(last);

  std::optional<std::size_t> settled;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const auto& r = log.rows[i];
    m.max_cross_track = std::max(m.max_cross_track, sc.path.distance_to({r.x, r.y}));
    const auto body = sc.body.at(r.x, r.y, r.theta);
    if (overlaps(body, sc.rear_neighbor) || overlaps(body, sc.front_neighbor)) m.collision = true;
    if (i > 0) m.path_length += std::hypot(r.x - log.rows[i - 1].x, r.y - log.rows[i - 1].y);
    const bool inside = pos_err(r) <= sc.tolerance.position && head_err(r) <= sc.tolerance.heading_rad();
    if (!inside) {
      settled.reset();
    } else if (!settled) {
      settled = i;
    }
  }
  if (settled && !m.collision) m.time_to_park = log.rows[*settled].t;
  m.parked = !m.collision && m.final_position_error <= sc.tolerance.position &&
             m.final_heading_error <= sc.tolerance.heading_rad();
  return m;
}

struct ComparisonEntry {
  TrajectoryLog log;
  Metrics metrics;
};

struct Comparison {
  std::array<ComparisonEntry, 3> entries;  // in kAllControllers order

  const ComparisonEntry& operator[](Controller c) const { return entries[static_cast<std::size_t>(c)]; }
};

/// All three controllers on the same scenario, disturbances and seed.
inline Comparison compare(const RunSetup& setup, const fdt::FuzzyDecisionTree& tree,
                          const fdt::HfcSupervisor& hfc = fdt::HfcSupervisor{}) {
  Comparison out;
  for (std::size_t i = 0; i < kAllControllers.size(); ++i) {
    auto log = run_scenario(kAllControllers[i], setup, &tree, hfc);
    auto metrics = compute_metrics(log, setup.scenario);
    out.entries[i] = {std::move(log), metrics};
  }
  return out;
}

}  // namespace hfcfdt::harness
