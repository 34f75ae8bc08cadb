#pragma once

// Kinematic bicycle vehicle with a first-order speed law. Ground factor mu
// scales drive effectiveness; the wheelbase sets the turning radius. Also
// provides the virtual speedometer / IMU measurements used by calibration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hfcfdt/actuators.hpp"
#include "hfcfdt/errors.hpp"

namespace hfcfdt::plant {

enum class Gear { Forward, Reverse };

constexpr double gear_sign(Gear g) noexcept { return g == Gear::Forward ? 1.0 : -1.0; }

/// Pose of the rear-axle midpoint plus speed and steering angle.
struct VehicleState {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad
  double v = 0.0;      // m/s, never negative
  double phi = 0.0;    // rad

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct PlantParams {
  double mu = 1.0;
  double mu_nominal = 1.0;
  double wheelbase = 2.5;          // m
  double wheelbase_nominal = 2.5;  // m
  double k_v = 6.0e-4;             // (m/s)/W
  double tau = 0.5;                // s
  double k_s = 0.14;               // rad/V
  double phi_max = 0.7;            // rad
  double body_length = 4.2;        // m
  double body_width = 1.7;         // m
  double rear_overhang = 0.8;      // m, rear bumper to rear axle
  ActuatorRange actuators;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(std::string("plant parameter '") + name + "' must be > 0");
    };
    positive(mu, "mu");
    positive(mu_nominal, "mu_nominal");
    positive(wheelbase, "wheelbase");
    positive(wheelbase_nominal, "wheelbase_nominal");
    positive(k_v, "k_v");
    positive(tau, "tau");
    positive(k_s, "k_s");
    positive(phi_max, "phi_max");
    positive(body_length, "body_length");
    positive(body_width, "body_width");
    positive(actuators.p_max, "p_max");
    positive(actuators.v_max, "v_max");
    if (mu > 1.5) throw ConfigError("plant parameter 'mu' must be in (0, 1.5]");
    if (phi_max >= 1.5) throw ConfigError("plant parameter 'phi_max' must be below pi/2");
    if (!(rear_overhang >= 0.0 && rear_overhang < body_length)) {
      throw ConfigError("plant parameter 'rear_overhang' must lie inside the body");
    }
  }

  /// Steady-state speed reached under constant power.
  double steady_speed(double power) const noexcept { return k_v * mu * power; }

  /// Turning radius of the rear axle for a servo voltage.
  double turn_radius(double volts) const noexcept {
    return wheelbase / std::tan(std::clamp(k_s * volts, -phi_max, phi_max));
  }
};

inline constexpr double kMaxStep = 0.1;

/// One explicit Euler step. Pure: the caller owns the state.
inline VehicleState step(const VehicleState& s, double power, double volts, const PlantParams& p, double dt,
                         Gear gear = Gear::Forward) {
  if (!(dt > 0.0 && dt <= kMaxStep)) throw ContractViolation("plant step: dt must be in (0, 0.1] s");
  if (!(power >= 0.0 && power <= p.actuators.p_max)) {
    throw ContractViolation("plant step: motor power outside [0, p_max]");
  }
  if (!(std::abs(volts) <= p.actuators.v_max)) throw ContractViolation("plant step: servo voltage outside ±v_max");

  const double dir = gear_sign(gear);
  VehicleState n;
  n.phi = std::clamp(p.k_s * volts, -p.phi_max, p.phi_max);
  n.x = s.x + dt * dir * s.v * std::cos(s.theta);
  n.y = s.y + dt * dir * s.v * std::sin(s.theta);
  n.theta = s.theta + dt * dir * s.v * std::tan(n.phi) / p.wheelbase;
  n.v = std::max(0.0, s.v + dt * (p.k_v * p.mu * power - s.v) / p.tau);
  return n;
}

/// Stateful stepper with its virtual sensors.
class Plant {
 public:
  explicit Plant(PlantParams params, VehicleState initial = {}) : params_(params), state_(initial) {
    params_.validate();
  }

  void advance(double power, double volts, double dt, Gear gear = Gear::Forward) {
    const VehicleState next = step(state_, power, volts, params_, dt, gear);
    yaw_rate_ = (next.theta - state_.theta) / dt;
    state_ = next;
    time_ += dt;
  }

  const PlantParams& params() const noexcept { return params_; }
  const VehicleState& state() const noexcept { return state_; }
  double time() const noexcept { return time_; }

  double speedometer() const noexcept { return state_.v; }
  /// Yaw rate over the most recent step (rad/s).
  double imu_yaw_rate() const noexcept { return yaw_rate_; }

  bool at_rest() const noexcept { return state_.v == 0.0; }

 private:
  PlantParams params_;
  VehicleState state_;
  double time_ = 0.0;
  double yaw_rate_ = 0.0;
};

/// Test-rig settings for the calibration experiments.
struct CalibrationConfig {
  double p_testing = 500.0;    // W
  double v_testing = 2.0;      // V
  double v_optimal = 0.3;      // m/s
  double r_optimal = 0.0;      // m; 0 means "derive from the nominal plant"
  double tolerance = 1e-3;     // relative
  std::size_t max_iterations = 10000;
  double gain = 0.5;

  void validate() const {
    if (!(p_testing > 0.0 && v_testing > 0.0 && v_optimal > 0.0 && r_optimal > 0.0 && tolerance > 0.0 &&
          gain > 0.0 && max_iterations > 0)) {
      throw ConfigError("calibration settings must all be positive");
    }
  }
};

/// Radius the nominal vehicle turns at under the testing servo voltage.
inline double nominal_turn_radius(const PlantParams& p, double v_testing) {
  PlantParams nominal = p;
  nominal.wheelbase = p.wheelbase_nominal;
  return nominal.turn_radius(v_testing);
}

/// Fills r_optimal and k_v consistently with the nominal plant: at
/// p_testing the nominal vehicle cruises at v_optimal.
inline void harmonize(PlantParams& p, CalibrationConfig& cfg) {
  p.k_v = cfg.v_optimal / (p.mu_nominal * cfg.p_testing);
  if (!(cfg.r_optimal > 0.0)) cfg.r_optimal = nominal_turn_radius(p, cfg.v_testing);
}

inline constexpr double kSensorDt = 0.01;
inline constexpr double kSteadyWindow = 1.0;
inline constexpr double kSteadySpeedDelta = 1e-4;
inline constexpr double kSteadyTimeout = 60.0;
inline constexpr double kMinYawRate = 1e-6;

struct SteadyReading {
  double speed = 0.0;     // m/s
  double yaw_rate = 0.0;  // rad/s, averaged over the last window
};

/// Holds (power, volts) until the speed changes by less than 1e-4 m/s over
/// one second of simulated time.
inline SteadyReading settle(Plant& plant, double power, double volts) {
  const auto window = static_cast<std::size_t>(std::lround(kSteadyWindow / kSensorDt));
  const auto limit = static_cast<std::size_t>(std::lround(kSteadyTimeout / kSensorDt));
  std::vector<double> speeds(window + 1);
  std::vector<double> headings(window + 1);
  speeds[0] = plant.speedometer();
  headings[0] = plant.state().theta;
  for (std::size_t k = 1; k <= limit; ++k) {
    plant.advance(power, volts, kSensorDt);
    speeds[k % (window + 1)] = plant.speedometer();
    headings[k % (window + 1)] = plant.state().theta;
    if (k < window) continue;
    const double old_v = speeds[(k - window) % (window + 1)];
    if (std::abs(plant.speedometer() - old_v) < kSteadySpeedDelta) {
      const double old_theta = headings[(k - window) % (window + 1)];
      return {plant.speedometer(), (plant.state().theta - old_theta) / kSteadyWindow};
    }
  }
  throw SensorError("no steady state within 60 s of simulated time");
}

/// Ground indicator: steady speed at p_testing over v_optimal.
inline double measure_r_speed(Plant& plant, const CalibrationConfig& cfg) {
  if (!plant.at_rest()) throw ContractViolation("measure_r_speed: plant must start at rest");
  return settle(plant, cfg.p_testing, 0.0).speed / cfg.v_optimal;
}

/// Proportional power tuning until the steady speed is within tolerance of
/// v_optimal. Returns the tuned power.
inline double regulate_speed(Plant& plant, const CalibrationConfig& cfg, double power, double volts = 0.0) {
  const double p_max = plant.params().actuators.p_max;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const double v = settle(plant, power, volts).speed;
    const double rel = (cfg.v_optimal - v) / cfg.v_optimal;
    if (std::abs(rel) < cfg.tolerance) return power;
    if (power >= p_max && rel > 0.0) break;
    power = std::clamp(power * (1.0 + cfg.gain * rel), 0.0, p_max);
  }
  throw CalibrationError("speed", "motor power did not bring the vehicle to v_optimal");
}

/// Length indicator: turning radius (speed over IMU yaw rate) at v_optimal
/// and v_testing, over the optimal radius.
inline double measure_r_length(Plant& plant, const CalibrationConfig& cfg) {
  const double power = regulate_speed(plant, cfg, cfg.p_testing);
  const SteadyReading r = settle(plant, power, cfg.v_testing);
  if (std::abs(r.yaw_rate) < kMinYawRate) throw SensorError("IMU yaw rate too small to infer a turning radius");
  return (r.speed / std::abs(r.yaw_rate)) / cfg.r_optimal;
}

}  // namespace hfcfdt::plant
