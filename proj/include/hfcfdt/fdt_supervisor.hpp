#pragma once

// Supervisory fuzzy decision tree: ground condition (Coarse / Fair /
// Smooth) at level one, vehicle length (Short / Long) under each ground
// node, six leaves carrying [delta_motor, delta_servo] scalars. Also the
// decoupled two-channel supervisor used as the HFC baseline.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hfcfdt/actuators.hpp"
#include "hfcfdt/errors.hpp"
#include "hfcfdt/fuzzy_core.hpp"

namespace hfcfdt::fdt {

struct ControlRule {
  double delta_motor = 1.0;
  double delta_servo = 1.0;

  bool valid() const noexcept {
    return std::isfinite(delta_motor) && std::isfinite(delta_servo) && delta_motor > 0.0 && delta_servo > 0.0;
  }

  friend bool operator==(const ControlRule&, const ControlRule&) = default;
};

struct NoiseIndicators {
  double r_speed = 1.0;
  double r_length = 1.0;
};

inline constexpr std::size_t kGroundNodes = 3;
inline constexpr std::size_t kLengthTerms = 2;
inline constexpr std::size_t kLeaves = kGroundNodes * kLengthTerms;

inline constexpr std::array<const char*, kGroundNodes> kGroundLabels = {"Coarse", "Fair", "Smooth"};
/// Ordered along the r_length axis.
inline constexpr std::array<const char*, kLengthTerms> kLengthLabels = {"Short", "Long"};

/// Leaf index for (ground node g, length term l).
constexpr std::size_t leaf_index(std::size_t ground, std::size_t length) noexcept {
  return ground * kLengthTerms + length;
}

/// "L1a" .. "L3b": digit is the ground node, a = Short, b = Long.
inline std::string leaf_id(std::size_t leaf) {
  return std::string("L") + static_cast<char>('1' + leaf / kLengthTerms) + static_cast<char>('a' + leaf % kLengthTerms);
}

inline constexpr double kDefaultHalfWidth = 0.1;

struct FuzzyDecisionTree {
  fuzzy::LinguisticVariable ground;                         // over r_speed
  std::array<fuzzy::LinguisticVariable, kGroundNodes> length;  // over r_length, one per ground node
  std::array<ControlRule, kLeaves> leaves{};
  double output_half_width = kDefaultHalfWidth;
  bool trained = false;

  /// Throws ConfigError unless the tree has the balanced 3 x 2 shape and
  /// every leaf carries a positive rule.
  void validate() const {
    if (!trained) throw ConfigError("fuzzy decision tree is untrained");
    if (ground.size() != kGroundNodes) throw ConfigError("tree needs exactly three ground-condition terms");
    for (const auto& v : length) {
      if (v.size() != kLengthTerms) throw ConfigError("each ground node needs exactly two length terms");
    }
    for (std::size_t i = 0; i < kLeaves; ++i) {
      if (!leaves[i].valid()) throw ConfigError("leaf " + leaf_id(i) + " has no positive control rule");
    }
    if (!(output_half_width > 0.0 && std::isfinite(output_half_width))) {
      throw ConfigError("output half-width must be positive");
    }
  }
};

/// Compound degree of each leaf: min of the ground degree and the length
/// degree under that ground node. Inputs are clamped to the universes.
inline std::array<double, kLeaves> leaf_degrees(const FuzzyDecisionTree& tree, NoiseIndicators ind) {
  std::array<double, kLeaves> out{};
  const auto g = tree.ground.fuzzify(ind.r_speed);
  for (std::size_t i = 0; i < kGroundNodes; ++i) {
    const auto l = tree.length[i].fuzzify(ind.r_length);
    for (std::size_t j = 0; j < kLengthTerms; ++j) out[leaf_index(i, j)] = std::min(g[i], l[j]);
  }
  return out;
}

namespace detail {

/// Mamdani output for one channel: each fired rule contributes a symmetric
/// triangle centred at its value, clipped at its degree.
inline std::optional<double> defuzzify_channel(const std::vector<double>& centers, const std::vector<double>& degrees,
                                               double half_width) {
  std::vector<fuzzy::FuzzySet> sets;
  bool all_same = true;
  std::optional<double> first;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!(degrees[i] > 0.0)) continue;
    if (!first) first = centers[i];
    all_same = all_same && centers[i] == *first;
    sets.push_back(fuzzy::clip(fuzzy::MembershipFunction::symmetric_triangle(centers[i], half_width), degrees[i]));
  }
  if (!first) return std::nullopt;
  // Coincident symmetric lobes: the centroid is the shared centre.
  if (all_same) return *first;
  return fuzzy::aggregate(sets).centroid();
}

}  // namespace detail

/// Scalars [delta_motor, delta_servo] for the given indicators. Falls back to
/// identity scaling when no leaf fires.
inline ControlRule supervise(const FuzzyDecisionTree& tree, NoiseIndicators ind) {
  tree.validate();
  const auto deg = leaf_degrees(tree, ind);
  std::vector<double> degrees(deg.begin(), deg.end());
  std::vector<double> motor, servo;
  for (const auto& r : tree.leaves) {
    motor.push_back(r.delta_motor);
    servo.push_back(r.delta_servo);
  }
  const auto m = detail::defuzzify_channel(motor, degrees, tree.output_half_width);
  const auto s = detail::defuzzify_channel(servo, degrees, tree.output_half_width);
  if (!m || !s) return {1.0, 1.0};
  return {*m, *s};
}

/// Two independent single-input controllers: r_speed drives delta_motor and
/// r_length drives delta_servo. Each has Low / Nominal / High input terms.
struct HfcConfig {
  fuzzy::LinguisticVariable speed_ratio;
  fuzzy::LinguisticVariable length_ratio;
  std::array<double, 3> motor_outputs;  // for Low, Nominal, High r_speed
  std::array<double, 3> servo_outputs;  // for Low, Nominal, High r_length
  double output_half_width = kDefaultHalfWidth;

  static HfcConfig standard() {
    auto ratio_var = [](const char* name) {
      using fuzzy::MembershipFunction;
      return fuzzy::LinguisticVariable(name, 0.0, 3.0,
                                       {{"Low", MembershipFunction::trapezoid(0.0, 0.0, 0.8, 1.0)},
                                        {"Nominal", MembershipFunction::triangle(0.8, 1.0, 1.2)},
                                        {"High", MembershipFunction::trapezoid(1.0, 1.2, 3.0, 3.0)}},
                                       true);
    };
    // Slow ground needs more power; a long vehicle needs more steering.
    return HfcConfig{ratio_var("r_speed"), ratio_var("r_length"), {1.25, 1.0, 0.8}, {0.8, 1.0, 1.25}};
  }
};

class HfcSupervisor {
 public:
  explicit HfcSupervisor(HfcConfig cfg = HfcConfig::standard()) : cfg_(std::move(cfg)) {
    if (cfg_.speed_ratio.size() != 3 || cfg_.length_ratio.size() != 3) {
      throw ConfigError("HFC channels need exactly three input terms");
    }
  }

  double motor(double r_speed) const { return channel(cfg_.speed_ratio, cfg_.motor_outputs, r_speed); }
  double servo(double r_length) const { return channel(cfg_.length_ratio, cfg_.servo_outputs, r_length); }

  ControlRule operator()(NoiseIndicators ind) const { return {motor(ind.r_speed), servo(ind.r_length)}; }

  const HfcConfig& config() const noexcept { return cfg_; }

 private:
  double channel(const fuzzy::LinguisticVariable& var, const std::array<double, 3>& outputs, double x) const {
    const auto deg = var.fuzzify(x);
    return detail::defuzzify_channel({outputs.begin(), outputs.end()}, deg, cfg_.output_half_width).value_or(1.0);
  }

  HfcConfig cfg_;
};

inline ControlRule hfc_supervise(NoiseIndicators ind) { return HfcSupervisor{}(ind); }

/// Supervisor scalars applied to the base controller's actuator commands,
/// clamped to the actuator range.
inline std::pair<double, double> combined_control(double p_motor, double v_servo, ControlRule scalars,
                                                  const ActuatorRange& range) {
  if (!(scalars.valid())) throw ContractViolation("supervisor scalars must be positive");
  return {std::clamp(p_motor * scalars.delta_motor, 0.0, range.p_max),
          std::clamp(v_servo * scalars.delta_servo, -range.v_max, range.v_max)};
}

}  // namespace hfcfdt::fdt
