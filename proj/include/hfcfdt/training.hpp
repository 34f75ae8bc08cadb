#pragma once

// Data training for the decision tree: calibration experiments against a
// plant, 1-D k-means partitioning of the indicator plane into six
// categories, trapezoidal memberships from the partition lines, and per-leaf
// median control rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hfcfdt/errors.hpp"
#include "hfcfdt/fdt_supervisor.hpp"
#include "hfcfdt/fuzzy_core.hpp"
#include "hfcfdt/plant.hpp"

namespace hfcfdt::training {

using plant::CalibrationConfig;

struct TrainingSample {
  double r_speed = 1.0;
  double r_length = 1.0;
  double delta_motor = 1.0;
  double delta_servo = 1.0;

  bool valid() const noexcept {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    return ok(r_speed) && ok(r_length) && ok(delta_motor) && ok(delta_servo);
  }

  friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

inline constexpr std::array<const char*, fdt::kGroundNodes> kRegionNames = {"I", "III", "V"};

/// Four vertical lines on the r_speed axis and, per core region (I, III,
/// V), two horizontal lines on the r_length axis.
struct PartitionSpec {
  std::array<double, 4> ground{};
  std::array<std::array<double, 2>, fdt::kGroundNodes> length{};
  double speed_lo = 0.0;
  double speed_hi = 3.0;
  double length_lo = 0.0;
  double length_hi = 3.0;

  void validate() const {
    const auto& g = ground;
    if (!(speed_lo <= g[0] && g[0] < g[1] && g[1] <= g[2] && g[2] < g[3] && g[3] <= speed_hi)) {
      throw TrainingError("ground partition lines must increase and leave positive-width transitions");
    }
    for (std::size_t r = 0; r < length.size(); ++r) {
      const auto& h = length[r];
      if (!(length_lo <= h[0] && h[0] < h[1] && h[1] <= length_hi)) {
        throw TrainingError(std::string("length partition of region ") + kRegionNames[r] + " is invalid");
      }
    }
  }
};

/// Median; an even count takes the mean of the two middle values.
inline double median(std::vector<double> v) {
  if (v.empty()) throw TrainingError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

/// Lloyd's algorithm in one dimension, seeded at the k quantiles so the
/// result does not depend on input order. Returns member indices per
/// cluster, clusters ordered by centre.
inline std::vector<std::vector<std::size_t>> kmeans_1d(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> sorted;
  sorted.reserve(order.size());
  for (auto i : order) sorted.push_back(values[i]);
  std::vector<double> uniq = sorted;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (k == 0 || uniq.size() < k) {
    throw TrainingError("need at least " + std::to_string(k) + " distinct values to form " + std::to_string(k) +
                        " clusters, got " + std::to_string(uniq.size()));
  }

  const std::size_t n = sorted.size();
  std::vector<double> centers(k);
  for (std::size_t c = 0; c < k; ++c) {
    centers[c] = sorted[std::min(n - 1, static_cast<std::size_t>((static_cast<double>(c) + 0.5) * n / k))];
  }

  // Sorted data: clusters are contiguous, described by k-1 split positions.
  std::vector<std::size_t> split(k + 1, 0);
  split[k] = n;
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<std::size_t> next(k + 1, 0);
    next[k] = n;
    for (std::size_t c = 1; c < k; ++c) {
      const double boundary = 0.5 * (centers[c - 1] + centers[c]);
      // Ties at the boundary go to the lower cluster.
      next[c] = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), boundary) - sorted.begin());
      next[c] = std::max(next[c], next[c - 1]);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (next[c + 1] > next[c]) {
        double sum = 0.0;
        for (std::size_t i = next[c]; i < next[c + 1]; ++i) sum += sorted[i];
        centers[c] = sum / static_cast<double>(next[c + 1] - next[c]);
      }
    }
    if (next == split) break;
    split = std::move(next);
  }

  std::vector<std::vector<std::size_t>> clusters(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (split[c + 1] == split[c]) throw TrainingError("k-means produced an empty cluster");
    for (std::size_t i = split[c]; i < split[c + 1]; ++i) clusters[c].push_back(order[i]);
  }
  return clusters;
}

namespace detail {

/// Transition between two adjacent clusters: [max of lower, min of upper],
/// widened to at least eps around its midpoint.
inline std::array<double, 2> transition(double lower_max, double upper_min, double eps) {
  if (upper_min - lower_max >= eps) return {lower_max, upper_min};
  const double m = 0.5 * (lower_max + upper_min);
  return {m - 0.5 * eps, m + 0.5 * eps};
}

inline std::array<double, 2> extent(std::span<const double> v, std::span<const std::size_t> idx) {
  double lo = v[idx.front()], hi = v[idx.front()];
  for (auto i : idx) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  return {lo, hi};
}

/// Transition width floor: 1% of the spread of the values.
inline double width_floor(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return 0.01 * (*hi - *lo);
}

inline std::vector<double> column(std::span<const TrainingSample> s, double TrainingSample::*field) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(x.*field);
  return out;
}

inline std::vector<std::vector<std::size_t>> ground_clusters(std::span<const TrainingSample> samples) {
  if (samples.size() < 3) throw TrainingError("ground partition needs at least 3 samples");
  const auto speeds = column(samples, &TrainingSample::r_speed);
  return kmeans_1d(speeds, 3);
}

}  // namespace detail

/// Four vertical lines on the r_speed axis from 3-means clustering.
inline std::array<double, 4> partition_ground_axis(std::span<const TrainingSample> samples) {
  const auto speeds = detail::column(samples, &TrainingSample::r_speed);
  const auto clusters = detail::ground_clusters(samples);
  const double eps = detail::width_floor(speeds);
  const auto c1 = detail::extent(speeds, clusters[0]);
  const auto c2 = detail::extent(speeds, clusters[1]);
  const auto c3 = detail::extent(speeds, clusters[2]);
  const auto low = detail::transition(c1[1], c2[0], eps);
  const auto high = detail::transition(c2[1], c3[0], eps);
  if (!(low[1] <= high[0])) throw TrainingError("ground transitions overlap; clusters are too close");
  return {low[0], low[1], high[0], high[1]};
}

/// Two horizontal lines on the r_length axis of one core region, from
/// 2-means clustering of that region's samples.
inline std::array<double, 2> partition_length_axis(std::span<const TrainingSample> samples_in_region,
                                                   std::size_t region_id) {
  const std::string name = region_id < kRegionNames.size() ? kRegionNames[region_id] : std::to_string(region_id);
  if (samples_in_region.size() < 2) throw TrainingError("region " + name + " has fewer than 2 samples");
  const auto lengths = detail::column(samples_in_region, &TrainingSample::r_length);
  std::vector<std::vector<std::size_t>> clusters;
  try {
    clusters = kmeans_1d(lengths, 2);
  } catch (const TrainingError& e) {
    throw TrainingError("region " + name + ": vehicle-length samples form a single cluster (" + e.what() + ")");
  }
  const auto lo = detail::extent(lengths, clusters[0]);
  const auto hi = detail::extent(lengths, clusters[1]);
  return detail::transition(lo[1], hi[0], detail::width_floor(lengths));
}

/// Full partition: ground lines, then length lines inside each ground
/// cluster. Universes start at zero and extend past the data.
inline PartitionSpec partition(std::span<const TrainingSample> samples) {
  for (const auto& s : samples) {
    if (!s.valid()) throw TrainingError("training samples must be positive and finite");
  }
  PartitionSpec spec;
  spec.ground = partition_ground_axis(samples);
  const auto clusters = detail::ground_clusters(samples);
  for (std::size_t r = 0; r < fdt::kGroundNodes; ++r) {
    std::vector<TrainingSample> region;
    for (auto i : clusters[r]) region.push_back(samples[i]);
    spec.length[r] = partition_length_axis(region, r);
  }
  double max_speed = 0.0, max_length = 0.0;
  for (const auto& s : samples) {
    max_speed = std::max(max_speed, s.r_speed);
    max_length = std::max(max_length, s.r_length);
  }
  spec.speed_hi = std::max(3.0, 2.0 * max_speed);
  spec.length_hi = std::max(3.0, 2.0 * max_length);
  spec.validate();
  return spec;
}

/// Membership functions of a tree from partition lines alone; leaves are
/// left untrained.
inline fdt::FuzzyDecisionTree tree_skeleton(const PartitionSpec& spec, double half_width = fdt::kDefaultHalfWidth) {
  using fuzzy::MembershipFunction;
  spec.validate();
  const auto& g = spec.ground;
  const double lo = spec.speed_lo, hi = spec.speed_hi;
  fdt::FuzzyDecisionTree tree;
  tree.ground = fuzzy::LinguisticVariable("ground", lo, hi,
                                          {{fdt::kGroundLabels[0], MembershipFunction::trapezoid(lo, lo, g[0], g[1])},
                                           {fdt::kGroundLabels[1], MembershipFunction::trapezoid(g[0], g[1], g[2], g[3])},
                                           {fdt::kGroundLabels[2], MembershipFunction::trapezoid(g[2], g[3], hi, hi)}},
                                          true);
  for (std::size_t r = 0; r < fdt::kGroundNodes; ++r) {
    const auto& h = spec.length[r];
    const double llo = spec.length_lo, lhi = spec.length_hi;
    tree.length[r] = fuzzy::LinguisticVariable(
        std::string("length_") + fdt::kGroundLabels[r], llo, lhi,
        {{fdt::kLengthLabels[0], MembershipFunction::trapezoid(llo, llo, h[0], h[1])},
         {fdt::kLengthLabels[1], MembershipFunction::trapezoid(h[0], h[1], lhi, lhi)}},
        true);
  }
  tree.output_half_width = half_width;
  return tree;
}

/// Leaf a sample is assigned to: highest compound degree, lowest index on
/// ties.
inline std::size_t category_of(const fdt::FuzzyDecisionTree& tree, fdt::NoiseIndicators ind) {
  const auto deg = fdt::leaf_degrees(tree, ind);
  return static_cast<std::size_t>(std::max_element(deg.begin(), deg.end()) - deg.begin());
}

/// Memberships from the partition and, per leaf, the median delta pair of
/// the samples assigned to it.
inline fdt::FuzzyDecisionTree build_tree(std::span<const TrainingSample> samples, const PartitionSpec& spec,
                                         double half_width = fdt::kDefaultHalfWidth) {
  auto tree = tree_skeleton(spec, half_width);
  std::array<std::vector<double>, fdt::kLeaves> motor, servo;
  for (const auto& s : samples) {
    if (!s.valid()) throw TrainingError("training samples must be positive and finite");
    const auto leaf = category_of(tree, {s.r_speed, s.r_length});
    motor[leaf].push_back(s.delta_motor);
    servo[leaf].push_back(s.delta_servo);
  }
  std::string empty;
  for (std::size_t i = 0; i < fdt::kLeaves; ++i) {
    if (motor[i].empty()) empty += (empty.empty() ? "" : ", ") + fdt::leaf_id(i);
  }
  if (!empty.empty()) throw TrainingError("no training samples in categories: " + empty);
  for (std::size_t i = 0; i < fdt::kLeaves; ++i) {
    tree.leaves[i] = {median(motor[i]), median(servo[i])};
  }
  tree.trained = true;
  return tree;
}

inline fdt::FuzzyDecisionTree train(std::span<const TrainingSample> samples,
                                    double half_width = fdt::kDefaultHalfWidth) {
  return build_tree(samples, partition(samples), half_width);
}

/// One calibration run. The plant must start at rest.
///  1. r_speed: steady speed at p_testing over v_optimal.
///  2. tune power to v_optimal, apply v_testing, r_length from speed / yaw rate.
///  3. tune servo voltage (power re-regulated each round) until the turning
///     radius is within tolerance of the optimal radius.
inline TrainingSample calibrate_sample(plant::Plant& vehicle, const CalibrationConfig& cfg) {
  cfg.validate();
  TrainingSample out;
  out.r_speed = plant::measure_r_speed(vehicle, cfg);

  double power = plant::regulate_speed(vehicle, cfg, cfg.p_testing);
  const auto turning = plant::settle(vehicle, power, cfg.v_testing);
  if (std::abs(turning.yaw_rate) < plant::kMinYawRate) throw SensorError("no measurable yaw rate at v_testing");
  out.r_length = (turning.speed / std::abs(turning.yaw_rate)) / cfg.r_optimal;

  const double v_max = vehicle.params().actuators.v_max;
  const double p_max = vehicle.params().actuators.p_max;
  double volts = cfg.v_testing;
  bool converged = false;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const auto r = plant::settle(vehicle, power, volts);
    if (std::abs(r.yaw_rate) < plant::kMinYawRate) throw SensorError("no measurable yaw rate while tuning servo");
    const double radius_ratio = (r.speed / std::abs(r.yaw_rate)) / cfg.r_optimal;
    const double speed_err = (cfg.v_optimal - r.speed) / cfg.v_optimal;
    if (std::abs(radius_ratio - 1.0) < cfg.tolerance && std::abs(speed_err) < cfg.tolerance) {
      converged = true;
      break;
    }
    if (volts >= v_max && radius_ratio > 1.0) break;
    volts = std::clamp(volts * (1.0 + cfg.gain * (radius_ratio - 1.0)), 0.0, v_max);
    power = std::clamp(power * (1.0 + cfg.gain * speed_err), 0.0, p_max);
  }
  if (!converged) throw CalibrationError("servo", "turning radius did not reach the optimal radius");
  out.delta_motor = power / cfg.p_testing;
  out.delta_servo = volts / cfg.v_testing;
  return out;
}

/// Grid of calibration plants: every (mu, wheelbase) pair, repeated, with
/// optional seeded relative jitter on both parameters.
struct PlantGrid {
  std::vector<double> mu_values;
  std::vector<double> wheelbase_values;  // m
  std::size_t repetitions = 1;
  double jitter = 0.0;
};

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<TrainingSample> calibrate_grid(const plant::PlantParams& base, const CalibrationConfig& cfg,
                                                  const PlantGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TrainingSample> out;
  for (double mu : grid.mu_values) {
    for (double wb : grid.wheelbase_values) {
      for (std::size_t rep = 0; rep < grid.repetitions; ++rep) {
        plant::PlantParams p = base;
        p.mu = mu * (1.0 + grid.jitter * (2.0 * unit_uniform(rng) - 1.0));
        p.wheelbase = wb * (1.0 + grid.jitter * (2.0 * unit_uniform(rng) - 1.0));
        plant::Plant vehicle(p);
        out.push_back(calibrate_sample(vehicle, cfg));
      }
    }
  }
  return out;
}

}  // namespace hfcfdt::training
