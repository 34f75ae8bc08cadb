#pragma once

// Scenario and plant-grid files. The format is the small subset of TOML the
// configs need: [section] headers, key = value with numbers, quoted
// strings, booleans or flat arrays of numbers, and # comments. Unknown keys
// are rejected so typos do not silently fall back to defaults.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hfcfdt/errors.hpp"
#include "hfcfdt/format.hpp"
#include "hfcfdt/harness/scenario.hpp"
#include "hfcfdt/plant.hpp"
#include "hfcfdt/training.hpp"

namespace hfcfdt::harness {

class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, const std::string& origin = "<config>") {
    ConfigDocument doc;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      const auto fail = [&](const std::string& why) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + why);
      };
      line = strip(strip_comment(line));
      if (line.empty()) {
        if (end == text.size()) break;
        continue;
      }
      if (line.front() == '[') {
        if (line.back() != ']') fail("unterminated section header");
        section = std::string(strip(line.substr(1, line.size() - 2)));
        if (section.empty() || !is_bare_key(section)) fail("bad section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail("expected key = value");
      const std::string key(strip(line.substr(0, eq)));
      if (!is_bare_key(key)) fail("bad key '" + key + "'");
      const std::string full = section.empty() ? key : section + "." + key;
      if (doc.values_.count(full)) fail("duplicate key '" + full + "'");
      try {
        doc.values_[full] = parse_value(strip(line.substr(eq + 1)));
      } catch (const ConfigError& e) {
        fail(e.what());
      }
      if (end == text.size()) break;
    }
    return doc;
  }

  static ConfigDocument load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (v == nullptr) return fallback;
    if (v->kind != Kind::Number) throw ConfigError("key '" + key + "' must be a number");
    return v->number;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    const Value* v = find(key);
    if (v == nullptr) return fallback;
    std::uint64_t out = 0;
    const auto res = std::from_chars(v->raw.data(), v->raw.data() + v->raw.size(), out);
    if (v->kind != Kind::Number || res.ec != std::errc{} || res.ptr != v->raw.data() + v->raw.size()) {
      throw ConfigError("key '" + key + "' must be a non-negative integer");
    }
    return out;
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    if (v == nullptr) return fallback;
    if (v->kind != Kind::String) throw ConfigError("key '" + key + "' must be a quoted string");
    return v->raw;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    if (v == nullptr) return fallback;
    if (v->kind != Kind::Bool) throw ConfigError("key '" + key + "' must be true or false");
    return v->boolean;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    const Value* v = find(key);
    if (v == nullptr) return fallback;
    if (v->kind != Kind::Array) throw ConfigError("key '" + key + "' must be an array of numbers");
    return v->array;
  }

  /// Throws on any key nobody asked for.
  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
  }

 private:
  enum class Kind { Number, String, Bool, Array };

  struct Value {
    Kind kind = Kind::Number;
    double number = 0.0;
    bool boolean = false;
    std::vector<double> array;
    std::string raw;
  };

  const Value* find(const std::string& key) const {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  static std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  static std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  static bool is_bare_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
      if (!ok) return false;
    }
    return true;
  }

  static double parse_number(std::string_view s) {
    std::string cleaned;
    for (char c : s) {
      if (c != '_') cleaned.push_back(c);
    }
    return parse_double(cleaned);
  }

  static Value parse_value(std::string_view s) {
    Value v;
    if (s.empty()) throw ConfigError("missing value");
    if (s.front() == '"') {
      if (s.size() < 2 || s.back() != '"') throw ConfigError("unterminated string");
      v.kind = Kind::String;
      v.raw = std::string(s.substr(1, s.size() - 2));
      if (v.raw.find('"') != std::string::npos || v.raw.find('\\') != std::string::npos) {
        throw ConfigError("escapes are not supported in strings");
      }
      return v;
    }
    if (s == "true" || s == "false") {
      v.kind = Kind::Bool;
      v.boolean = s == "true";
      return v;
    }
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated array");
      v.kind = Kind::Array;
      std::string_view body = strip(s.substr(1, s.size() - 2));
      while (!body.empty()) {
        const auto comma = body.find(',');
        const auto item = strip(body.substr(0, comma));
        if (item.empty()) {
          if (comma == std::string_view::npos) break;  // trailing comma
          throw ConfigError("empty array element");
        }
        v.array.push_back(parse_number(item));
        if (comma == std::string_view::npos) break;
        body = strip(body.substr(comma + 1));
      }
      return v;
    }
    v.kind = Kind::Number;
    v.raw = std::string(s);
    v.number = parse_number(s);
    return v;
  }

  std::map<std::string, Value> values_;
  mutable std::set<std::string> used_;
};

namespace detail {

inline std::size_t count_value(const ConfigDocument& doc, const std::string& key, std::size_t fallback) {
  return static_cast<std::size_t>(doc.unsigned_integer(key, fallback));
}

}  // namespace detail

/// [plant] and [calibration] sections. k_v defaults to the value that makes
/// the nominal vehicle cruise at v_optimal under p_testing; r_optimal
/// defaults to the nominal turning radius at v_testing.
inline void load_plant(const ConfigDocument& doc, plant::PlantParams& p, plant::CalibrationConfig& c) {
  p.mu = doc.number("plant.mu", p.mu);
  p.mu_nominal = doc.number("plant.mu_nominal", p.mu_nominal);
  p.wheelbase = doc.number("plant.wheelbase", p.wheelbase);
  p.wheelbase_nominal = doc.number("plant.wheelbase_nominal", p.wheelbase_nominal);
  p.tau = doc.number("plant.tau", p.tau);
  p.k_s = doc.number("plant.k_s", p.k_s);
  p.phi_max = doc.number("plant.phi_max", p.phi_max);
  p.body_length = doc.number("plant.body_length", p.body_length);
  p.body_width = doc.number("plant.body_width", p.body_width);
  p.rear_overhang = doc.number("plant.rear_overhang", p.rear_overhang);
  p.actuators.p_max = doc.number("plant.p_max", p.actuators.p_max);
  p.actuators.v_max = doc.number("plant.v_max", p.actuators.v_max);

  c.p_testing = doc.number("calibration.p_testing", c.p_testing);
  c.v_testing = doc.number("calibration.v_testing", c.v_testing);
  c.v_optimal = doc.number("calibration.v_optimal", c.v_optimal);
  c.r_optimal = doc.number("calibration.r_optimal", c.r_optimal);
  c.tolerance = doc.number("calibration.tolerance", c.tolerance);
  c.max_iterations = detail::count_value(doc, "calibration.max_iterations", c.max_iterations);
  c.gain = doc.number("calibration.gain", c.gain);

  plant::harmonize(p, c);
  if (doc.has("plant.k_v")) p.k_v = doc.number("plant.k_v", p.k_v);
  p.validate();
  c.validate();
}

inline RunSetup load_run_setup(const ConfigDocument& doc) {
  RunSetup s;
  load_plant(doc, s.plant, s.calibration);

  Scenario& sc = s.scenario;
  sc.seed = doc.unsigned_integer("seed", sc.seed);
  sc.duration = doc.number("scenario.duration", sc.duration);
  sc.record_interval = doc.number("scenario.record_interval", sc.record_interval);
  sc.control_dt = doc.number("scenario.control_dt", sc.control_dt);
  sc.jitter_lateral = doc.number("scenario.jitter_lateral", sc.jitter_lateral);
  sc.jitter_heading = doc.number("scenario.jitter_heading", sc.jitter_heading);

  auto& g = sc.geometry;
  g.slot_length = doc.number("geometry.slot_length", g.slot_length);
  g.slot_depth = doc.number("geometry.slot_depth", g.slot_depth);
  g.lane_gap = doc.number("geometry.lane_gap", g.lane_gap);
  g.approach_length = doc.number("geometry.approach_length", g.approach_length);
  g.arc_radius = doc.number("geometry.arc_radius", g.arc_radius);
  g.counter_radius = doc.number("geometry.counter_radius", g.counter_radius);
  g.final_straight = doc.number("geometry.final_straight", g.final_straight);
  g.rear_gap = doc.number("geometry.rear_gap", g.rear_gap);
  g.path_spacing = doc.number("geometry.path_spacing", g.path_spacing);

  auto& c = sc.control;
  c.lookahead = doc.number("control.lookahead", c.lookahead);
  c.e_max = doc.number("control.e_max", c.e_max);
  c.edot_max = doc.number("control.edot_max", c.edot_max);
  c.speed_edot_max = doc.number("control.speed_edot_max", c.speed_edot_max);
  c.rate_filter = doc.number("control.rate_filter", c.rate_filter);
  c.stop_lead_time = doc.number("control.stop_lead_time", c.stop_lead_time);

  sc.tolerance.position = doc.number("tolerance.position", sc.tolerance.position);
  sc.tolerance.heading_deg = doc.number("tolerance.heading_deg", sc.tolerance.heading_deg);

  // The body travels with the vehicle; the slot is sized for the nominal one.
  sc.body = {s.plant.body_length, s.plant.body_width, s.plant.rear_overhang};
  doc.reject_unknown();
  sc.validate();
  sc.build();
  return s;
}

inline RunSetup load_run_setup(const std::string& path) { return load_run_setup(ConfigDocument::load(path)); }

struct GridSetup {
  plant::PlantParams base;
  plant::CalibrationConfig calibration;
  training::PlantGrid grid;
  std::uint64_t seed = 0;
};

inline GridSetup load_grid_setup(const ConfigDocument& doc) {
  GridSetup s;
  load_plant(doc, s.base, s.calibration);
  s.seed = doc.unsigned_integer("seed", s.seed);
  s.grid.mu_values = doc.numbers("grid.mu", {});
  s.grid.wheelbase_values = doc.numbers("grid.wheelbase", {});
  s.grid.repetitions = detail::count_value(doc, "grid.repetitions", 1);
  s.grid.jitter = doc.number("grid.jitter", 0.0);
  doc.reject_unknown();
  if (s.grid.mu_values.empty() || s.grid.wheelbase_values.empty()) {
    throw ConfigError("grid needs non-empty 'mu' and 'wheelbase' arrays");
  }
  if (s.grid.repetitions == 0) throw ConfigError("grid repetitions must be >= 1");
  if (!(s.grid.jitter >= 0.0 && s.grid.jitter < 0.5)) throw ConfigError("grid jitter must be in [0, 0.5)");
  return s;
}

inline GridSetup load_grid_setup(const std::string& path) { return load_grid_setup(ConfigDocument::load(path)); }

}  // namespace hfcfdt::harness
