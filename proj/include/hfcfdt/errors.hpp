#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hfcfdt {

/// Bad or missing configuration: malformed files, invalid parameters,
/// untrained supervisors. The CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training could not produce a tree (too few clusters, empty category).
class TrainingError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A simulation-side precondition was broken (bad dt, out-of-range
/// actuator command). The CLI maps it to exit code 2.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A virtual sensor could not produce a reading.
class SensorError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// The calibration tuning loop did not converge.
class CalibrationError : public ContractViolation {
 public:
  CalibrationError(std::string stage, const std::string& what)
      : ContractViolation("calibration failed in stage '" + stage + "': " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace hfcfdt
