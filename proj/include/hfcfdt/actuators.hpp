#pragma once

namespace hfcfdt {

/// Motor power is in [0, p_max] watts, servo voltage in [-v_max, v_max] volts.
struct ActuatorRange {
  double p_max = 1000.0;
  double v_max = 5.0;
};

}  // namespace hfcfdt
