#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tribus/robot_model.hpp"

namespace tribus {

/// Per-actuator current model:
///
///   I_bus = N_a * (slope * tau / 1000 + no_load + D(alpha))
///
/// where D(alpha) is the calibrated inrush allowance for acceleration
/// register alpha.
struct LoadModel {
  double no_load_current = 0.18;
  double current_slope = 2.52;
  std::map<int, double> inrush_table;
  /// Linear interpolation between table rows. Off means an absent alpha is an error.
  bool interpolate = false;

  double inrush(int alpha) const;
  bool has_alpha(int alpha) const;
};

/// One observed operating point used to solve for D(alpha).
struct CalibrationRow {
  int n_active = 1;
  double tau = 0.0;
  int alpha = 0;
  double observed_load = 0.0;
};

struct FuseSetting {
  std::string bus_id;
  /// Highest register value whose predicted load stays within `port_limit`.
  int torque_cap = 0;
  /// Configured bus torque, clamped to `torque_cap`.
  int operating_torque = 0;
  /// Load at `operating_torque`.
  double predicted_load = 0.0;
  /// Load at `torque_cap`.
  double load_at_cap = 0.0;
  /// Current available to this bus after compute loads and port sharing.
  double port_limit = 0.0;
  double headroom = 0.0;
};

double bus_load(const LoadModel& model, int n_active, double tau, int alpha);

/// Largest integer register value in [0, 1000] whose bus load does not exceed
/// `port_limit`. Throws InfeasibleError when even zero torque is too much.
int max_torque(const LoadModel& model, double port_limit, int n_active, int alpha);

/// Solves D(alpha) for each row. Rows must have distinct alphas; a negative
/// solution is reported as a ValidationError rather than clamped.
std::map<int, double> calibrate_inrush(double no_load_current, double current_slope,
                                       std::span<const CalibrationRow> rows);

/// One fuse per bus. Compute loads on a port are subtracted from its budget,
/// and buses sharing a port split the remainder in proportion to N_a.
std::vector<FuseSetting> synthesize_fuses(const PowerTopology& topology, const LoadModel& model,
                                          int margin_registers = 0);

}  // namespace tribus
