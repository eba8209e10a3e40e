#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tribus/robot_model.hpp"

namespace tribus {

/// Chunked-policy inference timing: H actions per inference, the first K executed.
struct LatencyProfile {
  std::string model_name;
  int horizon = 1;
  int prefix = 1;
  std::optional<int> sampling_steps;
  double mean_latency = 0.0;  // seconds
  double std_latency = 0.0;   // seconds
};

void validate(const LatencyProfile& profile, const std::string& path);

/// 1 / mean end-to-end latency, hertz.
double replan_frequency(const LatencyProfile& profile);

struct ScheduleCheck {
  bool feasible = false;
  /// K / action_rate - (mean + sigmas * std), seconds.
  double slack = 0.0;
};

ScheduleCheck schedule_feasibility(const LatencyProfile& profile, double action_rate, double jitter_sigmas = 0.0);

struct RateCheck {
  double action_rate = 0.0;
  bool feasible = false;
  double slack = 0.0;
};

struct LatencyBudget {
  std::string model_name;
  double f_replan_max = 0.0;
  std::vector<RateCheck> action_rates;
  double max_sustainable_action_rate = 0.0;
};

LatencyBudget budget_report(const LatencyProfile& profile, std::span<const double> action_rates,
                            double jitter_sigmas = 0.0);

/// Jetson-port current envelope: < 2.1 A at 12 V.
inline constexpr double kComputeCurrentCap = 2.1;

struct ComputePowerCheck {
  bool fits = false;
  double current = 0.0;
  double limit = 0.0;
};

ComputePowerCheck compute_power_check(double watts, const PduPort& port, double current_cap = kComputeCurrentCap);

/// Round half up to `decimals` places (reporting convention).
double round_half_up(double value, int decimals);

std::vector<LatencyProfile> profiles_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const LatencyBudget& budget);

}  // namespace tribus
