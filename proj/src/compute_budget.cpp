#include "tribus/compute_budget.hpp"

#include <cmath>

#include "json_reader.hpp"
#include "tribus/errors.hpp"

namespace tribus {

using detail::JsonObject;

void validate(const LatencyProfile& profile, const std::string& path) {
  if (profile.model_name.empty()) throw ValidationError(path + ".model_name", "empty name");
  if (profile.horizon < 1) throw ValidationError(path + ".horizon", "must be >= 1");
  if (profile.prefix < 1 || profile.prefix > profile.horizon)
    throw ValidationError(path + ".prefix", "need 1 <= K <= H");
  if (profile.sampling_steps && *profile.sampling_steps < 1)
    throw ValidationError(path + ".sampling_steps", "must be >= 1");
  if (!(profile.mean_latency > 0.0)) throw ValidationError(path + ".mean_latency", "must be > 0");
  if (!(profile.std_latency >= 0.0)) throw ValidationError(path + ".std_latency", "must be >= 0");
}

double replan_frequency(const LatencyProfile& profile) {
  if (!(profile.mean_latency > 0.0)) throw DomainError("mean latency must be > 0");
  return 1.0 / profile.mean_latency;
}

ScheduleCheck schedule_feasibility(const LatencyProfile& profile, double action_rate, double jitter_sigmas) {
  if (!(action_rate > 0.0)) throw DomainError("action rate must be > 0");
  const double budget = profile.prefix / action_rate;
  const double need = profile.mean_latency + jitter_sigmas * profile.std_latency;
  ScheduleCheck out;
  out.slack = budget - need;
  out.feasible = need <= budget;
  return out;
}

LatencyBudget budget_report(const LatencyProfile& profile, std::span<const double> action_rates,
                            double jitter_sigmas) {
  LatencyBudget out;
  out.model_name = profile.model_name;
  out.f_replan_max = replan_frequency(profile);
  out.max_sustainable_action_rate = profile.prefix * out.f_replan_max;
  for (double rate : action_rates) {
    const ScheduleCheck c = schedule_feasibility(profile, rate, jitter_sigmas);
    out.action_rates.push_back({rate, c.feasible, c.slack});
  }
  return out;
}

ComputePowerCheck compute_power_check(double watts, const PduPort& port, double current_cap) {
  if (!(watts >= 0.0)) throw DomainError("compute power must be >= 0");
  ComputePowerCheck out;
  out.current = watts / port.nominal_voltage;
  out.limit = std::min(current_cap, port.hardware_limit());
  out.fits = out.current <= out.limit;
  return out;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Small nudge absorbs representation error such as 0.15 -> 0.1499999.
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

std::vector<LatencyProfile> profiles_from_json(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    JsonObject root(doc, "", true);
    list = &root.raw("profiles");
    root.finish();
  }
  detail::require_array(*list, "profiles");
  std::vector<LatencyProfile> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const std::string path = detail::index_path("profiles", i);
    JsonObject item((*list)[i], path, true);
    LatencyProfile p;
    p.model_name = item.required<std::string>("model_name");
    p.horizon = item.required<int>("horizon");
    p.prefix = item.required<int>("prefix");
    if (item.has("sampling_steps")) p.sampling_steps = item.required<int>("sampling_steps");
    p.mean_latency = item.required<double>("mean_latency");
    p.std_latency = item.optional<double>("std_latency", 0.0);
    item.finish();
    validate(p, path);
    out.push_back(std::move(p));
  }
  return out;
}

nlohmann::json to_json(const LatencyBudget& budget) {
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& r : budget.action_rates) {
    rates.push_back({{"action_rate", r.action_rate}, {"feasible", r.feasible}, {"slack", r.slack}});
  }
  return {{"model_name", budget.model_name},
          {"f_replan_max", budget.f_replan_max},
          {"f_replan_max_rounded", round_half_up(budget.f_replan_max, 1)},
          {"max_sustainable_action_rate", budget.max_sustainable_action_rate},
          {"action_rates", rates}};
}

}  // namespace tribus
