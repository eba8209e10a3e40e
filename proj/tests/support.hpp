#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "tribus/config.hpp"
#include "tribus/power_sim.hpp"

#ifndef TRIBUS_SOURCE_DIR
#error "TRIBUS_SOURCE_DIR must point at the repository root"
#endif

namespace testing {

inline std::string source_path(const std::string& relative) {
  return (std::filesystem::path(TRIBUS_SOURCE_DIR) / relative).string();
}

inline const tribus::Config& reference_config() {
  static const tribus::Config cfg = tribus::load_config(source_path("configs/tribus.json"));
  return cfg;
}

inline const tribus::Config& shared_bus_config() {
  static const tribus::Config cfg = tribus::load_config(source_path("configs/shared_bus.json"));
  return cfg;
}

inline nlohmann::json reference_json() {
  return tribus::parse_json_text(tribus::read_text_file(source_path("configs/tribus.json")), "tribus.json");
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tribus_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random commands within the synthesized caps and declared N_a, plus one compute window.
inline tribus::Scenario fuse_respecting_scenario(const tribus::Config& cfg, std::mt19937_64& rng, double duration,
                                                 double dt) {
  const auto fuses = tribus::synthesize_fuses(cfg.topology, cfg.load_model.model);
  tribus::Scenario s;
  s.duration = duration;
  s.dt = dt;
  for (std::size_t b = 0; b < cfg.topology.buses.size(); ++b) {
    const auto& bus = cfg.topology.buses[b];
    double t = uniform(rng, 0.0, 2.0);
    while (t < duration - 0.5) {
      const double end = std::min(t + uniform(rng, 0.2, 8.0), duration);
      const int n = std::uniform_int_distribution<int>(1, bus.active_count)(rng);
      const double tau = std::uniform_int_distribution<int>(0, fuses[b].torque_cap)(rng);
      s.commands.push_back({t, end, bus.id, n, tau, bus.accel_setting});
      t = end + uniform(rng, 0.0, 3.0);
    }
  }
  const double w0 = uniform(rng, 0.0, duration / 2);
  s.compute_profile.push_back({w0, uniform(rng, w0 + 0.1, duration), uniform(rng, 15.0, 25.0)});
  return s;
}

}  // namespace testing
