#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tribus/errors.hpp"
#include "tribus/soe_fuse.hpp"

using namespace tribus;

namespace {

LoadModel reference_model() {
  LoadModel m;
  m.inrush_table = {{20, 0.15}, {40, 4.90 / 3.0 - 2.52 * 0.45 - 0.18}, {0, 0.0}};
  return m;
}

/// Brute-force inverse: scan every register value.
int scan_max_torque(const LoadModel& m, double limit, int n, int alpha) {
  int best = -1;
  for (int tau = 0; tau <= 1000; ++tau) {
    if (n * (m.current_slope * tau / 1000.0 + m.no_load_current + m.inrush(alpha)) <= limit) best = tau;
  }
  return best;
}

}  // namespace

TEST_CASE("calibration solves the inrush term from observed loads") {
  const std::vector<CalibrationRow> rows = {{5, 650, 20, 9.84}, {3, 450, 40, 4.90}};
  const auto table = calibrate_inrush(0.18, 2.52, rows);
  CHECK(table.at(20) == doctest::Approx(9.84 / 5 - 2.52 * 0.65 - 0.18).epsilon(1e-12));
  CHECK(table.at(20) == doctest::Approx(0.150).epsilon(1e-9));
  CHECK(table.at(40) == doctest::Approx(0.319333).epsilon(1e-5));

  // Substitute back: each observed load is reproduced.
  LoadModel m;
  m.inrush_table = table;
  for (const auto& r : rows) CHECK(std::abs(bus_load(m, r.n_active, r.tau, r.alpha) - r.observed_load) <= 1e-6);

  // Stall endpoint: one actuator at full register with zero inrush.
  const std::vector<CalibrationRow> stall = {{1, 1000, 0, 2.7}};
  CHECK(calibrate_inrush(0.18, 2.52, stall).at(0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("calibration rejects inconsistent and duplicate rows") {
  const std::vector<CalibrationRow> negative = {{5, 650, 20, 8.0}};
  CHECK_THROWS_AS(calibrate_inrush(0.18, 2.52, negative), ValidationError);
  const std::vector<CalibrationRow> dup = {{5, 650, 20, 9.84}, {3, 450, 20, 4.90}};
  CHECK_THROWS_AS(calibrate_inrush(0.18, 2.52, dup), ValidationError);
}

TEST_CASE("bus load follows the static plus inrush model") {
  const LoadModel m = reference_model();
  CHECK(bus_load(m, 5, 650, 20) == doctest::Approx(9.84).epsilon(1e-12));
  CHECK(bus_load(m, 3, 450, 40) == doctest::Approx(4.90).epsilon(1e-12));
  CHECK(bus_load(m, 1, 0, 0) == doctest::Approx(0.18));
  CHECK_THROWS_AS(bus_load(m, 1, 0, 30), DomainError);
  CHECK_THROWS_AS(bus_load(m, 1, 1001, 20), DomainError);
  CHECK_THROWS_AS(bus_load(m, 0, 100, 20), DomainError);
}

TEST_CASE("absent alpha is an error unless interpolation is enabled") {
  LoadModel m = reference_model();
  CHECK_FALSE(m.has_alpha(30));
  m.interpolate = true;
  CHECK(m.inrush(30) == doctest::Approx(0.5 * (m.inrush(20) + m.inrush(40))));
  CHECK_THROWS_AS(m.inrush(50), DomainError);
}

TEST_CASE("max_torque matches the closed form and a brute-force scan") {
  const LoadModel m = reference_model();
  CHECK(max_torque(m, 10.0, 5, 20) == 662);
  CHECK(max_torque(m, 10.0, 5, 20) == static_cast<int>(std::floor((10.0 / 5 - 0.18 - 0.15) / 2.52 * 1000)));
  // The printed Bus B setting sits below the algebraic cap.
  CHECK(max_torque(m, 5.0, 3, 40) == 463);
  CHECK(max_torque(m, 5.0, 3, 40) >= 450);
  // Exactly at the zero-torque load.
  CHECK(max_torque(m, 5 * (0.18 + 0.15), 5, 20) == 0);
  CHECK(max_torque(m, 100.0, 1, 20) == 1000);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const int alpha = i % 2 ? 20 : 40;
    const double floor_load = n * (0.18 + m.inrush(alpha));
    const double limit = floor_load + testing::uniform(rng, 0.0, 4.0 * n);
    const int cap = max_torque(m, limit, n, alpha);
    CHECK(cap == scan_max_torque(m, limit, n, alpha));
    CHECK(bus_load(m, n, cap, alpha) <= limit);
    if (cap < 1000) CHECK(bus_load(m, n, cap + 1, alpha) > limit);
  }
}

TEST_CASE("infeasible limits report the minimum achievable load") {
  const LoadModel m = reference_model();
  try {
    max_torque(m, 1.0, 5, 20);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.min_achievable_load() == doctest::Approx(5 * 0.33));
  }
}

TEST_CASE("monotonicity of load and cap") {
  const LoadModel m = reference_model();
  for (int tau = 0; tau < 1000; tau += 37) CHECK(bus_load(m, 3, tau + 1, 40) > bus_load(m, 3, tau, 40));
  for (int n = 1; n < 12; ++n) CHECK(bus_load(m, n + 1, 300, 40) > bus_load(m, n, 300, 40));
  int prev = 1001;
  for (int n = 1; n <= 12; ++n) {
    const int cap = max_torque(m, 10.0, n, 20);
    CHECK(cap <= prev);
    prev = cap;
  }
  // Larger D lowers the cap; 40 has the bigger inrush term.
  CHECK(max_torque(m, 5.0, 3, 40) < max_torque(m, 5.0, 3, 20));
}

TEST_CASE("fuse synthesis on the reference topology") {
  const Config& cfg = testing::reference_config();
  const auto fuses = synthesize_fuses(cfg.topology, cfg.load_model.model);
  REQUIRE(fuses.size() == 2);
  CHECK(fuses[0].bus_id == "bus_a");
  CHECK(fuses[0].torque_cap == 662);
  CHECK(fuses[0].headroom == doctest::Approx(0.16).epsilon(1e-9));
  CHECK(fuses[1].torque_cap == 463);
  CHECK(fuses[1].headroom == doctest::Approx(0.10).epsilon(1e-9));
  for (const auto& f : fuses) {
    CHECK(f.predicted_load <= f.port_limit);
    CHECK(f.load_at_cap <= f.port_limit);
    CHECK(f.headroom >= 0.0);
  }
  // Margin is subtracted from the cap.
  const auto margined = synthesize_fuses(cfg.topology, cfg.load_model.model, 12);
  CHECK(margined[0].torque_cap == 650);
}

TEST_CASE("shared port splits by active count and subtracts compute") {
  const Config& cfg = testing::shared_bus_config();
  const auto fuses = synthesize_fuses(cfg.topology, cfg.load_model.model);
  const double available = 10.0 - 2.08;
  CHECK(fuses[0].port_limit == doctest::Approx(available * 5 / 8));
  CHECK(fuses[1].port_limit == doctest::Approx(available * 3 / 8));
  CHECK(fuses[0].load_at_cap + fuses[1].load_at_cap + 2.08 <= 10.0);
}

TEST_CASE("all servos on one port is infeasible or near zero") {
  Config cfg = testing::reference_config();
  cfg.topology.buses = {{"all", "usb_c2", cfg.topology.buses[0].actuator_ids, 17, 650, 20}};
  for (const auto& b : testing::reference_config().topology.buses) {
    if (b.id == "bus_b")
      cfg.topology.buses[0].actuator_ids.insert(cfg.topology.buses[0].actuator_ids.end(), b.actuator_ids.begin(),
                                                b.actuator_ids.end());
  }
  // 17 * (0.18 + 0.15) = 5.61 A fits at zero torque, so the cap collapses instead of throwing.
  const auto fuses = synthesize_fuses(cfg.topology, cfg.load_model.model);
  CHECK(fuses[0].torque_cap == static_cast<int>(std::floor((10.0 / 17 - 0.33) / 2.52 * 1000)));
  CHECK(fuses[0].torque_cap < 650 / 4);
  cfg.topology.ports[1].rated_current = 5.0;
  CHECK_THROWS_AS(synthesize_fuses(cfg.topology, cfg.load_model.model), InfeasibleError);

  cfg.topology.buses.clear();
  CHECK(synthesize_fuses(cfg.topology, cfg.load_model.model).empty());
}
