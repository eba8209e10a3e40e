#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tribus::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_config(const fs::path& dir, const nlohmann::json& doc) {
  const auto path = (dir / "config.json").string();
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::string kConfig = testing::source_path("configs/tribus.json");

}  // namespace

TEST_CASE("validate succeeds on the reference config") {
  const auto dir = testing::scratch_dir("cli_validate");
  const Result r = run({"--config", kConfig, "--out-dir", dir.string(), "validate"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("out-of-range torque cap is a validation error naming the field") {
  const auto dir = testing::scratch_dir("cli_cap");
  auto doc = testing::reference_json();
  doc["buses"][0]["torque_cap"] = 1200;
  const Result r = run({"--config", write_config(dir, doc), "--out-dir", dir.string(), "validate"});
  CHECK(r.code == 3);
  CHECK(r.err.find("buses[0].torque_cap") != std::string::npos);
}

TEST_CASE("parse failures exit 2") {
  const auto dir = testing::scratch_dir("cli_parse");
  CHECK(run({"--config", (dir / "nope.json").string(), "--out-dir", dir.string(), "validate"}).code == 2);
  const auto bad = (dir / "bad.json").string();
  std::ofstream(bad) << "{\"ports\": [";
  CHECK(run({"--config", bad, "--out-dir", dir.string(), "validate"}).code == 2);
  CHECK(run({"--out-dir", dir.string(), "frobnicate"}).code == 2);
  CHECK(run({"--out-dir", dir.string(), "validate"}).code == 2);
}

TEST_CASE("unknown keys are rejected unless lenient") {
  const auto dir = testing::scratch_dir("cli_lenient");
  auto doc = testing::reference_json();
  doc["bogus_section"] = 1;
  const auto path = write_config(dir, doc);
  const Result strict = run({"--config", path, "--out-dir", dir.string(), "validate"});
  CHECK(strict.code == 3);
  CHECK(strict.err.find("bogus_section") != std::string::npos);
  CHECK(run({"--config", path, "--out-dir", dir.string(), "--lenient", "validate"}).code == 0);
}

TEST_CASE("fuse writes caps") {
  const auto dir = testing::scratch_dir("cli_fuse");
  const Result r = run({"--config", kConfig, "--out-dir", dir.string(), "--quiet", "fuse"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(dir / "fuses.json"));
  CHECK(j.at("fuses").size() == 2);
}

TEST_CASE("unreachable target exits 4 from the ik stage") {
  const auto dir = testing::scratch_dir("cli_unreachable");
  const Result r = run({"--config", kConfig, "--out-dir", dir.string(), "scenario", "--scene",
                        testing::source_path("data/scenes/unreachable.json")});
  CHECK(r.code == 4);
  CHECK(r.err.find("ik: stalled") != std::string::npos);
  CHECK(fs::exists(dir / "detection.json"));
  CHECK_FALSE(fs::exists(dir / "trace.csv"));
}

TEST_CASE("shared bus trips without fuses and holds with them") {
  const auto dir = testing::scratch_dir("cli_shared");
  const auto cfg = testing::source_path("configs/shared_bus.json");
  const auto scene = testing::source_path("data/scenes/red_cube_030.json");
  const Result unfused = run({"--config", cfg, "--out-dir", dir.string(), "scenario", "--scene", scene, "--no-fuses"});
  CHECK(unfused.code == 4);
  CHECK(unfused.err.find("simulate:") != std::string::npos);
  const auto events = nlohmann::json::parse(slurp(dir / "events.json"));
  CHECK_FALSE(events.empty());
  CHECK(run({"--config", cfg, "--out-dir", dir.string(), "scenario", "--scene", scene}).code == 0);
}

TEST_CASE("scenario outputs are byte-identical across runs") {
  const auto a = testing::scratch_dir("cli_det_a");
  const auto b = testing::scratch_dir("cli_det_b");
  const auto scene = testing::source_path("data/scenes/red_cube_030.json");
  for (const auto& dir : {a, b}) {
    REQUIRE(run({"--config", kConfig, "--seed", "7", "--out-dir", dir.string(), "scenario", "--scene", scene}).code == 0);
  }
  for (const char* name : {"detection.json", "trajectory.csv", "commands.json", "trace.csv", "events.json"}) {
    CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name);
    CHECK(!slurp(a / name).empty());
  }
}

TEST_CASE("manifest hash can be recomputed from the inputs") {
  const auto dir = testing::scratch_dir("cli_manifest");
  REQUIRE(run({"--config", kConfig, "--seed", "3", "--out-dir", dir.string(), "stiffness"}).code == 0);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("command") == "stiffness");
  CHECK(m.at("seed") == 3);
  CHECK(m.at("exit_code") == 0);
  const auto inputs = m.at("inputs").get<std::vector<std::string>>();
  CHECK(m.at("config_hash") == tribus::cli::hash_inputs(inputs));
  CHECK(m.at("config_hash").get<std::string>().size() == 64);
  CHECK(tribus::cli::hash_inputs({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("ik command honours the target and frozen joints") {
  const auto dir = testing::scratch_dir("cli_ik");
  const Result r = run({"--config", kConfig, "--out-dir", dir.string(), "ik", "--target", "0.28,0,0.06,1,0,0,0",
                        "--freeze", "pan"});
  CHECK(r.code == 0);
  std::istringstream csv(slurp(dir / "trajectory.csv"));
  std::string header, first, line, last;
  std::getline(csv, header);
  std::getline(csv, first);
  while (std::getline(csv, line)) last = line;
  CHECK(header.rfind("t,q0", 0) == 0);
  // Column 1 is q0 (pan), frozen at its home value.
  auto col = [](const std::string& row, int k) {
    std::istringstream s(row);
    std::string cell;
    for (int i = 0; i <= k; ++i) std::getline(s, cell, ',');
    return cell;
  };
  CHECK(col(first, 1) == col(last, 1));
}

TEST_CASE("budget and perceive commands") {
  const auto dir = testing::scratch_dir("cli_misc");
  CHECK(run({"--out-dir", dir.string(), "budget", "--profiles", testing::source_path("data/profiles/policies.json")}).code == 0);
  const auto b = nlohmann::json::parse(slurp(dir / "budget.json"));
  CHECK(b.size() >= 1);
  CHECK(run({"--config", kConfig, "--out-dir", dir.string(), "perceive", "--scene",
             testing::source_path("data/scenes/red_cube_030.json")}).code == 0);
  CHECK(run({"--config", kConfig, "--out-dir", dir.string(), "perceive", "--scene",
             testing::source_path("data/scenes/red_cube_030.json"), "--label", "blue"}).code == 4);
}

TEST_CASE("freeze accepts chain names") {
  const auto dir = testing::scratch_dir("cli_freeze");
  const std::vector<std::string> base = {"--config", kConfig, "--out-dir", dir.string(), "ik", "--target", "0.28,0,0.06,1,0,0,0"};
  auto with = [&](const std::string& f) {
    auto args = base;
    args.insert(args.end(), {"--freeze", f});
    return run(args);
  };
  CHECK(with("neck").code == 0);
  const Result self = with("arm");
  CHECK(self.code == 4);
  CHECK(self.err.find("every joint is frozen") != std::string::npos);
  CHECK(with("elbowz").code == 3);
}
