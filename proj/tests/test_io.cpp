/*
 * Copyright 2026 The skymin Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skymin/runner.hpp"
#include "skymin/scenario_io.hpp"

using namespace skymin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("skymin_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Scenario tiny_scenario() {
  Scenario scn;
  scn.devices = {{100.0, 300.0}, {250.0, 100.0}};
  scn.device_energy = {10.0, 10.0};
  scn.uav_energy = 8000.0;
  scn.u_start = {0.0, 0.0};
  scn.u_end = {300.0, 400.0};
  scn.delta = 50.0;
  scn.n_segments = 12;
  scn.sca_tol = 5e-2;
  scn.validate();
  return scn;
}

}  // namespace

TEST_CASE("scenario parsing applies defaults and validates") {
  const std::string minimal = R"({
    "devices": [[100, 50], [400, 450], [250, 250]],
    "device_energy": 10.0,
    "uav_energy": 20000.0
  })";
  Scenario scn = io::parse_scenario(minimal);
  CHECK(scn.num_devices() == 3);
  CHECK(scn.propulsion.p0_blade == doctest::Approx(79.86));
  CHECK(scn.propulsion.p_induced == doctest::Approx(88.63));
  CHECK(scn.gamma0 == doctest::Approx(1e5));
  CHECK(scn.n_segments == 36);  // ceil of path / delta
  CHECK(scn.altitude == 100.0);

  // gamma0 in decibels or linear
  Scenario db = io::parse_scenario(R"({
    "devices": [[1, 1]], "device_energy": 5, "uav_energy": 9000,
    "gamma0": {"db": 40}
  })");
  CHECK(db.gamma0 == doctest::Approx(1e4));
  Scenario lin = io::parse_scenario(R"({
    "devices": [[1, 1]], "device_energy": 5, "uav_energy": 9000,
    "gamma0": {"linear": 12345.0}
  })");
  CHECK(lin.gamma0 == doctest::Approx(12345.0));
}

TEST_CASE("scenario parse errors name the field") {
  // missing devices
  try {
    io::parse_scenario(R"({"device_energy": 10, "uav_energy": 1000})");
    FAIL("expected error");
  } catch (const io::ScenarioParseError& e) {
    CHECK(std::string(e.what()).find("devices") != std::string::npos);
  }
  // segment cap above the flight height
  try {
    io::parse_scenario(R"({
      "devices": [[1, 1]], "device_energy": 5, "uav_energy": 9000,
      "delta": 150.0
    })");
    FAIL("expected error");
  } catch (const io::ScenarioParseError& e) {
    CHECK(std::string(e.what()).find("delta") != std::string::npos);
  }
}

TEST_CASE("scenario json round trip") {
  Scenario scn = tiny_scenario();
  Scenario back = io::parse_scenario(io::scenario_to_json(scn));
  CHECK(back.devices[1].y() == scn.devices[1].y());
  CHECK(back.uav_energy == scn.uav_energy);
  CHECK(back.n_segments == scn.n_segments);
  CHECK(back.propulsion.rotor_induced_v == scn.propulsion.rotor_induced_v);
}

TEST_CASE("generated scenarios are deterministic and uniform") {
  Scenario a = io::generate_scenario(99, 4);
  Scenario b = io::generate_scenario(99, 4);
  REQUIRE(a.num_devices() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(a.devices[k].x() == b.devices[k].x());  // bit-identical
    CHECK(a.devices[k].y() == b.devices[k].y());
  }
  CHECK(io::generate_scenario(100, 4).devices[0].x() != a.devices[0].x());
  CHECK(io::generate_scenario(5, 1).num_devices() == 1);

  // coarse uniformity: each 100x100 cell holds 4% +- 2% of 10^4 samples
  int cells[5][5] = {};
  int total = 0;
  for (std::uint64_t seed = 0; seed < 2500; ++seed) {
    Scenario s = io::generate_scenario(seed, 4);
    for (const auto& d : s.devices) {
      const int cx = std::min(4, static_cast<int>(d.x() / 100.0));
      const int cy = std::min(4, static_cast<int>(d.y() / 100.0));
      ++cells[cx][cy];
      ++total;
    }
  }
  REQUIRE(total == 10000);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(cells[i][j] >= 200);  // 2%
      CHECK(cells[i][j] <= 600);  // 6%
    }
  }
}

TEST_CASE("run writes audited artifacts deterministically") {
  const fs::path dir = fresh_dir("run");
  runner::RunConfig config;
  config.scenario = tiny_scenario();
  config.scheme = Scheme::Oma2;
  config.out_dir = dir.string();

  SolveReport rep = runner::run(config);
  REQUIRE(rep.status == SolveReport::Status::Converged);
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "allocation.csv"));
  CHECK(fs::exists(dir / "convergence.csv"));
  CHECK(!fs::exists(dir / "order.csv"));

  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"scheme\": \"oma2\"") != std::string::npos);
  CHECK(summary.find("\"ok\": true") != std::string::npos);
  CHECK(summary.find("hover_bound") != std::string::npos);

  // convergence values non-decreasing
  std::istringstream conv(slurp(dir / "convergence.csv"));
  std::string line;
  std::getline(conv, line);
  CHECK(line == "iter,eta");
  double prev = -1.0;
  while (std::getline(conv, line)) {
    const double eta = std::stod(line.substr(line.find(',') + 1));
    CHECK(eta >= prev - 1e-6);
    prev = eta;
  }

  // byte-identical rerun
  const std::string traj1 = slurp(dir / "trajectory.csv");
  const std::string alloc1 = slurp(dir / "allocation.csv");
  runner::run(config);
  CHECK(slurp(dir / "trajectory.csv") == traj1);
  CHECK(slurp(dir / "allocation.csv") == alloc1);
}

TEST_CASE("upper bound run emits only the summary") {
  const fs::path dir = fresh_dir("ub");
  runner::RunConfig config;
  config.scenario = tiny_scenario();
  config.scheme = Scheme::UpperBound;
  config.out_dir = dir.string();
  SolveReport rep = runner::run(config);
  CHECK(rep.eta == doctest::Approx(144.2695).epsilon(1e-5));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(!fs::exists(dir / "trajectory.csv"));
}

TEST_CASE("shared-window run on one device leaves the order file empty") {
  const fs::path dir = fresh_dir("noma1");
  runner::RunConfig config;
  config.scenario = tiny_scenario();
  config.scenario.devices = {{150.0, 250.0}};
  config.scenario.device_energy = {10.0};
  config.scheme = Scheme::Noma;
  config.out_dir = dir.string();
  runner::run(config);
  CHECK(slurp(dir / "order.csv") == "n,k,m,alpha\n");
}

TEST_CASE("conic dump behind the flag") {
  const fs::path dir = fresh_dir("dump");
  runner::RunConfig config;
  config.scenario = tiny_scenario();
  config.scheme = Scheme::Oma2;
  config.out_dir = dir.string();
  config.dump_conic = true;
  runner::run(config);
  const std::string prog = slurp(dir / "trajectory_program.txt");
  CHECK(prog.find("conic-program v1") == 0);
  CHECK(prog.find("maximize") != std::string::npos);
  CHECK(fs::exists(dir / "power_program.txt"));
}

TEST_CASE("sweep handles empty grids and failures gracefully") {
  const fs::path dir = fresh_dir("sweep");
  runner::RunConfig config;
  config.scenario = tiny_scenario();
  config.out_dir = dir.string();

  auto rows = runner::sweep(config, runner::SweepParam::UavEnergy, {},
                            {Scheme::Oma2});
  CHECK(rows.empty());
  CHECK(slurp(dir / "sweep.csv") == "scheme,value,eta,iterations,status\n");

  // a budget below the straight-flight cost becomes an error row
  rows = runner::sweep(config, runner::SweepParam::UavEnergy,
                       {4000.0, 8000.0}, {Scheme::Oma2}, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status.find("error") != std::string::npos);
  CHECK(rows[1].status == "converged");
  CHECK(rows[1].eta > 0.0);

  CHECK_THROWS_AS(runner::sweep(config, runner::SweepParam::UavEnergy,
                                {2.0, 1.0}, {Scheme::Oma2}),
                  std::invalid_argument);
}

#ifdef SKYMIN_CLI_BIN
TEST_CASE("command line surface") {
  const fs::path dir = fresh_dir("cli");
  const std::string bin = SKYMIN_CLI_BIN;
  const std::string scn_path = (dir / "scenario.json").string();

  auto sh = [](const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
  };

  // gen writes a loadable scenario
  CHECK(sh(bin + " gen --seed 7 --devices 2 --out " + scn_path) == 0);
  Scenario scn = io::load_scenario(scn_path);
  CHECK(scn.num_devices() == 2);

  // run the upper bound (instant) and a fast scheme
  CHECK(sh(bin + " run --scenario " + scn_path +
           " --scheme upper-bound --out " + (dir / "ub").string()) == 0);
  CHECK(fs::exists(dir / "ub" / "summary.json"));
  CHECK(sh(bin + " run --scenario " + scn_path +
           " --scheme oma2 --tol 0.05 --segments 12 --delta 60 --out " +
           (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "convergence.csv"));

  // infeasible scenario -> exit 2
  Scenario poor = scn;
  poor.uav_energy = 1000.0;
  io::save_scenario(poor, (dir / "poor.json").string());
  CHECK(sh(bin + " run --scenario " + (dir / "poor.json").string() +
           " --scheme oma2 --out " + (dir / "poor_out").string()) == 2);

  // unreadable scenario -> exit 4
  CHECK(sh(bin + " run --scenario " + (dir / "missing.json").string() +
           " --scheme oma2 --out " + (dir / "x").string()) == 4);

  // unknown scheme tag rejected
  CHECK(sh(bin + " run --scenario " + scn_path +
           " --scheme bogus --out " + (dir / "y").string()) != 0);
}
#endif
