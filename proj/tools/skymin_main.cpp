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

// skymin: plan energy-constrained UAV data-collection missions and compare
// multiple-access schemes. Exit codes: 0 success, 2 infeasible or invalid
// scenario, 3 solver failure, 4 I/O error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "skymin/bounds.hpp"
#include "skymin/noma.hpp"
#include "skymin/oma.hpp"
#include "skymin/runner.hpp"
#include "skymin/scenario_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::string default_out_dir() {
  const char* env = std::getenv("SKYMIN_OUT");
  return env != nullptr ? env : "skymin-out";
}

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = default_out_dir();
  std::vector<std::string> scheme_tags;
  std::uint64_t seed = 0;
  double delta = -1.0;
  int segments = -1;
  double tol = -1.0;
  double lambda = -1.0;
  int workers = 1;
  bool dump_conic = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool multi_scheme) {
  cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")
      ->required();
  cmd->add_option("--out", args.out_dir,
                  "output directory (default $SKYMIN_OUT or ./skymin-out)");
  auto* scheme = cmd->add_option(
      "--scheme", args.scheme_tags,
      "scheme: oma1|oma2|noma|straight-oma1|straight-oma2|straight-noma|"
      "upper-bound");
  if (!multi_scheme) scheme->expected(1);
  cmd->add_option("--seed", args.seed, "seed recorded in the summary");
  cmd->add_option("--delta", args.delta, "override segment length cap (m)");
  cmd->add_option("--segments", args.segments, "override segment count");
  cmd->add_option("--tol", args.tol, "override fractional-improvement stop");
  cmd->add_option("--lambda", args.lambda, "override order penalty weight");
  cmd->add_option("--workers", args.workers, "concurrent solves for grids");
  cmd->add_flag("--dump-conic", args.dump_conic,
                "dump the initial conic subproblems as text");
}

skymin::Scenario load_with_overrides(const CommonArgs& args) {
  skymin::Scenario scn = skymin::io::load_scenario(args.scenario_path);
  if (args.delta > 0.0) scn.delta = args.delta;
  if (args.segments > 0) scn.n_segments = args.segments;
  if (args.tol > 0.0) scn.sca_tol = args.tol;
  scn.validate();
  return scn;
}

std::vector<skymin::Scheme> parse_schemes(
    const std::vector<std::string>& tags,
    const std::vector<skymin::Scheme>& fallback) {
  if (tags.empty()) return fallback;
  std::vector<skymin::Scheme> out;
  for (const std::string& tag : tags) {
    const auto scheme = skymin::parse_scheme(tag);
    if (!scheme) {
      throw CLI::ValidationError("--scheme", "unknown scheme '" + tag + "'");
    }
    out.push_back(*scheme);
  }
  return out;
}

int report_exit(const skymin::SolveReport& report) {
  if (report.status == skymin::SolveReport::Status::SubproblemFailure) {
    std::cerr << "solver failure: " << report.message << "\n";
    return kExitSolver;
  }
  if (!report.audit.ok()) {
    std::cerr << "audit failed: " << report.audit.summary() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "skymin: max-min throughput planning for UAV data collection"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, compare_args;
  std::string sweep_param = "uav_energy";
  std::vector<double> sweep_values;

  auto* run_cmd = app.add_subcommand("run", "solve one scheme, write files");
  add_common(run_cmd, run_args, false);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "solve a grid over an energy budget");
  add_common(sweep_cmd, sweep_args, true);
  sweep_cmd->add_option("--param", sweep_param,
                        "swept parameter: uav_energy|device_energy");
  sweep_cmd->add_option("--values", sweep_values, "grid values, ascending")
      ->required();

  auto* compare_cmd =
      app.add_subcommand("compare", "run several schemes on one scenario");
  add_common(compare_cmd, compare_args, true);

  std::uint64_t gen_seed = 0;
  int gen_devices = 3;
  std::string gen_out = "scenario.json";
  auto* gen_cmd =
      app.add_subcommand("gen", "generate a random scenario file");
  gen_cmd->add_option("--seed", gen_seed, "placement seed");
  gen_cmd->add_option("--devices", gen_devices, "device count");
  gen_cmd->add_option("--out", gen_out, "output scenario path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      skymin::io::save_scenario(
          skymin::io::generate_scenario(gen_seed, gen_devices), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      skymin::runner::RunConfig config;
      config.scenario = load_with_overrides(run_args);
      config.scheme =
          parse_schemes(run_args.scheme_tags, {skymin::Scheme::Oma2})[0];
      config.out_dir = run_args.out_dir;
      config.tol = run_args.tol;
      config.lambda = run_args.lambda;
      config.dump_conic = run_args.dump_conic;
      config.seed = run_args.seed;
      const skymin::SolveReport report = skymin::runner::run(config);
      std::cout << skymin::to_string(report.scheme)
                << ": eta = " << report.eta << " bits/Hz in "
                << report.iterations << " iterations ("
                << report.wall_seconds << " s)\n";
      return report_exit(report);
    }

    const bool is_sweep = sweep_cmd->parsed();
    CommonArgs& args = is_sweep ? sweep_args : compare_args;
    skymin::runner::RunConfig config;
    config.scenario = load_with_overrides(args);
    config.out_dir = args.out_dir;
    config.tol = args.tol;
    config.lambda = args.lambda;
    config.seed = args.seed;

    const std::vector<skymin::Scheme> schemes = parse_schemes(
        args.scheme_tags,
        {skymin::Scheme::Oma1, skymin::Scheme::Oma2, skymin::Scheme::Noma});

    std::vector<skymin::runner::SweepRow> rows;
    if (is_sweep) {
      const auto param = sweep_param == "device_energy"
                             ? skymin::runner::SweepParam::DeviceEnergy
                             : skymin::runner::SweepParam::UavEnergy;
      if (sweep_param != "device_energy" && sweep_param != "uav_energy") {
        std::cerr << "unknown --param '" << sweep_param << "'\n";
        return kExitInfeasible;
      }
      rows = skymin::runner::sweep(config, param, sweep_values, schemes,
                                   args.workers);
    } else {
      rows = skymin::runner::compare(config, schemes, args.workers);
    }
    bool all_ok = true;
    for (const auto& row : rows) {
      std::cout << skymin::to_string(row.scheme);
      if (is_sweep) std::cout << " @ " << row.value;
      std::cout << ": eta = " << row.eta << " (" << row.status << ")\n";
      all_ok = all_ok && (row.status == "converged" ||
                          row.status == "iteration-cap");
    }
    return all_ok ? kExitOk : kExitSolver;
  } catch (const skymin::io::FileError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const skymin::runner::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const skymin::io::ScenarioParseError& e) {
    std::cerr << "bad scenario: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const skymin::ScenarioError& e) {
    std::cerr << "bad scenario: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const skymin::oma::InfeasibleBudget& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}
