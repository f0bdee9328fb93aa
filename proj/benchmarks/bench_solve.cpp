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

#include <benchmark/benchmark.h>

#include "skymin/noma.hpp"
#include "skymin/oma.hpp"
#include "skymin/scenario_io.hpp"

using namespace skymin;

namespace {

Scenario bench_scenario(int segments) {
  Scenario scn = io::generate_scenario(11, 3);
  scn.uav_energy = 10e3;
  scn.delta = 60.0;
  scn.n_segments = segments;
  scn.validate();
  return scn;
}

void bm_oma_solve(benchmark::State& state) {
  const Scenario scn = bench_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    oma::SolveOptions opt;
    opt.max_outer = 4;  // fixed work per repetition
    opt.tol = 1e-9;
    benchmark::DoNotOptimize(oma::solve(scn, opt));
  }
}
BENCHMARK(bm_oma_solve)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

void bm_noma_solve(benchmark::State& state) {
  const Scenario scn = bench_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    noma::SolveOptions opt;
    opt.max_outer = 3;
    opt.tol = 1e-9;
    benchmark::DoNotOptimize(noma::solve(scn, opt));
  }
}
BENCHMARK(bm_noma_solve)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

void bm_order_design(benchmark::State& state) {
  Scenario scn = io::generate_scenario(13, 3);
  scn.device_energy = {1e6, 1e6, 1e6};
  scn.uav_energy = 1e9;
  scn.delta = 100.0;
  scn.n_segments = static_cast<int>(state.range(0));
  scn.validate();
  Trajectory traj = Trajectory::straight_line(scn, 18.0);
  Eigen::VectorXd tau = Eigen::VectorXd::Constant(scn.n_segments, 1.0);
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(3, scn.n_segments, 0.05);
  const auto local = noma::LocalPoint::from_primal(
      traj, tau, p, noma::init_order(traj, scn), scn);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        noma::solve_order(local, scn, noma::PenaltyConfig{}));
  }
}
BENCHMARK(bm_order_design)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
