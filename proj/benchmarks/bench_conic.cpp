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

#include "skymin/conic/program.hpp"
#include "skymin/conic/solver.hpp"
#include "skymin/oma.hpp"
#include "skymin/scenario_io.hpp"

using namespace skymin;

namespace {

// geometric program mixing every cone family the subproblems use
conic::Program mixed_cone_program(int blocks) {
  conic::Program prog;
  conic::LinExpr objective;
  for (int i = 0; i < blocks; ++i) {
    const int r = prog.new_var();
    const int x = prog.new_var();
    const int e = prog.new_var();
    prog.add_hypograph_log_affine(r, 5.0 + i % 7, x);
    prog.add_nonneg(conic::LinExpr(0.5) - conic::LinExpr::variable(x));
    prog.add_cubic_over_square(conic::LinExpr::variable(e),
                               conic::LinExpr(1.0 + 0.1 * (i % 5)),
                               conic::LinExpr(2.0));
    prog.add_nonneg(conic::LinExpr(50.0) - conic::LinExpr::variable(e));
    objective += conic::LinExpr::variable(r) -
                 0.01 * conic::LinExpr::variable(e);
  }
  prog.maximize(objective);
  return prog;
}

void bm_mixed_cones(benchmark::State& state) {
  const conic::Program prog = mixed_cone_program(
      static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(conic::solve(prog));
  }
}
BENCHMARK(bm_mixed_cones)->Arg(8)->Arg(32)->Arg(128)
    ->Unit(benchmark::kMillisecond);

void bm_trajectory_subproblem(benchmark::State& state) {
  Scenario scn = io::generate_scenario(7, 3);
  scn.uav_energy = 12e3;
  scn.delta = 500.0 / static_cast<double>(state.range(0)) * 1.5;
  scn.delta = std::min(scn.delta, 100.0);
  scn.n_segments = static_cast<int>(state.range(0));
  scn.validate();
  const auto local = oma::init_solution(scn, oma::Variant::AdaptiveTime);
  for (auto _ : state) {
    auto built = oma::build_trajectory_subproblem(
        local, scn, oma::Variant::AdaptiveTime);
    benchmark::DoNotOptimize(conic::solve(built.prog, built.warm));
  }
}
BENCHMARK(bm_trajectory_subproblem)->Arg(12)->Arg(24)->Arg(36)
    ->Unit(benchmark::kMillisecond);

void bm_power_subproblem(benchmark::State& state) {
  Scenario scn = io::generate_scenario(7, 3);
  scn.uav_energy = 12e3;
  scn.delta = 500.0 / static_cast<double>(state.range(0)) * 1.5;
  scn.delta = std::min(scn.delta, 100.0);
  scn.n_segments = static_cast<int>(state.range(0));
  scn.validate();
  const auto local = oma::init_solution(scn, oma::Variant::AdaptiveTime);
  for (auto _ : state) {
    auto built =
        oma::build_power_subproblem(local, scn, oma::Variant::AdaptiveTime);
    benchmark::DoNotOptimize(conic::solve(built.prog, built.warm));
  }
}
BENCHMARK(bm_power_subproblem)->Arg(12)->Arg(24)->Arg(36)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
