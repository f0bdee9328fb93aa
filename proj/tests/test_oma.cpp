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

#include <cmath>

#include "skymin/bounds.hpp"
#include "skymin/oma.hpp"
#include "skymin/throughput.hpp"

using namespace skymin;

namespace {

Scenario small_scenario() {
  Scenario scn;
  scn.devices = {{100.0, 300.0}, {250.0, 100.0}};
  scn.device_energy = {10.0, 10.0};
  scn.uav_energy = 8000.0;
  scn.u_start = {0.0, 0.0};
  scn.u_end = {300.0, 400.0};
  scn.delta = 50.0;
  scn.n_segments = 12;
  scn.validate();
  return scn;
}

Scenario field_scenario() {
  Scenario scn = Scenario::with_defaults(
      {{460.0, 80.0}, {100.0, 420.0}, {350.0, 250.0}}, 10.0, 8000.0);
  scn.validate();
  return scn;
}

}  // namespace

TEST_CASE("init solution matches the stock recipe") {
  Scenario scn = field_scenario();
  auto local = oma::init_solution(scn, oma::Variant::AdaptiveTime);

  // ceil(sqrt(2)*500 / 20) segments of equal duration
  CHECK(scn.n_segments == 36);
  CHECK(local.traj.num_segments() == 36);
  const double t0 = local.traj.durations[0];
  for (double t : local.traj.durations) CHECK(t == doctest::Approx(t0));

  // flown at maximum-range speed
  const double v_mr = bounds::max_range_speed(scn.propulsion, scn.v_max);
  CHECK(local.traj.speed(0) == doctest::Approx(v_mr).epsilon(1e-9));

  // equal slices, power at the cap when the budget allows
  for (int n = 0; n < 36; ++n) {
    for (int k = 0; k < 3; ++k) {
      CHECK(local.tau(k, n) == doctest::Approx(t0 / 3.0));
      CHECK(local.power(k, n) == doctest::Approx(0.1));
    }
  }

  // small budgets force power below the cap, spending exactly the budget
  Scenario tight = scn;
  tight.device_energy = {0.5, 0.5, 0.5};
  auto local2 = oma::init_solution(tight, oma::Variant::AdaptiveTime);
  const double tau_total = local2.tau.row(0).sum();
  CHECK(local2.power(0, 0) ==
        doctest::Approx(0.5 / tau_total).epsilon(1e-9));
  CHECK(local2.power(0, 0) < 0.1);
}

TEST_CASE("straight flight beyond the budget is reported with the deficit") {
  Scenario scn = field_scenario();
  scn.uav_energy = 4000.0;  // below the ~6.2 kJ straight cost
  try {
    oma::init_solution(scn, oma::Variant::AdaptiveTime);
    FAIL("expected InfeasibleBudget");
  } catch (const oma::InfeasibleBudget& e) {
    CHECK(e.deficit > 2000.0);
    CHECK(e.deficit < 3000.0);
  }
}

TEST_CASE("trajectory step never loses to its expansion point") {
  Scenario scn = small_scenario();
  auto local = oma::init_solution(scn, oma::Variant::AdaptiveTime);
  const double eta0 = local.min_throughput(scn);

  auto built = oma::build_trajectory_subproblem(local, scn,
                                                oma::Variant::AdaptiveTime);
  CHECK(built.prog.max_violation(built.warm) <= 1e-9);
  auto sol = conic::solve(built.prog, built.warm);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);
  CHECK(sol.objective >= eta0 - 1e-6);
}

TEST_CASE("no energy slack keeps the path straight") {
  Scenario scn = small_scenario();
  const double v_mr = bounds::max_range_speed(scn.propulsion, scn.v_max);
  const Trajectory line = Trajectory::straight_line(scn, v_mr);
  scn.uav_energy = trajectory_energy(line, scn.propulsion) * 1.0005;

  oma::SolveOptions opt;
  opt.max_outer = 6;
  auto rep = oma::solve(scn, opt);
  REQUIRE(rep.status != SolveReport::Status::SubproblemFailure);
  const Eigen::Vector2d dir = (scn.u_end - scn.u_start).normalized();
  for (const auto& w : rep.trajectory.waypoints) {
    const Eigen::Vector2d rel = w - scn.u_start;
    const double off_line = std::abs(rel.x() * dir.y() - rel.y() * dir.x());
    CHECK(off_line <= scn.delta);
  }
  // with no spare energy the flight has to stay near the best-range speed
  for (int n = 0; n < rep.trajectory.num_segments(); ++n) {
    CHECK(rep.trajectory.speed(n) == doctest::Approx(v_mr).epsilon(0.15));
  }
}

TEST_CASE("drained device short-circuits to the zero optimum") {
  Scenario scn = small_scenario();
  scn.device_energy = {10.0, 0.0};
  auto rep = oma::solve(scn, {});
  CHECK(rep.status == SolveReport::Status::Converged);
  CHECK(rep.eta == 0.0);
  CHECK(rep.audit.ok());
}

TEST_CASE("power step saturates the cap when device budgets are huge") {
  Scenario scn = small_scenario();
  scn.device_energy = {1e7, 1e7};
  auto local = oma::init_solution(scn, oma::Variant::AdaptiveTime);
  auto built = oma::build_power_subproblem(local, scn,
                                           oma::Variant::AdaptiveTime);
  auto sol = conic::solve(built.prog, built.warm);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);
  const Eigen::MatrixXd p = built.extract_power(sol.primal, local.power);
  CHECK(p.minCoeff() >= 0.1 - 1e-5);
  CHECK(p.maxCoeff() <= 0.1 + 1e-9);
}

TEST_CASE("drained devices mean zero throughput and zero power") {
  Scenario scn = small_scenario();
  scn.device_energy = {0.0, 0.0};
  oma::SolveOptions opt;
  opt.max_outer = 3;
  auto rep = oma::solve(scn, opt);
  CHECK(rep.eta == 0.0);
  CHECK(rep.oma->power.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equal-time variant keeps slices identical across devices") {
  Scenario scn = small_scenario();
  oma::SolveOptions opt;
  opt.variant = oma::Variant::EqualTime;
  opt.max_outer = 4;
  auto rep = oma::solve(scn, opt);
  REQUIRE(rep.status != SolveReport::Status::SubproblemFailure);
  const auto& tau = rep.oma->time_share;
  for (int n = 0; n < tau.cols(); ++n) {
    CHECK(tau(0, n) == doctest::Approx(tau(1, n)).epsilon(1e-12));
  }
}

TEST_CASE("alternating optimization converges monotonically") {
  Scenario scn = small_scenario();
  oma::SolveOptions opt;
  auto rep = oma::solve(scn, opt);
  REQUIRE(rep.status == SolveReport::Status::Converged);
  CHECK(rep.iterations <= 40);

  for (std::size_t i = 1; i < rep.trace.size(); ++i) {
    CHECK(rep.trace[i] >= rep.trace[i - 1] - 1e-6);
  }
  CHECK(rep.audit.ok());

  // slack constraints effectively tight at the optimum: the subproblem
  // objective matches the recomputed throughput
  CHECK(std::abs(rep.solver_eta - rep.eta) <=
        1e-3 * std::max(1.0, std::abs(rep.eta)));

  // the adaptive variant dominates the equal split
  oma::SolveOptions opt1;
  opt1.variant = oma::Variant::EqualTime;
  auto rep1 = oma::solve(scn, opt1);
  CHECK(rep.eta >= rep1.eta - 1e-3);

  // and stays strictly below the hover bound
  CHECK(rep.eta < bounds::hover_upper_bound(scn));
}

TEST_CASE("reported solution is consistent with raw throughput") {
  Scenario scn = small_scenario();
  auto rep = oma::solve(scn, {});
  const Eigen::VectorXd q = oma_throughput(rep.trajectory, *rep.oma, scn);
  CHECK(q.minCoeff() == doctest::Approx(rep.eta).epsilon(1e-12));
  CHECK((q - rep.per_device).cwiseAbs().maxCoeff() <= 1e-12);
}
