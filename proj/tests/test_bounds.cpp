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
#include <numbers>

#include "skymin/bounds.hpp"
#include "skymin/oma.hpp"

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
}  // namespace

TEST_CASE("hover bound closed form") {
  Scenario scn = Scenario::with_defaults({{100.0, 100.0}}, 10.0, 20e3);
  CHECK(bounds::hover_upper_bound(scn) ==
        doctest::Approx(144.2695).epsilon(1e-5));

  scn.device_energy = {0.0};
  CHECK(bounds::hover_upper_bound(scn) == 0.0);

  scn.device_energy = {20.0};
  CHECK(bounds::hover_upper_bound(scn) ==
        doctest::Approx(2.0 * 144.2695).epsilon(1e-5));

  // the binding device is the weakest one
  Scenario two = Scenario::with_defaults({{0.0, 0.0}, {1.0, 1.0}}, 10.0,
                                         20e3);
  two.device_energy = {30.0, 10.0};
  CHECK(bounds::hover_upper_bound(two) ==
        doctest::Approx(144.2695).epsilon(1e-5));
}

TEST_CASE("hover time-throughput curve rises to the bound") {
  // f(t) = t log2(1 + E gamma_h / t) is non-decreasing and approaches
  // E gamma_h / ln 2
  const double e_gamma = 10.0 * 10.0;  // E = 10 J, gamma_h = 10 per watt
  auto f = [&](double t) { return t * std::log2(1.0 + e_gamma / t); };
  double prev = f(1e-3);
  for (double t = 1e-3; t <= 1e6; t *= 1.2) {
    const double now = f(t);
    CHECK(now >= prev - 1e-12 * (1.0 + std::abs(prev)));
    prev = now;
  }
  const double limit = e_gamma / std::numbers::ln2;
  CHECK(f(1e3 * e_gamma) >= 0.99 * limit);
  CHECK(f(1e3 * e_gamma) <= limit);
}

TEST_CASE("maximum-range speed") {
  const auto params = PropulsionParams::rotary_wing_defaults();
  const double v_mr = bounds::max_range_speed(params, 30.0);

  // frozen fixture from a fine scan of the power model
  CHECK(v_mr == doctest::Approx(18.2955).epsilon(1e-3));
  CHECK(v_mr > 0.0);
  CHECK(v_mr < 30.0);

  // local optimality of distance per joule
  auto ratio = [&](double v) { return v / propulsion_power(v, params); };
  CHECK(ratio(v_mr) >= ratio(v_mr + 0.01) - 1e-12);
  CHECK(ratio(v_mr) >= ratio(v_mr - 0.01) - 1e-12);

  // doubling the drag coefficient slows the best cruise
  auto draggy = params;
  draggy.fuselage_drag_ratio *= 2.0;
  CHECK(bounds::max_range_speed(draggy, 30.0) < v_mr);

  // a low cap becomes the answer when the unconstrained best is faster
  CHECK(bounds::max_range_speed(params, 10.0) ==
        doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("straight-line benchmark stays on the line and below the free run") {
  Scenario scn = small_scenario();
  auto straight = bounds::straight_line_solution(scn, Scheme::Oma2);
  REQUIRE(straight.status == SolveReport::Status::Converged);
  CHECK(straight.scheme == Scheme::StraightOma2);
  CHECK(straight.audit.ok());

  const Eigen::Vector2d dir = (scn.u_end - scn.u_start).normalized();
  for (const auto& w : straight.trajectory.waypoints) {
    const Eigen::Vector2d rel = w - scn.u_start;
    CHECK(std::abs(rel.x() * dir.y() - rel.y() * dir.x()) <= 1e-6);
  }

  auto free_run = oma::solve(scn, {});
  CHECK(straight.eta <= free_run.eta + 1e-3);
}
