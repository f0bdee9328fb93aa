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

#ifndef SKYMIN_BOUNDS_HPP
#define SKYMIN_BOUNDS_HPP

#include "skymin/report.hpp"
#include "skymin/scenario.hpp"

namespace skymin::bounds {

/// Max-min throughput with the UAV energy constraint removed: hovering
/// above each device arbitrarily long drives every device to spend its
/// whole budget at the best channel, giving min_k E_k * (gamma0/H^2) / ln 2.
double hover_upper_bound(const Scenario& scn);

/// Speed maximizing distance per joule, argmax of v / P(v) over (0, v_max],
/// located by golden-section search to 1e-4 m/s.
double max_range_speed(const PropulsionParams& params, double v_max);

/// Benchmark run with every waypoint pinned to the start-end line; the
/// scheme's solver runs unchanged otherwise. scheme picks oma1/oma2/noma.
SolveReport straight_line_solution(const Scenario& scn, Scheme scheme);

}  // namespace skymin::bounds

#endif  // SKYMIN_BOUNDS_HPP
