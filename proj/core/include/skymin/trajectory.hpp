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

#ifndef SKYMIN_TRAJECTORY_HPP
#define SKYMIN_TRAJECTORY_HPP

#include <Eigen/Core>
#include <vector>

#include "skymin/propulsion.hpp"
#include "skymin/scenario.hpp"

namespace skymin {

/// Piecewise-linear flight plan: N+1 waypoints and N segment durations.
/// Segment n runs from waypoints[n] to waypoints[n+1] in durations[n]
/// seconds at constant speed.
struct Trajectory {
  std::vector<Eigen::Vector2d> waypoints;
  std::vector<double> durations;

  int num_segments() const { return static_cast<int>(durations.size()); }
  double segment_length(int n) const {
    return (waypoints[n + 1] - waypoints[n]).norm();
  }
  double speed(int n) const { return segment_length(n) / durations[n]; }
  double total_time() const;

  /// Straight line from scn.u_start to scn.u_end, n_segments equal pieces,
  /// flown at constant speed.
  static Trajectory straight_line(const Scenario& scn, double speed);
};

/// Total propulsion energy (J) over all segments.
double trajectory_energy(const Trajectory& traj,
                         const PropulsionParams& params);

}  // namespace skymin

#endif  // SKYMIN_TRAJECTORY_HPP
