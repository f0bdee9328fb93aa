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

#include "skymin/trajectory.hpp"

#include <numeric>

namespace skymin {

double Trajectory::total_time() const {
  return std::accumulate(durations.begin(), durations.end(), 0.0);
}

Trajectory Trajectory::straight_line(const Scenario& scn, double speed) {
  const int n = scn.n_segments;
  Trajectory traj;
  traj.waypoints.resize(n + 1);
  traj.durations.resize(n);
  const Eigen::Vector2d step = (scn.u_end - scn.u_start) / n;
  for (int i = 0; i <= n; ++i) {
    traj.waypoints[i] = scn.u_start + static_cast<double>(i) * step;
  }
  const double seg_time = step.norm() / speed;
  for (int i = 0; i < n; ++i) traj.durations[i] = seg_time;
  return traj;
}

double trajectory_energy(const Trajectory& traj,
                         const PropulsionParams& params) {
  double total = 0.0;
  for (int n = 0; n < traj.num_segments(); ++n) {
    total += segment_energy(traj.segment_length(n), traj.durations[n], params);
  }
  return total;
}

}  // namespace skymin
