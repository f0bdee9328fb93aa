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

#include "skymin/throughput.hpp"

#include <cmath>

namespace skymin {

double channel_snr_gain(const Eigen::Vector2d& u, const Eigen::Vector2d& w,
                        double h, double gamma0) {
  return gamma0 / ((u - w).squaredNorm() + h * h);
}

Eigen::VectorXd oma_throughput(const Trajectory& traj,
                               const OmaAllocation& alloc,
                               const Scenario& scn) {
  const int k_count = alloc.num_devices();
  const int n_count = alloc.num_segments();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(k_count);
  for (int n = 0; n < n_count; ++n) {
    for (int k = 0; k < k_count; ++k) {
      const double gain = channel_snr_gain(traj.waypoints[n], scn.devices[k],
                                           scn.altitude, scn.gamma0);
      q[k] += alloc.time_share(k, n) *
              std::log2(1.0 + gain * alloc.power(k, n));
    }
  }
  return q;
}

double noma_sinr(int k, int n, const Trajectory& traj,
                 const NomaAllocation& alloc, const Scenario& scn) {
  const Eigen::Vector2d& u = traj.waypoints[n];
  const double h2 = scn.altitude * scn.altitude;
  const double signal =
      scn.gamma0 * alloc.power(k, n) /
      ((u - scn.devices[k]).squaredNorm() + h2);
  double interference = 0.0;
  for (int m = 0; m < alloc.num_devices(); ++m) {
    if (m == k || alloc.order.after(m, k, n) == 0) continue;
    interference += scn.gamma0 * alloc.power(m, n) /
                    ((u - scn.devices[m]).squaredNorm() + h2);
  }
  return signal / (1.0 + interference);
}

Eigen::VectorXd noma_throughput(const Trajectory& traj,
                                const NomaAllocation& alloc,
                                const Scenario& scn) {
  const int k_count = alloc.num_devices();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(k_count);
  for (int n = 0; n < alloc.num_segments(); ++n) {
    if (alloc.comm_time[n] == 0.0) continue;
    for (int k = 0; k < k_count; ++k) {
      q[k] += alloc.comm_time[n] *
              std::log2(1.0 + noma_sinr(k, n, traj, alloc, scn));
    }
  }
  return q;
}

}  // namespace skymin
