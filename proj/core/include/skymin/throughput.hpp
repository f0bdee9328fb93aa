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

#ifndef SKYMIN_THROUGHPUT_HPP
#define SKYMIN_THROUGHPUT_HPP

#include <Eigen/Core>

#include "skymin/allocation.hpp"
#include "skymin/scenario.hpp"
#include "skymin/trajectory.hpp"

namespace skymin {

/// Line-of-sight SNR per transmit watt between the UAV at horizontal
/// position u (height h) and a ground device at w: gamma0 / (|u-w|^2 + h^2).
double channel_snr_gain(const Eigen::Vector2d& u, const Eigen::Vector2d& w,
                        double h, double gamma0);

/// Per-device collected throughput (bits/Hz) under orthogonal access;
/// rates are evaluated at each segment's start waypoint.
Eigen::VectorXd oma_throughput(const Trajectory& traj,
                               const OmaAllocation& alloc,
                               const Scenario& scn);

/// Uplink SINR of device k on segment n: devices decoded after k are still
/// superimposed and interfere.
double noma_sinr(int k, int n, const Trajectory& traj,
                 const NomaAllocation& alloc, const Scenario& scn);

/// Per-device collected throughput (bits/Hz) under non-orthogonal access.
Eigen::VectorXd noma_throughput(const Trajectory& traj,
                                const NomaAllocation& alloc,
                                const Scenario& scn);

}  // namespace skymin

#endif  // SKYMIN_THROUGHPUT_HPP
