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

#ifndef SKYMIN_SCENARIO_HPP
#define SKYMIN_SCENARIO_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

#include "skymin/propulsion.hpp"

namespace skymin {

/// Thrown when a scenario violates one of its invariants.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One mission instance: device layout, energy budgets, channel and
/// propulsion parameters, and path discretization settings.
struct Scenario {
  std::vector<Eigen::Vector2d> devices;  ///< ground positions w_k (m)
  std::vector<double> device_energy;     ///< E_k per device (J)
  double uav_energy = 20e3;              ///< onboard energy budget (J)
  double altitude = 100.0;               ///< flight height H (m)
  Eigen::Vector2d u_start{0.0, 0.0};     ///< first waypoint (m)
  Eigen::Vector2d u_end{500.0, 500.0};   ///< last waypoint (m)
  double v_max = 30.0;                   ///< speed cap (m/s)
  double delta = 20.0;                   ///< segment length cap (m)
  int n_segments = 36;                   ///< path segments N
  double gamma0 = 1e5;                   ///< reference SNR per watt (1/W)
  double p_max = 0.1;                    ///< device transmit power cap (W)
  PropulsionParams propulsion = PropulsionParams::rotary_wing_defaults();
  double sca_tol = 1e-2;                 ///< fractional-improvement stop
  double bandwidth = 1.0;                ///< Hz; throughputs are per-Hz

  int num_devices() const { return static_cast<int>(devices.size()); }
  double path_length() const { return (u_end - u_start).norm(); }

  /// Throws ScenarioError naming the violated invariant.
  void validate() const;

  /// Uniform propulsion and radio defaults with the given device layout.
  /// n_segments defaults to ceil(path / delta).
  static Scenario with_defaults(std::vector<Eigen::Vector2d> devices,
                                double device_energy_each, double uav_energy);
};

}  // namespace skymin

#endif  // SKYMIN_SCENARIO_HPP
