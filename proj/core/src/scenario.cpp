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

#include "skymin/scenario.hpp"

#include <cmath>

namespace skymin {

void Scenario::validate() const {
  if (devices.empty()) throw ScenarioError("devices: need at least one");
  if (device_energy.size() != devices.size()) {
    throw ScenarioError("device_energy: size must match devices");
  }
  for (std::size_t k = 0; k < device_energy.size(); ++k) {
    if (!(device_energy[k] >= 0.0) || !std::isfinite(device_energy[k])) {
      throw ScenarioError("device_energy[" + std::to_string(k) +
                          "]: must be >= 0");
    }
  }
  if (!(uav_energy > 0.0)) throw ScenarioError("uav_energy: must be > 0");
  if (!(altitude > 0.0)) throw ScenarioError("altitude: must be > 0");
  if (!(v_max > 0.0)) throw ScenarioError("v_max: must be > 0");
  if (!(delta > 0.0)) throw ScenarioError("delta: must be > 0");
  if (delta > altitude) {
    throw ScenarioError("delta: must not exceed altitude");
  }
  if (n_segments < 1) throw ScenarioError("n_segments: must be >= 1");
  if (static_cast<double>(n_segments) * delta < path_length()) {
    throw ScenarioError("n_segments: n_segments * delta < path length, "
                        "end point unreachable");
  }
  if (!(gamma0 > 0.0)) throw ScenarioError("gamma0: must be > 0");
  if (!(p_max > 0.0)) throw ScenarioError("p_max: must be > 0");
  if (!(sca_tol > 0.0)) throw ScenarioError("sca_tol: must be > 0");
  if (!(bandwidth > 0.0)) throw ScenarioError("bandwidth: must be > 0");
  propulsion.validate();
}

Scenario Scenario::with_defaults(std::vector<Eigen::Vector2d> devices,
                                 double device_energy_each,
                                 double uav_energy) {
  Scenario scn;
  scn.devices = std::move(devices);
  scn.device_energy.assign(scn.devices.size(), device_energy_each);
  scn.uav_energy = uav_energy;
  scn.n_segments =
      static_cast<int>(std::ceil(scn.path_length() / scn.delta));
  return scn;
}

}  // namespace skymin
