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

#ifndef SKYMIN_SCENARIO_IO_HPP
#define SKYMIN_SCENARIO_IO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "skymin/scenario.hpp"

namespace skymin::io {

/// Parse or semantic problem in a scenario file; the message names the
/// offending field.
class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The file itself cannot be read or written.
class FileError : public ScenarioParseError {
 public:
  using ScenarioParseError::ScenarioParseError;
};

/// Scenario file schema (JSON, SI units):
///   devices        [[x, y], ...]        required, meters
///   device_energy  number | [numbers]   required, joules
///   uav_energy     number               required, joules
///   gamma0         {"db": v} | {"linear": v}   optional, default 50 dB
///   u_start/u_end  [x, y]               optional, defaults (0,0)/(500,500)
///   altitude, v_max, delta, p_max, sca_tol, bandwidth   optional numbers
///   n_segments     integer              optional, default ceil(path/delta)
///   propulsion     {p0_blade, p_induced, tip_speed, rotor_induced_v,
///                   fuselage_drag_ratio, air_density, rotor_solidity,
///                   rotor_disc_area}    optional, rotary-wing defaults
Scenario load_scenario(const std::string& path);

/// Parses a scenario from JSON text (same schema as load_scenario).
Scenario parse_scenario(const std::string& json_text);

std::string scenario_to_json(const Scenario& scn);
void save_scenario(const Scenario& scn, const std::string& path);

/// Deterministic random scenario: k devices placed uniformly on the
/// 500 x 500 m field, every other field at its default. The same seed
/// always produces the same scenario, independent of platform.
Scenario generate_scenario(std::uint64_t seed, int k_devices);

}  // namespace skymin::io

#endif  // SKYMIN_SCENARIO_IO_HPP
