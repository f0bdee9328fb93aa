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

#include "skymin/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace skymin::io {

using nlohmann::json;

namespace {

double number_field(const json& j, const std::string& name, double fallback) {
  if (!j.contains(name)) return fallback;
  if (!j[name].is_number()) {
    throw ScenarioParseError(name + ": expected a number");
  }
  return j[name].get<double>();
}

Eigen::Vector2d point_field(const json& j, const std::string& name,
                            const Eigen::Vector2d& fallback) {
  if (!j.contains(name)) return fallback;
  const json& p = j[name];
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
      !p[1].is_number()) {
    throw ScenarioParseError(name + ": expected [x, y]");
  }
  return {p[0].get<double>(), p[1].get<double>()};
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("not valid JSON: ") + e.what());
  }

  Scenario scn;
  if (!j.contains("devices")) {
    throw ScenarioParseError("devices: required field is missing");
  }
  if (!j["devices"].is_array() || j["devices"].empty()) {
    throw ScenarioParseError("devices: expected a non-empty list of [x, y]");
  }
  for (const json& d : j["devices"]) {
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() ||
        !d[1].is_number()) {
      throw ScenarioParseError("devices: each entry must be [x, y]");
    }
    scn.devices.emplace_back(d[0].get<double>(), d[1].get<double>());
  }

  if (!j.contains("device_energy")) {
    throw ScenarioParseError("device_energy: required field is missing");
  }
  if (j["device_energy"].is_number()) {
    scn.device_energy.assign(scn.devices.size(),
                             j["device_energy"].get<double>());
  } else if (j["device_energy"].is_array()) {
    for (const json& e : j["device_energy"]) {
      if (!e.is_number()) {
        throw ScenarioParseError("device_energy: entries must be numbers");
      }
      scn.device_energy.push_back(e.get<double>());
    }
    if (scn.device_energy.size() != scn.devices.size()) {
      throw ScenarioParseError(
          "device_energy: list length must match devices");
    }
  } else {
    throw ScenarioParseError("device_energy: expected number or list");
  }

  if (!j.contains("uav_energy") || !j["uav_energy"].is_number()) {
    throw ScenarioParseError("uav_energy: required number is missing");
  }
  scn.uav_energy = j["uav_energy"].get<double>();

  scn.altitude = number_field(j, "altitude", scn.altitude);
  scn.u_start = point_field(j, "u_start", scn.u_start);
  scn.u_end = point_field(j, "u_end", scn.u_end);
  scn.v_max = number_field(j, "v_max", scn.v_max);
  scn.delta = number_field(j, "delta", scn.delta);
  scn.p_max = number_field(j, "p_max", scn.p_max);
  scn.sca_tol = number_field(j, "sca_tol", scn.sca_tol);
  scn.bandwidth = number_field(j, "bandwidth", scn.bandwidth);

  if (j.contains("gamma0")) {
    const json& g = j["gamma0"];
    if (g.is_object() && g.contains("db") && g["db"].is_number()) {
      scn.gamma0 = std::pow(10.0, g["db"].get<double>() / 10.0);
    } else if (g.is_object() && g.contains("linear") &&
               g["linear"].is_number()) {
      scn.gamma0 = g["linear"].get<double>();
    } else {
      throw ScenarioParseError(
          "gamma0: expected {\"db\": v} or {\"linear\": v}");
    }
  }

  if (j.contains("n_segments")) {
    if (!j["n_segments"].is_number_integer()) {
      throw ScenarioParseError("n_segments: expected an integer");
    }
    scn.n_segments = j["n_segments"].get<int>();
  } else {
    scn.n_segments = static_cast<int>(
        std::ceil(scn.path_length() / scn.delta));
    scn.n_segments = std::max(scn.n_segments, 1);
  }

  if (j.contains("propulsion")) {
    const json& p = j["propulsion"];
    if (!p.is_object()) {
      throw ScenarioParseError("propulsion: expected an object");
    }
    PropulsionParams& pp = scn.propulsion;
    pp.p0_blade = number_field(p, "p0_blade", pp.p0_blade);
    pp.p_induced = number_field(p, "p_induced", pp.p_induced);
    pp.tip_speed = number_field(p, "tip_speed", pp.tip_speed);
    pp.rotor_induced_v = number_field(p, "rotor_induced_v",
                                      pp.rotor_induced_v);
    pp.fuselage_drag_ratio =
        number_field(p, "fuselage_drag_ratio", pp.fuselage_drag_ratio);
    pp.air_density = number_field(p, "air_density", pp.air_density);
    pp.rotor_solidity = number_field(p, "rotor_solidity", pp.rotor_solidity);
    pp.rotor_disc_area = number_field(p, "rotor_disc_area",
                                      pp.rotor_disc_area);
  }

  try {
    scn.validate();
  } catch (const ScenarioError& e) {
    throw ScenarioParseError(e.what());
  }
  return scn;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileError("cannot open scenario file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& scn) {
  json j;
  j["devices"] = json::array();
  for (const auto& d : scn.devices) {
    j["devices"].push_back({d.x(), d.y()});
  }
  j["device_energy"] = scn.device_energy;
  j["uav_energy"] = scn.uav_energy;
  j["altitude"] = scn.altitude;
  j["u_start"] = {scn.u_start.x(), scn.u_start.y()};
  j["u_end"] = {scn.u_end.x(), scn.u_end.y()};
  j["v_max"] = scn.v_max;
  j["delta"] = scn.delta;
  j["n_segments"] = scn.n_segments;
  j["gamma0"] = {{"linear", scn.gamma0}};
  j["p_max"] = scn.p_max;
  j["sca_tol"] = scn.sca_tol;
  j["bandwidth"] = scn.bandwidth;
  j["propulsion"] = {
      {"p0_blade", scn.propulsion.p0_blade},
      {"p_induced", scn.propulsion.p_induced},
      {"tip_speed", scn.propulsion.tip_speed},
      {"rotor_induced_v", scn.propulsion.rotor_induced_v},
      {"fuselage_drag_ratio", scn.propulsion.fuselage_drag_ratio},
      {"air_density", scn.propulsion.air_density},
      {"rotor_solidity", scn.propulsion.rotor_solidity},
      {"rotor_disc_area", scn.propulsion.rotor_disc_area},
  };
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& scn, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw FileError("cannot write scenario file: " + path);
  }
  out << scenario_to_json(scn);
}

namespace {

// splitmix64: platform-independent deterministic stream
std::uint64_t next_word(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double next_unit(std::uint64_t& state) {
  return static_cast<double>(next_word(state) >> 11) * 0x1.0p-53;
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, int k_devices) {
  if (k_devices < 1) {
    throw std::invalid_argument("generate_scenario: need k >= 1");
  }
  std::uint64_t state = seed;
  std::vector<Eigen::Vector2d> devices;
  devices.reserve(k_devices);
  for (int k = 0; k < k_devices; ++k) {
    const double x = 500.0 * next_unit(state);
    const double y = 500.0 * next_unit(state);
    devices.emplace_back(x, y);
  }
  Scenario scn = Scenario::with_defaults(std::move(devices), 10.0, 20e3);
  scn.validate();
  return scn;
}

}  // namespace skymin::io
