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

#include "skymin/propulsion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skymin {

PropulsionParams PropulsionParams::rotary_wing_defaults() {
  PropulsionParams p;
  p.p0_blade = 79.86;
  p.p_induced = 88.63;
  p.tip_speed = 120.0;
  p.rotor_induced_v = 4.03;
  p.fuselage_drag_ratio = 0.6;
  p.air_density = 1.225;
  p.rotor_solidity = 0.05;
  p.rotor_disc_area = 0.503;
  return p;
}

double PropulsionParams::parasite_coeff() const {
  return 0.5 * fuselage_drag_ratio * air_density * rotor_solidity *
         rotor_disc_area;
}

void PropulsionParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("PropulsionParams.") + name +
                                  " must be strictly positive");
    }
  };
  check(p0_blade, "p0_blade");
  check(p_induced, "p_induced");
  check(tip_speed, "tip_speed");
  check(rotor_induced_v, "rotor_induced_v");
  check(fuselage_drag_ratio, "fuselage_drag_ratio");
  check(air_density, "air_density");
  check(rotor_solidity, "rotor_solidity");
  check(rotor_disc_area, "rotor_disc_area");
}

double propulsion_power(double speed, const PropulsionParams& params) {
  const double v2 = speed * speed;
  const double tip2 = params.tip_speed * params.tip_speed;
  const double v0_2 = params.rotor_induced_v * params.rotor_induced_v;

  const double blade = params.p0_blade * (1.0 + 3.0 * v2 / tip2);
  const double induced =
      params.p_induced *
      std::sqrt(std::sqrt(1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)) -
                v2 / (2.0 * v0_2));
  const double parasite = params.parasite_coeff() * v2 * speed;
  return blade + induced + parasite;
}

double induced_time(double seg_len, double duration, double rotor_induced_v) {
  const double t2 = duration * duration;
  const double s2 = seg_len * seg_len;
  const double v0_2 = rotor_induced_v * rotor_induced_v;
  return std::sqrt(std::sqrt(t2 * t2 + s2 * s2 / (4.0 * v0_2 * v0_2)) -
                   s2 / (2.0 * v0_2));
}

double segment_energy(double seg_len, double duration,
                      const PropulsionParams& params) {
  if (!(duration > 0.0)) {
    throw std::invalid_argument("segment_energy: duration must be positive");
  }
  const double s2 = seg_len * seg_len;
  const double tip2 = params.tip_speed * params.tip_speed;

  const double blade =
      params.p0_blade * (duration + 3.0 * s2 / (tip2 * duration));
  const double induced =
      params.p_induced *
      induced_time(seg_len, duration, params.rotor_induced_v);
  const double parasite =
      params.parasite_coeff() * s2 * seg_len / (duration * duration);
  return blade + induced + parasite;
}

}  // namespace skymin
