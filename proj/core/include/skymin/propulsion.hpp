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

#ifndef SKYMIN_PROPULSION_HPP
#define SKYMIN_PROPULSION_HPP

namespace skymin {

/// Rotary-wing propulsion power model parameters. All strictly positive.
struct PropulsionParams {
  double p0_blade;            ///< blade profile power at hover (W)
  double p_induced;           ///< induced power at hover (W)
  double tip_speed;           ///< rotor blade tip speed (m/s)
  double rotor_induced_v;     ///< mean rotor induced velocity at hover (m/s)
  double fuselage_drag_ratio; ///< fuselage drag ratio (dimensionless)
  double air_density;         ///< air density (kg/m^3)
  double rotor_solidity;      ///< rotor solidity (dimensionless)
  double rotor_disc_area;     ///< rotor disc area (m^2)

  /// Stock parameter set for a small rotary-wing UAV.
  static PropulsionParams rotary_wing_defaults();

  /// 0.5 * d0 * rho * solidity * A, the parasite-power coefficient (W s^3/m^3).
  double parasite_coeff() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Propulsion power (W) at level-flight speed v >= 0 (m/s): blade profile
/// power + induced power + parasite power.
double propulsion_power(double speed, const PropulsionParams& params);

/// Effective induced-power time of one path segment (s): equals the segment
/// duration at hover and shrinks as forward speed unloads the rotor. The
/// induced energy of a segment is p_induced * induced_time.
double induced_time(double seg_len, double duration, double rotor_induced_v);

/// Energy (J) spent flying a straight segment of length seg_len (m) in
/// duration seconds. Identical to duration * propulsion_power(len/duration).
double segment_energy(double seg_len, double duration,
                      const PropulsionParams& params);

}  // namespace skymin

#endif  // SKYMIN_PROPULSION_HPP
