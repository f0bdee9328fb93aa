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

#ifndef SKYMIN_OMA_HPP
#define SKYMIN_OMA_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "skymin/conic/program.hpp"
#include "skymin/conic/solver.hpp"
#include "skymin/report.hpp"
#include "skymin/scenario.hpp"
#include "skymin/trajectory.hpp"

namespace skymin::oma {

enum class Variant {
  EqualTime,     ///< every device gets the same slice of each segment
  AdaptiveTime,  ///< per-device slices optimized freely
};

/// Time slices below this are treated as asleep; slices in the programs are
/// floored here to keep quadratic-over-linear rows well posed.
inline constexpr double kTauFloor = 1e-6;
inline constexpr double kTimeFloor = 1e-6;
/// Slices at or near the floor are frozen in the power step (their exact
/// contribution is kept as constants); the trajectory step can regrow them.
inline constexpr double kTauDark = 1e-5;

/// Thrown when even the cheapest straight flight exceeds the energy budget.
class InfeasibleBudget : public std::runtime_error {
 public:
  InfeasibleBudget(double deficit_joules, const std::string& what)
      : std::runtime_error(what), deficit(deficit_joules) {}
  double deficit;  ///< extra joules needed
};

/// One iterate of the alternating optimization: primal variables plus the
/// slack values recomputed from their defining identities, so every
/// first-order bound expanded here is tight.
struct LocalPoint {
  Trajectory traj;
  Eigen::MatrixXd tau;    // K x N
  Eigen::MatrixXd power;  // K x N
  Eigen::MatrixXd theta;  // K x N, sqrt(tau * rate)
  Eigen::VectorXd omega;  // N, induced-time slack
  Eigen::MatrixXd eps;    // K x N, sqrt(tau * power)

  static LocalPoint from_primal(Trajectory traj, Eigen::MatrixXd tau,
                                Eigen::MatrixXd power, const Scenario& scn);
  Eigen::VectorXd throughput(const Scenario& scn) const;
  double min_throughput(const Scenario& scn) const;
};

/// A built subproblem: the conic program plus everything needed to warm
/// start it and read a solution back.
struct BuiltProgram {
  conic::Program prog;
  Eigen::VectorXd warm;  ///< local-point values for every variable
  int eta = -1;
  std::vector<std::array<int, 2>> u;  ///< free waypoint vars, -1 when fixed
  std::vector<int> t;                 ///< durations
  Eigen::MatrixXi tau;                ///< K x N, -1 when shared/absent
  Eigen::MatrixXi p;                  ///< K x N, -1 when frozen/asleep
  std::vector<int> beta;              ///< straight-line path parameters

  Trajectory extract_trajectory(const Eigen::VectorXd& primal,
                                const Scenario& scn,
                                const Trajectory& reference) const;
  Eigen::MatrixXd extract_tau(const Eigen::VectorXd& primal,
                              const Eigen::MatrixXd& fallback) const;
  Eigen::MatrixXd extract_power(const Eigen::VectorXd& primal,
                                const Eigen::MatrixXd& fallback) const;
};

struct SolveOptions {
  Variant variant = Variant::AdaptiveTime;
  bool straight_line = false;
  double tol = -1.0;   ///< fractional-improvement stop; <0 uses scn.sca_tol
  int max_outer = 100;
  conic::SolverOptions solver{.tol = 1e-9};
};

/// Straight flight at maximum-range speed, equal time split, powers set by
/// the device budgets. Throws InfeasibleBudget when the flight alone
/// exceeds the UAV energy.
LocalPoint init_solution(const Scenario& scn, Variant variant);

/// Trajectory-and-scheduling step: waypoints, durations and time slices
/// move, transmit powers stay frozen at the local point.
BuiltProgram build_trajectory_subproblem(const LocalPoint& local,
                                         const Scenario& scn, Variant variant,
                                         bool straight_line = false);

/// Power-and-scheduling step: durations, slices and powers move, waypoints
/// stay frozen at the local point.
BuiltProgram build_power_subproblem(const LocalPoint& local,
                                    const Scenario& scn, Variant variant);

/// Alternating optimization until the fractional objective improvement
/// drops below tol.
SolveReport solve(const Scenario& scn, const SolveOptions& options = {});

}  // namespace skymin::oma

#endif  // SKYMIN_OMA_HPP
