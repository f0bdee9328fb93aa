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

#ifndef SKYMIN_NOMA_HPP
#define SKYMIN_NOMA_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "skymin/conic/program.hpp"
#include "skymin/conic/solver.hpp"
#include "skymin/oma.hpp"
#include "skymin/report.hpp"
#include "skymin/scenario.hpp"

namespace skymin::noma {

using oma::InfeasibleBudget;
using oma::kTauDark;
using oma::kTauFloor;
using oma::kTimeFloor;

/// Where the order relaxation starts. From the uniform fractional point the
/// penalty gradient vanishes and the first step is a pure throughput move;
/// from the incumbent binary point the penalty locks the order in place.
enum class OrderStart { Relaxed, Incumbent };

/// Penalty method settings for the decoding-order relaxation.
struct PenaltyConfig {
  /// Penalty weight; non-positive picks ten times the hover-bound scale.
  double lambda = -1.0;
  /// Largest allowed |a^2 - a| entry before rounding.
  double binary_tol = 1e-4;
  int max_inner_iters = 60;
  /// Multiplier applied to lambda when binary_tol is unmet at convergence.
  double lambda_growth = 10.0;
  int max_escalations = 4;
  OrderStart start = OrderStart::Relaxed;
};

/// Thrown when the relaxed order indicators refuse to reach binaries even
/// after every escalation.
class PenaltyNotExact : public std::runtime_error {
 public:
  PenaltyNotExact(double gap, const std::string& what)
      : std::runtime_error(what), worst_gap(gap) {}
  double worst_gap;
};

/// One iterate of the alternating optimization with all slack values
/// recomputed from their defining identities.
struct LocalPoint {
  Trajectory traj;
  Eigen::VectorXd tau;    // N, shared window
  Eigen::MatrixXd power;  // K x N
  DecodingOrder order;    // binary between outer iterations

  Eigen::MatrixXd s_slack;  // d / (gamma0 p); infinite for silent slots
  Eigen::MatrixXd i_slack;  // 1 + interference
  Eigen::MatrixXd d_slack;  // squared distance + H^2
  Eigen::MatrixXd theta;    // sqrt(tau * rate)
  Eigen::VectorXd omega;    // induced-time slack
  Eigen::MatrixXd eps;      // sqrt(tau * p)

  static LocalPoint from_primal(Trajectory traj, Eigen::VectorXd tau,
                                Eigen::MatrixXd power, DecodingOrder order,
                                const Scenario& scn);
  Eigen::VectorXd throughput(const Scenario& scn) const;
  double min_throughput(const Scenario& scn) const;
};

/// Distance-based initial order: per segment, devices sorted by distance
/// descending, the farthest decoded last (interference-free). Equidistant
/// ties break toward the lower index decoded first.
DecodingOrder init_order(const Trajectory& traj, const Scenario& scn);

struct BuiltProgram {
  conic::Program prog;
  Eigen::VectorXd warm;
  int eta = -1;
  std::vector<std::array<int, 2>> u;
  std::vector<int> t;
  std::vector<int> tau;      ///< shared per-segment window
  Eigen::MatrixXi p;         ///< -1 when frozen
  std::vector<int> beta;

  Trajectory extract_trajectory(const Eigen::VectorXd& primal,
                                const Scenario& scn,
                                const Trajectory& reference) const;
  Eigen::VectorXd extract_tau(const Eigen::VectorXd& primal,
                              const Eigen::VectorXd& fallback) const;
  Eigen::MatrixXd extract_power(const Eigen::VectorXd& primal,
                                const Eigen::MatrixXd& fallback) const;
};

/// Trajectory window: waypoints, durations and the shared windows move;
/// powers and the order stay frozen.
BuiltProgram build_trajectory_subproblem(const LocalPoint& local,
                                         const Scenario& scn,
                                         bool straight_line = false);

/// Power window: durations, windows and powers move; waypoints and order
/// frozen, squared distances held at their defining values.
BuiltProgram build_power_subproblem(const LocalPoint& local,
                                    const Scenario& scn);

/// Decoding-order linear program around the relaxed expansion point
/// alpha_ref (per-segment K x K, pairing-consistent).
struct OrderProgram {
  conic::Program prog;
  Eigen::VectorXd warm;
  int eta = -1;
  /// var of alpha[k][m] on segment n for k < m; alpha[m][k] = 1 - var
  std::vector<Eigen::MatrixXi> alpha;
};

OrderProgram build_order_subproblem(
    const LocalPoint& local, const Scenario& scn, const PenaltyConfig& cfg,
    const std::vector<Eigen::MatrixXd>& alpha_ref);

struct OrderResult {
  DecodingOrder order;
  std::vector<double> trace;  ///< penalized objective per inner iteration
  double max_binary_gap = 0.0;
  double lambda_used = 0.0;
  int iterations = 0;
};

/// Penalty iterations on the order relaxation followed by rounding and, if
/// a segment relation came out cyclic, a decoded-after-count repair. Of the
/// rounded, repaired, distance-based and incoming orders, the one with the
/// best min-throughput at the frozen variables is returned, so the order
/// step never degrades the objective. Throws PenaltyNotExact when the
/// indicators stay fractional through every escalation.
OrderResult solve_order(const LocalPoint& local, const Scenario& scn,
                        const PenaltyConfig& cfg);

struct SolveOptions {
  bool straight_line = false;
  double tol = -1.0;
  int max_outer = 100;
  PenaltyConfig penalty;
  conic::SolverOptions solver{.tol = 1e-9};
};

/// Full alternating optimization: trajectory window, power window, then the
/// order step, until the fractional improvement drops below tol.
SolveReport solve(const Scenario& scn, const SolveOptions& options = {});

}  // namespace skymin::noma

#endif  // SKYMIN_NOMA_HPP
