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

#ifndef SKYMIN_REPORT_HPP
#define SKYMIN_REPORT_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "skymin/allocation.hpp"
#include "skymin/audit.hpp"
#include "skymin/trajectory.hpp"

namespace skymin {

enum class Scheme {
  Oma1,          ///< orthogonal access, equal time split
  Oma2,          ///< orthogonal access, adaptive time split
  Noma,          ///< non-orthogonal access
  StraightOma1,  ///< Oma1 with the path pinned to the start-end line
  StraightOma2,
  StraightNoma,
  UpperBound,    ///< energy-unconstrained hover bound
};

std::string to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(const std::string& tag);
bool scheme_is_straight(Scheme scheme);
bool scheme_is_noma(Scheme scheme);

/// Outcome of one alternating-optimization run.
struct SolveReport {
  enum class Status { Converged, IterationCap, SubproblemFailure };

  Scheme scheme = Scheme::Oma2;
  Status status = Status::Converged;
  std::string message;

  /// Min-throughput of the final solution recomputed from raw variables
  /// (bits/Hz); the authoritative objective.
  double eta = 0.0;
  /// Objective reported by the final subproblem solve.
  double solver_eta = 0.0;
  /// True objective after each outer iteration, starting with the
  /// initialization. Non-decreasing up to solver tolerance.
  std::vector<double> trace;
  int iterations = 0;
  double wall_seconds = 0.0;

  Trajectory trajectory;
  std::optional<OmaAllocation> oma;
  std::optional<NomaAllocation> noma;
  Eigen::VectorXd per_device;
  AuditReport audit;

  bool converged() const { return status == Status::Converged; }
};

}  // namespace skymin

#endif  // SKYMIN_REPORT_HPP
