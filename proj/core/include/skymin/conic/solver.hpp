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

#ifndef SKYMIN_CONIC_SOLVER_HPP
#define SKYMIN_CONIC_SOLVER_HPP

#include <Eigen/Core>
#include <limits>
#include <string>

#include "skymin/conic/program.hpp"

namespace skymin::conic {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalLimit };

std::string to_string(SolveStatus status);

struct SolverOptions {
  /// Relative duality-gap and feasibility target. When double precision
  /// floors the centering first, the solve ends with the certified gap it
  /// reached (at most a two-decades miss, reported in ConicSolution::gap).
  double tol = 1e-8;
  /// Cap on Newton iterations across both phases.
  int max_newton_iters = 3000;
  /// Barrier parameter multiplier between centering stages.
  double barrier_growth = 10.0;
  bool verbose = false;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalLimit;
  /// Primal point; sized only when status == Optimal.
  Eigen::VectorXd primal;
  /// Objective value (maximization sense) of primal.
  double objective = std::numeric_limits<double>::quiet_NaN();
  /// Certified bound on suboptimality, same units as objective.
  double gap = std::numeric_limits<double>::quiet_NaN();
  /// Newton iterations spent.
  int iterations = 0;
  double solve_seconds = 0.0;
};

/// Interior-point solve of a conic program (barrier path-following with a
/// feasibility phase). Deterministic: identical programs and options give
/// bit-identical solutions. Reentrant across distinct programs.
ConicSolution solve(const Program& prog, const SolverOptions& opts = {});

/// Same, warm-started: hint is a (possibly boundary-tight) guess in original
/// variable units; it speeds up the feasibility phase.
ConicSolution solve(const Program& prog, const Eigen::VectorXd& hint,
                    const SolverOptions& opts = {});

}  // namespace skymin::conic

#endif  // SKYMIN_CONIC_SOLVER_HPP
