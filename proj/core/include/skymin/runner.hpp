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

#ifndef SKYMIN_RUNNER_HPP
#define SKYMIN_RUNNER_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "skymin/report.hpp"
#include "skymin/scenario.hpp"

namespace skymin::runner {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Scenario scenario;
  Scheme scheme = Scheme::Oma2;
  std::string out_dir;
  double tol = -1.0;     ///< <= 0 keeps the scenario's sca_tol
  double lambda = -1.0;  ///< <= 0 keeps the scale-derived penalty default
  int max_outer = 100;
  bool dump_conic = false;  ///< write initial subproblem programs as text
  std::uint64_t seed = 0;   ///< recorded in the summary
};

/// Executes one scheme and returns the report without touching the disk.
SolveReport solve_scheme(const Scenario& scn, Scheme scheme, double tol = -1.0,
                         double lambda = -1.0, int max_outer = 100);

/// Runs one scheme and writes summary.json, trajectory.csv, allocation.csv,
/// convergence.csv (and order.csv for non-orthogonal schemes) under
/// config.out_dir. Files are written atomically; every solution is
/// re-audited before writing. Returns the report.
SolveReport run(const RunConfig& config);

enum class SweepParam { UavEnergy, DeviceEnergy };

struct SweepRow {
  Scheme scheme;
  double value = 0.0;
  double eta = 0.0;
  int iterations = 0;
  std::string status;
};

/// One solve per (scheme, value) on the same scenario; failures become rows
/// with a non-ok status and the sweep continues. Rows are written to
/// sweep.csv in (scheme, value) order regardless of worker timing.
std::vector<SweepRow> sweep(const RunConfig& base, SweepParam param,
                            const std::vector<double>& values,
                            const std::vector<Scheme>& schemes,
                            int workers = 1);

/// Runs several schemes on one scenario and writes compare.csv.
std::vector<SweepRow> compare(const RunConfig& base,
                              const std::vector<Scheme>& schemes,
                              int workers = 1);

}  // namespace skymin::runner

#endif  // SKYMIN_RUNNER_HPP
