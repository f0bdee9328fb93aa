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

#ifndef SKYMIN_AUDIT_HPP
#define SKYMIN_AUDIT_HPP

#include <string>
#include <vector>

#include "skymin/allocation.hpp"
#include "skymin/scenario.hpp"
#include "skymin/trajectory.hpp"

namespace skymin {

/// One violated mission constraint. amount is the raw excess in the
/// constraint's units, relative the excess divided by the constraint scale.
struct Violation {
  std::string constraint;
  int segment = -1;  ///< -1 when not segment-indexed
  int device = -1;   ///< -1 when not device-indexed
  double amount = 0.0;
  double relative = 0.0;
};

struct AuditReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks a candidate solution against every original mission constraint
/// (endpoints, segment caps, speed, both energy budgets, time budgets,
/// power bounds) at relative tolerance rel_tol. Violations are data, not
/// errors.
AuditReport audit(const Trajectory& traj, const OmaAllocation& alloc,
                  const Scenario& scn, double rel_tol);

/// Same for the non-orthogonal scheme; additionally validates the decoding
/// order (pairing + per-segment total order).
AuditReport audit(const Trajectory& traj, const NomaAllocation& alloc,
                  const Scenario& scn, double rel_tol);

}  // namespace skymin

#endif  // SKYMIN_AUDIT_HPP
