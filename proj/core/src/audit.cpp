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

#include "skymin/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "skymin/throughput.hpp"

namespace skymin {

namespace {

class Checker {
 public:
  Checker(AuditReport& report, double rel_tol)
      : report_(report), rel_tol_(rel_tol) {}

  // Flags value <= bound + rel_tol * scale.
  void upper(const std::string& name, double value, double bound, double scale,
             int segment = -1, int device = -1) {
    const double excess = value - bound;
    if (excess > rel_tol_ * scale) {
      report_.violations.push_back(
          {name, segment, device, excess, excess / scale});
    }
  }

  void flag(const std::string& name, double amount, double scale,
            int segment = -1, int device = -1) {
    report_.violations.push_back(
        {name, segment, device, amount, amount / scale});
  }

 private:
  AuditReport& report_;
  double rel_tol_;
};

void check_trajectory(Checker& chk, const Trajectory& traj,
                      const Scenario& scn) {
  const int n_count = traj.num_segments();
  const double path_scale = std::max(scn.delta, 1.0);
  if ((traj.waypoints.front() - scn.u_start).norm() > 1e-9 * path_scale) {
    chk.flag("start_waypoint", (traj.waypoints.front() - scn.u_start).norm(),
             path_scale, 0);
  }
  if ((traj.waypoints.back() - scn.u_end).norm() > 1e-9 * path_scale) {
    chk.flag("end_waypoint", (traj.waypoints.back() - scn.u_end).norm(),
             path_scale, n_count);
  }
  for (int n = 0; n < n_count; ++n) {
    const double len = traj.segment_length(n);
    const double t = traj.durations[n];
    if (!(t > 0.0)) {
      chk.flag("duration_positive", -t, 1.0, n);
      continue;
    }
    chk.upper("segment_length", len, scn.delta, scn.delta, n);
    chk.upper("speed_cap", len, scn.v_max * t, scn.v_max * t, n);
  }
  chk.upper("uav_energy", trajectory_energy(traj, scn.propulsion),
            scn.uav_energy, scn.uav_energy);
}

}  // namespace

std::string AuditReport::summary() const {
  if (violations.empty()) return "feasible";
  std::ostringstream out;
  out << violations.size() << " violation(s):";
  for (const auto& v : violations) {
    out << " " << v.constraint;
    if (v.segment >= 0) out << "[n=" << v.segment << "]";
    if (v.device >= 0) out << "[k=" << v.device << "]";
    out << " +" << v.amount << " (" << v.relative << " rel);";
  }
  return out.str();
}

AuditReport audit(const Trajectory& traj, const OmaAllocation& alloc,
                  const Scenario& scn, double rel_tol) {
  AuditReport report;
  Checker chk(report, rel_tol);
  check_trajectory(chk, traj, scn);

  const int k_count = alloc.num_devices();
  const int n_count = alloc.num_segments();
  for (int n = 0; n < n_count; ++n) {
    double tau_sum = 0.0;
    for (int k = 0; k < k_count; ++k) {
      const double tau = alloc.time_share(k, n);
      const double p = alloc.power(k, n);
      tau_sum += tau;
      chk.upper("time_share_nonneg", -tau, 0.0, traj.durations[n], n, k);
      chk.upper("power_nonneg", -p, 0.0, scn.p_max, n, k);
      chk.upper("power_cap", p, scn.p_max, scn.p_max, n, k);
    }
    chk.upper("time_budget", tau_sum, traj.durations[n], traj.durations[n], n);
  }
  for (int k = 0; k < k_count; ++k) {
    const double used =
        (alloc.time_share.row(k).array() * alloc.power.row(k).array()).sum();
    chk.upper("device_energy", used, scn.device_energy[k],
              std::max(scn.device_energy[k], 1e-12), -1, k);
  }
  return report;
}

AuditReport audit(const Trajectory& traj, const NomaAllocation& alloc,
                  const Scenario& scn, double rel_tol) {
  AuditReport report;
  Checker chk(report, rel_tol);
  check_trajectory(chk, traj, scn);

  const int k_count = alloc.num_devices();
  const int n_count = alloc.num_segments();
  for (int n = 0; n < n_count; ++n) {
    const double tau = alloc.comm_time[n];
    chk.upper("comm_time_nonneg", -tau, 0.0, traj.durations[n], n);
    chk.upper("comm_time_budget", tau, traj.durations[n], traj.durations[n],
              n);
    for (int k = 0; k < k_count; ++k) {
      const double p = alloc.power(k, n);
      chk.upper("power_nonneg", -p, 0.0, scn.p_max, n, k);
      chk.upper("power_cap", p, scn.p_max, scn.p_max, n, k);
    }
  }
  for (int k = 0; k < k_count; ++k) {
    const double used =
        (alloc.comm_time.transpose().array() * alloc.power.row(k).array())
            .sum();
    chk.upper("device_energy", used, scn.device_energy[k],
              std::max(scn.device_energy[k], 1e-12), -1, k);
  }
  if (!alloc.order.pairing_valid()) {
    chk.flag("order_pairing", 1.0, 1.0);
  } else if (!alloc.order.total_order_valid()) {
    chk.flag("order_acyclic", 1.0, 1.0);
  }
  return report;
}

}  // namespace skymin
