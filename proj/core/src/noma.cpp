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

#include "skymin/noma.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "skymin/bounds.hpp"
#include "skymin/sca/bounds.hpp"
#include "skymin/throughput.hpp"
#include "builder_util.hpp"

namespace skymin::noma {

using conic::LinExpr;
using detail::PathVars;
using detail::VarPool;

namespace {

constexpr double kPowerFloor = 1e-12;

std::string tag(const char* base, int k, int n) {
  return std::string(base) + "_" + std::to_string(k) + "_" +
         std::to_string(n);
}

std::string tag(const char* base, int n) {
  return std::string(base) + "_" + std::to_string(n);
}

bool slot_awake(const LocalPoint& local, int k, int n) {
  return local.power(k, n) > kPowerFloor;
}

/// Interference-plus-one of device k on segment n for a (possibly relaxed)
/// order matrix.
double interference_of(const LocalPoint& local, const Scenario& scn,
                       const Eigen::MatrixXd& alpha_n, int k, int n) {
  double total = 1.0;
  for (int m = 0; m < scn.num_devices(); ++m) {
    if (m == k || !(local.power(m, n) > kPowerFloor)) continue;
    total += alpha_n(m, k) * scn.gamma0 * local.power(m, n) /
             local.d_slack(m, n);
  }
  return total;
}


}  // namespace

LocalPoint LocalPoint::from_primal(Trajectory traj, Eigen::VectorXd tau,
                                   Eigen::MatrixXd power, DecodingOrder order,
                                   const Scenario& scn) {
  LocalPoint local;
  const int k_count = scn.num_devices();
  const int n_count = scn.n_segments;
  const double h_sq = scn.altitude * scn.altitude;
  local.s_slack.resize(k_count, n_count);
  local.i_slack.resize(k_count, n_count);
  local.d_slack.resize(k_count, n_count);
  local.theta.resize(k_count, n_count);
  local.omega.resize(n_count);
  local.eps.resize(k_count, n_count);

  for (int n = 0; n < n_count; ++n) {
    local.omega[n] = induced_time(traj.segment_length(n), traj.durations[n],
                                  scn.propulsion.rotor_induced_v);
    for (int k = 0; k < k_count; ++k) {
      local.d_slack(k, n) =
          (traj.waypoints[n] - scn.devices[k]).squaredNorm() + h_sq;
    }
  }
  for (int n = 0; n < n_count; ++n) {
    for (int k = 0; k < k_count; ++k) {
      const double p = power(k, n);
      local.eps(k, n) = std::sqrt(tau[n] * p);
      if (p > kPowerFloor) {
        local.s_slack(k, n) = local.d_slack(k, n) / (scn.gamma0 * p);
        double interf = 1.0;
        for (int m = 0; m < k_count; ++m) {
          if (m == k || !(power(m, n) > kPowerFloor)) continue;
          if (order.after(m, k, n) == 1) {
            interf += scn.gamma0 * power(m, n) / local.d_slack(m, n);
          }
        }
        local.i_slack(k, n) = interf;
        const double rate =
            std::log2(1.0 + 1.0 / (local.s_slack(k, n) * interf));
        local.theta(k, n) = std::sqrt(tau[n] * rate);
      } else {
        local.s_slack(k, n) = std::numeric_limits<double>::infinity();
        local.i_slack(k, n) = 1.0;
        local.theta(k, n) = 0.0;
      }
    }
  }
  local.traj = std::move(traj);
  local.tau = std::move(tau);
  local.power = std::move(power);
  local.order = std::move(order);
  return local;
}

Eigen::VectorXd LocalPoint::throughput(const Scenario& scn) const {
  NomaAllocation alloc{tau, power, order};
  return noma_throughput(traj, alloc, scn);
}

double LocalPoint::min_throughput(const Scenario& scn) const {
  return throughput(scn).minCoeff();
}

DecodingOrder init_order(const Trajectory& traj, const Scenario& scn) {
  const int k_count = scn.num_devices();
  const int n_count = traj.num_segments();
  std::vector<std::vector<int>> sequences(n_count);
  for (int n = 0; n < n_count; ++n) {
    std::vector<int> seq(k_count);
    std::iota(seq.begin(), seq.end(), 0);
    std::vector<double> dist(k_count);
    for (int k = 0; k < k_count; ++k) {
      dist[k] = (traj.waypoints[n] - scn.devices[k]).norm();
    }
    // nearest decoded first, farthest last (interference-free); ties break
    // toward the lower index decoded first
    std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) {
      return dist[a] < dist[b];
    });
    sequences[n] = std::move(seq);
  }
  return DecodingOrder::from_sequences(sequences);
}

BuiltProgram build_trajectory_subproblem(const LocalPoint& local,
                                         const Scenario& scn,
                                         bool straight_line) {
  const int k_count = scn.num_devices();
  const int n_count = scn.n_segments;
  const double h = scn.altitude;

  BuiltProgram built;
  conic::Program& prog = built.prog;
  VarPool pool(prog);

  double eta_warm = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_count; ++k) {
    eta_warm = std::min(eta_warm, local.theta.row(k).squaredNorm());
  }
  built.eta = pool.make("eta", eta_warm);
  prog.add_nonneg(LinExpr::variable(built.eta));

  PathVars path(prog, pool, scn, local.traj, straight_line);
  built.u = path.u_vars;
  built.beta = path.beta_vars;

  built.t.resize(n_count);
  built.tau.resize(n_count);
  for (int n = 0; n < n_count; ++n) {
    built.t[n] = pool.make(tag("T", n), local.traj.durations[n]);
    prog.add_nonneg(LinExpr::variable(built.t[n]) - LinExpr(kTimeFloor));
    built.tau[n] = pool.make(tag("tau", n), local.tau[n]);
    prog.add_nonneg(LinExpr::variable(built.tau[n]) - LinExpr(kTauFloor));
    prog.add_le(LinExpr::variable(built.tau[n]),
                LinExpr::variable(built.t[n]));
  }
  built.p.setConstant(k_count, n_count, -1);

  // which devices interfere with someone on segment n
  std::vector<std::vector<char>> interferes(
      k_count, std::vector<char>(n_count, 0));
  for (int n = 0; n < n_count; ++n) {
    for (int m = 0; m < k_count; ++m) {
      if (!slot_awake(local, m, n)) continue;
      for (int k = 0; k < k_count; ++k) {
        if (k != m && slot_awake(local, k, n) &&
            local.order.after(m, k, n) == 1) {
          interferes[m][n] = 1;
          break;
        }
      }
    }
  }

  // reciprocal interference machinery: zeta >= 1/d per interfering device
  std::vector<std::vector<int>> zeta_vars(k_count,
                                          std::vector<int>(n_count, -1));
  std::vector<std::vector<int>> d_vars(k_count,
                                       std::vector<int>(n_count, -1));
  for (int m = 0; m < k_count; ++m) {
    for (int n = 0; n < n_count; ++n) {
      if (!interferes[m][n]) continue;
      const double d_ref = local.d_slack(m, n);
      d_vars[m][n] = pool.make_positive(tag("d", m, n), d_ref);
      zeta_vars[m][n] = pool.make_positive(tag("zeta", m, n), 1.0 / d_ref);
      // zeta * d >= 1
      prog.add_rsoc({LinExpr::variable(zeta_vars[m][n]),
                     LinExpr::variable(d_vars[m][n]), LinExpr(1.0)});
      // a loose ceiling (2/H^2 exceeds any defining value) so slots with
      // negligible rate pressure cannot drift along a flat direction
      prog.add_le(LinExpr::variable(zeta_vars[m][n]),
                  LinExpr(2.0 / (h * h)));
      // d <= H^2 + first-order lower bound of |u - w|^2
      const sca::DistSqBound dist_bound(local.traj.waypoints[n],
                                        scn.devices[m]);
      detail::check_tight(dist_bound.value(local.traj.waypoints[n]),
                          dist_bound.exact(local.traj.waypoints[n]),
                          "squared distance");
      const Eigen::Vector2d mu = local.traj.waypoints[n] - scn.devices[m];
      prog.add_le(LinExpr::variable(d_vars[m][n]),
                  LinExpr(h * h + mu.squaredNorm() -
                          2.0 * mu.dot(local.traj.waypoints[n])) +
                      2.0 * mu.x() * path.x(n) + 2.0 * mu.y() * path.y(n));
    }
  }

  // per-slot rate machinery
  std::vector<std::vector<int>> theta_vars(k_count,
                                           std::vector<int>(n_count, -1));
  for (int k = 0; k < k_count; ++k) {
    for (int n = 0; n < n_count; ++n) {
      if (!slot_awake(local, k, n)) continue;
      const double p_ref = local.power(k, n);
      const double s_ref = local.s_slack(k, n);
      const double i_ref = local.i_slack(k, n);

      const int s_var = pool.make_positive(tag("S", k, n), s_ref);
      // S * gamma0 * p >= |u - w|^2 + H^2
      prog.add_rsoc({scn.gamma0 * p_ref * LinExpr::variable(s_var),
                     LinExpr(1.0),
                     path.x(n) - LinExpr(scn.devices[k].x()),
                     path.y(n) - LinExpr(scn.devices[k].y()), LinExpr(h)});
      // cap the slack so weak slots do not open a flat barrier direction
      prog.add_le(LinExpr::variable(s_var), LinExpr(1e4 * s_ref));

      // interference-plus-one stays an affine expression: the rate bound
      // is decreasing in it, so the epigraph variable would be pinned at
      // this value anyway
      LinExpr interf_expr(1.0);
      for (int m = 0; m < k_count; ++m) {
        if (m == k || !slot_awake(local, m, n)) continue;
        if (local.order.after(m, k, n) != 1) continue;
        interf_expr += scn.gamma0 * local.power(m, n) *
                       LinExpr::variable(zeta_vars[m][n]);
      }

      const sca::NomaRateBound bound(s_ref, i_ref);
      detail::check_tight(bound.value(s_ref, i_ref),
                          sca::NomaRateBound::exact(s_ref, i_ref),
                          "rate vs S and I");
      LinExpr rate_expr =
          LinExpr(bound.rate_at_ref + bound.s_slope * s_ref +
                  bound.i_slope * i_ref) -
          bound.s_slope * LinExpr::variable(s_var) -
          bound.i_slope * interf_expr;

      const int theta = pool.make(tag("th", k, n), local.theta(k, n));
      theta_vars[k][n] = theta;
      prog.add_nonneg(LinExpr::variable(theta));
      prog.add_quad_over_lin(LinExpr::variable(theta),
                             LinExpr::variable(built.tau[n]), rate_expr);
    }
  }

  // min-throughput rows
  for (int k = 0; k < k_count; ++k) {
    LinExpr row;
    for (int n = 0; n < n_count; ++n) {
      if (theta_vars[k][n] < 0) continue;
      const sca::SquareTangent tangent(local.theta(k, n));
      row += tangent.slope() * LinExpr::variable(theta_vars[k][n]) +
             LinExpr(tangent.constant());
    }
    row -= LinExpr::variable(built.eta);
    prog.add_nonneg(row);
  }

  // device energy with frozen powers
  for (int k = 0; k < k_count; ++k) {
    LinExpr used;
    bool any = false;
    for (int n = 0; n < n_count; ++n) {
      if (!slot_awake(local, k, n)) continue;
      used += local.power(k, n) * LinExpr::variable(built.tau[n]);
      any = true;
    }
    if (any) prog.add_le(used, LinExpr(scn.device_energy[k]));
  }

  detail::add_propulsion_energy(prog, pool, scn, local.traj, local.omega,
                                built.t, &path);

  prog.maximize(LinExpr::variable(built.eta));
  built.warm = pool.warm();
  return built;
}

BuiltProgram build_power_subproblem(const LocalPoint& local,
                                    const Scenario& scn) {
  const int k_count = scn.num_devices();
  const int n_count = scn.n_segments;

  BuiltProgram built;
  conic::Program& prog = built.prog;
  VarPool pool(prog);

  double eta_warm = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_count; ++k) {
    eta_warm = std::min(eta_warm, local.theta.row(k).squaredNorm());
  }
  built.eta = pool.make("eta", eta_warm);
  prog.add_nonneg(LinExpr::variable(built.eta));

  built.u.assign(n_count + 1, {-1, -1});
  built.t.resize(n_count);
  built.tau.assign(n_count, -1);
  // segments whose window sits at the floor stay frozen here (constants
  // everywhere); the trajectory step can regrow them
  auto segment_frozen = [&](int n) { return local.tau[n] <= kTauDark; };
  for (int n = 0; n < n_count; ++n) {
    built.t[n] = pool.make(tag("T", n), local.traj.durations[n]);
    prog.add_nonneg(LinExpr::variable(built.t[n]) - LinExpr(kTimeFloor));
    if (segment_frozen(n)) {
      prog.add_nonneg(LinExpr::variable(built.t[n]) - LinExpr(local.tau[n]));
      continue;
    }
    built.tau[n] = pool.make(tag("tau", n), local.tau[n]);
    prog.add_nonneg(LinExpr::variable(built.tau[n]) - LinExpr(kTauFloor));
    prog.add_le(LinExpr::variable(built.tau[n]),
                LinExpr::variable(built.t[n]));
  }

  built.p.setConstant(k_count, n_count, -1);
  std::vector<std::vector<int>> theta_vars(k_count,
                                           std::vector<int>(n_count, -1));
  std::vector<std::vector<int>> eps_vars(k_count,
                                         std::vector<int>(n_count, -1));
  std::vector<std::vector<int>> s_vars(k_count,
                                       std::vector<int>(n_count, -1));

  // first pass: transmit powers
  for (int k = 0; k < k_count; ++k) {
    for (int n = 0; n < n_count; ++n) {
      if (!slot_awake(local, k, n) || segment_frozen(n)) continue;
      const int p = pool.make(tag("p", k, n), local.power(k, n));
      built.p(k, n) = p;
      prog.add_nonneg(LinExpr::variable(p));
      prog.add_le(LinExpr::variable(p), LinExpr(scn.p_max));
    }
  }

  // second pass: rate, interference and energy machinery
  for (int k = 0; k < k_count; ++k) {
    for (int n = 0; n < n_count; ++n) {
      if (!slot_awake(local, k, n) || segment_frozen(n)) continue;
      const double d_ref = local.d_slack(k, n);
      const double s_ref = local.s_slack(k, n);
      const double i_ref = local.i_slack(k, n);

      const int s_var = pool.make_positive(tag("S", k, n), s_ref);
      s_vars[k][n] = s_var;
      // S * p >= d / gamma0 with d frozen at its defining value
      prog.add_rsoc({LinExpr::variable(s_var),
                     LinExpr::variable(built.p(k, n)),
                     LinExpr(std::sqrt(d_ref / scn.gamma0))});
      // cap the slack so dying slots do not open a flat barrier direction;
      // powers can still shrink four orders of magnitude per round
      prog.add_le(LinExpr::variable(s_var), LinExpr(1e4 * s_ref));

      // interference-plus-one substituted as an affine expression in the
      // interfering powers
      LinExpr interf_expr(1.0);
      for (int m = 0; m < k_count; ++m) {
        if (m == k || !slot_awake(local, m, n)) continue;
        if (local.order.after(m, k, n) != 1) continue;
        interf_expr += (scn.gamma0 / local.d_slack(m, n)) *
                       LinExpr::variable(built.p(m, n));
      }

      const sca::NomaRateBound bound(s_ref, i_ref);
      detail::check_tight(bound.value(s_ref, i_ref),
                          sca::NomaRateBound::exact(s_ref, i_ref),
                          "rate vs S and I");
      LinExpr rate_expr =
          LinExpr(bound.rate_at_ref + bound.s_slope * s_ref +
                  bound.i_slope * i_ref) -
          bound.s_slope * LinExpr::variable(s_var) -
          bound.i_slope * interf_expr;

      const int theta = pool.make(tag("th", k, n), local.theta(k, n));
      theta_vars[k][n] = theta;
      prog.add_nonneg(LinExpr::variable(theta));
      prog.add_quad_over_lin(LinExpr::variable(theta),
                             LinExpr::variable(built.tau[n]), rate_expr);

      const int eps = pool.make(tag("eps", k, n), local.eps(k, n));
      eps_vars[k][n] = eps;
      prog.add_nonneg(LinExpr::variable(eps));
      const sca::EnergyRateBound pb(local.eps(k, n), local.tau[n]);
      detail::check_tight(
          pb.value(local.eps(k, n), local.tau[n]),
          sca::EnergyRateBound::exact(local.eps(k, n), local.tau[n]),
          "per-slot energy rate");
      prog.add_le(LinExpr::variable(built.p(k, n)),
                  (2.0 * pb.eps_ref / pb.tau_ref) * LinExpr::variable(eps) -
                      (pb.eps_ref * pb.eps_ref / (pb.tau_ref * pb.tau_ref)) *
                          LinExpr::variable(built.tau[n]));
    }
  }

  // min-throughput rows; frozen segments contribute their exact value
  for (int k = 0; k < k_count; ++k) {
    LinExpr row;
    for (int n = 0; n < n_count; ++n) {
      if (theta_vars[k][n] >= 0) {
        const sca::SquareTangent tangent(local.theta(k, n));
        row += tangent.slope() * LinExpr::variable(theta_vars[k][n]) +
               LinExpr(tangent.constant());
      } else {
        row += LinExpr(local.theta(k, n) * local.theta(k, n));
      }
    }
    row -= LinExpr::variable(built.eta);
    prog.add_nonneg(row);
  }

  // lifetime energy per device, net of the frozen segments' spend
  for (int k = 0; k < k_count; ++k) {
    double frozen_spend = 0.0;
    for (int n = 0; n < n_count; ++n) {
      if (local.power(k, n) > kPowerFloor && eps_vars[k][n] < 0) {
        frozen_spend += local.tau[n] * local.power(k, n);
      }
    }
    std::vector<LinExpr> ball{LinExpr(std::sqrt(
        std::max(0.0, scn.device_energy[k] - frozen_spend)))};
    bool any = false;
    for (int n = 0; n < n_count; ++n) {
      if (eps_vars[k][n] < 0) continue;
      ball.push_back(LinExpr::variable(eps_vars[k][n]));
      any = true;
    }
    if (any) prog.add_soc(std::move(ball));
  }

  detail::add_propulsion_energy(prog, pool, scn, local.traj, local.omega,
                                built.t, nullptr);

  prog.maximize(LinExpr::variable(built.eta));
  built.warm = pool.warm();
  return built;
}

OrderProgram build_order_subproblem(
    const LocalPoint& local, const Scenario& scn, const PenaltyConfig& cfg,
    const std::vector<Eigen::MatrixXd>& alpha_ref) {
  const int k_count = scn.num_devices();
  const int n_count = scn.n_segments;

  OrderProgram built;
  conic::Program& prog = built.prog;
  VarPool pool(prog);
  built.alpha.assign(n_count,
                     Eigen::MatrixXi::Constant(k_count, k_count, -1));

  double lambda = cfg.lambda;
  if (!(lambda > 0.0)) {
    lambda = 10.0 * std::max(1e-3, bounds::hover_upper_bound(scn));
  }

  double eta_warm = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_count; ++k) {
    double q = 0.0;
    for (int n = 0; n < n_count; ++n) {
      if (!slot_awake(local, k, n) || local.tau[n] <= 2.0 * kTauFloor) {
        continue;
      }
      const double interf = interference_of(local, scn, alpha_ref[n], k, n);
      q += local.tau[n] *
           std::log2(1.0 + 1.0 / (local.s_slack(k, n) * interf));
    }
    eta_warm = std::min(eta_warm, q);
  }
  built.eta = pool.make("eta", std::max(0.0, eta_warm));
  prog.add_nonneg(LinExpr::variable(built.eta));

  // relaxed pair variables; the mirror entry is substituted as 1 - var
  auto alpha_expr = [&](int k, int m, int n) -> LinExpr {
    if (k < m) return LinExpr::variable(built.alpha[n](k, m));
    return LinExpr(1.0) - LinExpr::variable(built.alpha[n](m, k));
  };

  std::vector<char> segment_live(n_count, 0);
  for (int n = 0; n < n_count; ++n) {
    if (local.tau[n] <= 2.0 * kTauFloor) continue;
    int awake = 0;
    for (int k = 0; k < k_count; ++k) awake += slot_awake(local, k, n);
    if (awake < 2) continue;
    segment_live[n] = 1;
    for (int k = 0; k < k_count; ++k) {
      for (int m = k + 1; m < k_count; ++m) {
        built.alpha[n](k, m) =
            pool.make(tag("alpha", k, m) + "_" + std::to_string(n),
                      alpha_ref[n](k, m));
        prog.add_box(built.alpha[n](k, m), 0.0, 1.0);
      }
    }
  }

  // objective: eta plus the penalty pushing indicators to the binary set
  LinExpr objective = LinExpr::variable(built.eta);
  for (int n = 0; n < n_count; ++n) {
    if (!segment_live[n]) continue;
    for (int k = 0; k < k_count; ++k) {
      for (int m = 0; m < k_count; ++m) {
        if (m == k) continue;
        const double a_ref = alpha_ref[n](k, m);
        const sca::SquareTangent tangent(a_ref);
        detail::check_tight(tangent.value(a_ref),
                            sca::SquareTangent::exact(a_ref),
                            "binary penalty tangent");
        // xi - alpha = -a_ref^2 + (2 a_ref - 1) * alpha
        objective += lambda * (LinExpr(-a_ref * a_ref) +
                               (2.0 * a_ref - 1.0) * alpha_expr(k, m, n));
      }
    }
  }
  prog.maximize(objective);

  // rate rows linearized in the interference slack
  for (int k = 0; k < k_count; ++k) {
    LinExpr row;
    for (int n = 0; n < n_count; ++n) {
      if (!slot_awake(local, k, n) || local.tau[n] <= 2.0 * kTauFloor) {
        continue;
      }
      const double s_ref = local.s_slack(k, n);
      const double i_ref = interference_of(local, scn, alpha_ref[n], k, n);
      const sca::OrderRateBound bound(s_ref, i_ref);
      detail::check_tight(bound.value(i_ref), bound.exact(i_ref),
                          "rate vs interference");
      if (!segment_live[n]) {
        row += LinExpr(local.tau[n] * bound.exact(local.i_slack(k, n)));
        continue;
      }
      // interference-plus-one substituted directly: the rate bound is
      // decreasing in it, so an epigraph variable would sit at this value
      LinExpr interf_expr(1.0);
      for (int m = 0; m < k_count; ++m) {
        if (m == k || !slot_awake(local, m, n)) continue;
        interf_expr += (scn.gamma0 * local.power(m, n) /
                        local.d_slack(m, n)) *
                       alpha_expr(m, k, n);
      }
      row += local.tau[n] *
             (LinExpr(bound.rate_at_ref + bound.i_slope * i_ref) -
              bound.i_slope * interf_expr);
    }
    row -= LinExpr::variable(built.eta);
    prog.add_nonneg(row);
  }

  built.warm = pool.warm();
  return built;
}

OrderResult solve_order(const LocalPoint& local, const Scenario& scn,
                        const PenaltyConfig& cfg) {
  const int k_count = scn.num_devices();
  const int n_count = scn.n_segments;

  OrderResult result;
  result.order = local.order;
  if (k_count < 2) return result;

  double lambda = cfg.lambda;
  if (!(lambda > 0.0)) {
    lambda = 10.0 * std::max(1e-3, bounds::hover_upper_bound(scn));
  }
  const double xi = scn.sca_tol;

  std::vector<Eigen::MatrixXd> alpha(n_count,
                                     Eigen::MatrixXd::Constant(
                                         k_count, k_count, 0.5));
  for (auto& m : alpha) m.diagonal().setZero();
  if (cfg.start == OrderStart::Incumbent) {
    for (int n = 0; n < n_count; ++n) {
      for (int k = 0; k < k_count; ++k) {
        for (int m = 0; m < k_count; ++m) {
          if (m != k) alpha[n](k, m) = local.order.after(k, m, n);
        }
      }
    }
  }
  // dead segments carry no variables; pin them to the incumbent so the
  // binary check and the rounding see real values
  for (int n = 0; n < n_count; ++n) {
    int awake = 0;
    for (int k = 0; k < k_count; ++k) awake += slot_awake(local, k, n);
    if (local.tau[n] > 2.0 * kTauFloor && awake >= 2) continue;
    for (int k = 0; k < k_count; ++k) {
      for (int m = 0; m < k_count; ++m) {
        if (m != k) alpha[n](k, m) = local.order.after(k, m, n);
      }
    }
  }

  auto penalized_objective = [&](const std::vector<Eigen::MatrixXd>& a) {
    double eta = std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_count; ++k) {
      double q = 0.0;
      for (int n = 0; n < n_count; ++n) {
        if (!slot_awake(local, k, n) || local.tau[n] <= 2.0 * kTauFloor) {
          continue;
        }
        const double interf = interference_of(local, scn, a[n], k, n);
        q += local.tau[n] *
             std::log2(1.0 + 1.0 / (local.s_slack(k, n) * interf));
      }
      eta = std::min(eta, q);
    }
    double penalty = 0.0;
    for (int n = 0; n < n_count; ++n) {
      for (int k = 0; k < k_count; ++k) {
        for (int m = 0; m < k_count; ++m) {
          if (m != k) penalty += a[n](k, m) * a[n](k, m) - a[n](k, m);
        }
      }
    }
    return eta + lambda * penalty;
  };

  PenaltyConfig stage_cfg = cfg;
  double worst_gap = 1.0;
  for (int escalation = 0; escalation <= cfg.max_escalations; ++escalation) {
    stage_cfg.lambda = lambda;
    double prev = penalized_objective(alpha);
    for (int it = 0; it < cfg.max_inner_iters; ++it) {
      OrderProgram lp = build_order_subproblem(local, scn, stage_cfg, alpha);
      conic::SolverOptions solver_opts;
      solver_opts.tol = 1e-9;
      conic::ConicSolution sol = conic::solve(lp.prog, lp.warm, solver_opts);
      if (sol.status != conic::SolveStatus::Optimal) {
        throw PenaltyNotExact(worst_gap, "order subproblem " +
                                             conic::to_string(sol.status));
      }
      for (int n = 0; n < n_count; ++n) {
        for (int k = 0; k < k_count; ++k) {
          for (int m = k + 1; m < k_count; ++m) {
            if (lp.alpha[n](k, m) < 0) continue;
            const double v =
                std::clamp(sol.primal[lp.alpha[n](k, m)], 0.0, 1.0);
            alpha[n](k, m) = v;
            alpha[n](m, k) = 1.0 - v;
          }
        }
      }
      ++result.iterations;
      const double now = sol.objective;
      result.trace.push_back(now);
      const double gain = (now - prev) / std::max(std::abs(prev), 1e-9);
      prev = now;
      if (std::abs(gain) < xi) break;
    }

    worst_gap = 0.0;
    for (int n = 0; n < n_count; ++n) {
      for (int k = 0; k < k_count; ++k) {
        for (int m = 0; m < k_count; ++m) {
          if (m == k) continue;
          const double a = alpha[n](k, m);
          worst_gap = std::max(worst_gap, std::abs(a * a - a));
        }
      }
    }
    if (worst_gap <= cfg.binary_tol) break;
    lambda *= cfg.lambda_growth;
  }
  result.max_binary_gap = worst_gap;
  result.lambda_used = lambda;
  if (worst_gap > cfg.binary_tol) {
    throw PenaltyNotExact(
        worst_gap, "order indicators stayed fractional, worst |a^2-a| = " +
                       std::to_string(worst_gap));
  }

  // round, then repair any cyclic segment by decoded-after counts
  // (ties toward the lower index decoded first)
  DecodingOrder rounded(k_count, n_count);
  for (int n = 0; n < n_count; ++n) {
    for (int k = 0; k < k_count; ++k) {
      for (int m = 0; m < k_count; ++m) {
        if (m != k) rounded.set_after(k, m, n, alpha[n](k, m) >= 0.5 ? 1 : 0);
      }
    }
    // enforce pairing exactly from the upper triangle
    for (int k = 0; k < k_count; ++k) {
      for (int m = k + 1; m < k_count; ++m) {
        rounded.set_after(m, k, n, 1 - rounded.after(k, m, n));
      }
    }
  }
  DecodingOrder repaired = rounded;
  if (!rounded.total_order_valid()) {
    std::vector<std::vector<int>> sequences(n_count);
    for (int n = 0; n < n_count; ++n) {
      std::vector<int> seq(k_count);
      std::iota(seq.begin(), seq.end(), 0);
      std::vector<int> after_count(k_count, 0);
      for (int k = 0; k < k_count; ++k) {
        for (int m = 0; m < k_count; ++m) {
          if (m != k) after_count[k] += rounded.after(k, m, n);
        }
      }
      std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) {
        return after_count[a] < after_count[b];
      });
      sequences[n] = std::move(seq);
    }
    repaired = DecodingOrder::from_sequences(sequences);
  }

  // keep the best of the candidate orders; the order step must never
  // degrade the incumbent objective
  const DecodingOrder distance_based = init_order(local.traj, scn);
  auto score = [&](const DecodingOrder& order) {
    NomaAllocation alloc{local.tau, local.power, order};
    return noma_throughput(local.traj, alloc, scn).minCoeff();
  };
  result.order = repaired;
  double best = score(repaired);
  for (const DecodingOrder* cand : {&local.order, &distance_based}) {
    if (cand->num_devices() != k_count) continue;
    const double v = score(*cand);
    if (v > best) {
      best = v;
      result.order = *cand;
    }
  }
  return result;
}

Trajectory BuiltProgram::extract_trajectory(
    const Eigen::VectorXd& primal, const Scenario& scn,
    const Trajectory& reference) const {
  Trajectory out = reference;
  const int n_count = scn.n_segments;
  for (int i = 0; i <= n_count; ++i) {
    if (!beta.empty() && i > 0 && i < n_count && beta[i] >= 0) {
      out.waypoints[i] =
          scn.u_start + primal[beta[i]] * (scn.u_end - scn.u_start);
    } else if (i < static_cast<int>(u.size()) && u[i][0] >= 0) {
      out.waypoints[i] = {primal[u[i][0]], primal[u[i][1]]};
    }
  }
  for (int n = 0; n < n_count; ++n) {
    if (n < static_cast<int>(t.size()) && t[n] >= 0) {
      out.durations[n] = primal[t[n]];
    }
  }
  return out;
}

Eigen::VectorXd BuiltProgram::extract_tau(
    const Eigen::VectorXd& primal, const Eigen::VectorXd& fallback) const {
  Eigen::VectorXd out = fallback;
  for (std::size_t n = 0; n < tau.size(); ++n) {
    if (tau[n] >= 0) out[n] = primal[tau[n]];
  }
  return out;
}

Eigen::MatrixXd BuiltProgram::extract_power(
    const Eigen::VectorXd& primal, const Eigen::MatrixXd& fallback) const {
  Eigen::MatrixXd out = fallback;
  for (int k = 0; k < p.rows(); ++k) {
    for (int n = 0; n < p.cols(); ++n) {
      if (p(k, n) >= 0) out(k, n) = primal[p(k, n)];
    }
  }
  return out;
}

SolveReport solve(const Scenario& scn, const SolveOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  const double tol = options.tol > 0.0 ? options.tol : scn.sca_tol;

  SolveReport report;
  report.scheme =
      options.straight_line ? Scheme::StraightNoma : Scheme::Noma;

  // straight flight at maximum-range speed, the whole window shared
  oma::LocalPoint seed = oma::init_solution(scn, oma::Variant::AdaptiveTime);
  const int k_count = scn.num_devices();
  const int n_count = scn.n_segments;
  Eigen::VectorXd tau0(n_count);
  for (int n = 0; n < n_count; ++n) tau0[n] = seed.traj.durations[n];
  Eigen::MatrixXd power0(k_count, n_count);
  for (int k = 0; k < k_count; ++k) {
    power0.row(k).setConstant(
        std::min(scn.p_max, scn.device_energy[k] / tau0.sum()));
  }
  LocalPoint local = LocalPoint::from_primal(
      seed.traj, tau0, power0, init_order(seed.traj, scn), scn);

  double eta_prev = local.min_throughput(scn);
  report.trace.push_back(eta_prev);
  report.solver_eta = eta_prev;

  const bool drained =
      *std::min_element(scn.device_energy.begin(), scn.device_energy.end()) <=
      0.0;

  auto finalize = [&](SolveReport::Status status, const std::string& msg) {
    report.status = status;
    report.message = msg;
    report.iterations = static_cast<int>(report.trace.size()) - 1;
    report.trajectory = local.traj;
    report.noma = NomaAllocation{local.tau, local.power, local.order};
    report.per_device = local.throughput(scn);
    report.eta = report.per_device.minCoeff();
    report.audit = audit(local.traj, *report.noma, scn, 1e-6);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return report;
  };

  if (drained) {
    return finalize(SolveReport::Status::Converged,
                    "a device has no energy; zero throughput is optimal");
  }

  double last_gain = std::numeric_limits<double>::infinity();
  // a subproblem that dies of numerical exhaustion after progress has
  // stopped means the method converged at the incumbent
  auto precision_limited = [&](const std::string& what, int iter) {
    if (iter > 1 && std::abs(last_gain) < tol) {
      return finalize(SolveReport::Status::Converged,
                      "stopped at solver precision (" + what + ")");
    }
    return finalize(SolveReport::Status::SubproblemFailure, what);
  };

  for (int iter = 1; iter <= options.max_outer; ++iter) {
    const LocalPoint incumbent = local;
    // trajectory window
    BuiltProgram traj_prog =
        build_trajectory_subproblem(local, scn, options.straight_line);
    conic::ConicSolution traj_sol =
        conic::solve(traj_prog.prog, traj_prog.warm, options.solver);
    if (traj_sol.status != conic::SolveStatus::Optimal) {
      return precision_limited("trajectory subproblem " +
                                   conic::to_string(traj_sol.status) +
                                   " at iteration " + std::to_string(iter),
                               iter);
    }
    local = LocalPoint::from_primal(
        traj_prog.extract_trajectory(traj_sol.primal, scn, local.traj),
        traj_prog.extract_tau(traj_sol.primal, local.tau), local.power,
        local.order, scn);

    // power window
    BuiltProgram pow_prog = build_power_subproblem(local, scn);
    conic::ConicSolution pow_sol =
        conic::solve(pow_prog.prog, pow_prog.warm, options.solver);
    if (pow_sol.status != conic::SolveStatus::Optimal) {
      return precision_limited("power subproblem " +
                                   conic::to_string(pow_sol.status) +
                                   " at iteration " + std::to_string(iter),
                               iter);
    }
    local = LocalPoint::from_primal(
        pow_prog.extract_trajectory(pow_sol.primal, scn, local.traj),
        pow_prog.extract_tau(pow_sol.primal, local.tau),
        pow_prog.extract_power(pow_sol.primal, local.power), local.order,
        scn);
    report.solver_eta = pow_sol.objective;

    // decoding-order step
    if (k_count > 1) {
      try {
        OrderResult od = solve_order(local, scn, options.penalty);
        local = LocalPoint::from_primal(local.traj, local.tau, local.power,
                                        od.order, scn);
      } catch (const PenaltyNotExact& e) {
        return precision_limited(std::string("order subproblem: ") + e.what() +
                                     " at iteration " + std::to_string(iter),
                                 iter);
      }
    }

    const double eta_now = local.min_throughput(scn);
    if (eta_now < eta_prev - 1e-7 * std::max(1.0, std::abs(eta_prev))) {
      local = incumbent;
      return finalize(SolveReport::Status::Converged,
                      "stopped at solver precision (objective no longer "
                      "improves)");
    }
    report.trace.push_back(eta_now);
    const double gain =
        (eta_now - eta_prev) / std::max(std::abs(eta_prev), 1e-9);
    eta_prev = eta_now;
    last_gain = gain;
    // converged once improvements stop AND the last subproblem bound is
    // realized by the recomputed objective (slacks effectively tight)
    const double slack_gap = std::abs(report.solver_eta - eta_now) /
                             std::max(1.0, std::abs(eta_now));
    if (std::abs(gain) < tol && slack_gap <= 5e-4) {
      return finalize(SolveReport::Status::Converged, "");
    }
  }
  return finalize(SolveReport::Status::IterationCap,
                  "fractional improvement still above tolerance at the "
                  "iteration cap");
}

}  // namespace skymin::noma
