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

#ifndef SKYMIN_SRC_BUILDER_UTIL_HPP
#define SKYMIN_SRC_BUILDER_UTIL_HPP

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "skymin/conic/program.hpp"
#include "skymin/sca/bounds.hpp"
#include "skymin/scenario.hpp"
#include "skymin/trajectory.hpp"

namespace skymin::detail {

/// Variable factory that records the warm-start value of every variable and
/// uses its magnitude as the solver's column scale.
class VarPool {
 public:
  explicit VarPool(conic::Program& prog) : prog_(prog) {}

  int make(const std::string& name, double warm_value) {
    const int v =
        prog_.new_var(name, std::max(1e-3, std::abs(warm_value)));
    if (static_cast<int>(warm_.size()) != v) {
      throw std::logic_error("VarPool: variables created outside the pool");
    }
    warm_.push_back(warm_value);
    return v;
  }

  /// For slack variables with strictly positive defining values of any
  /// magnitude: the warm value itself is the column scale.
  int make_positive(const std::string& name, double warm_value) {
    if (!(warm_value > 0.0)) {
      throw std::logic_error("VarPool: make_positive needs a positive warm");
    }
    const int v = prog_.new_var(name, warm_value);
    if (static_cast<int>(warm_.size()) != v) {
      throw std::logic_error("VarPool: variables created outside the pool");
    }
    warm_.push_back(warm_value);
    return v;
  }

  /// Registers a variable someone else created (helper auxiliaries).
  void adopt(int var, double warm_value) {
    if (var != static_cast<int>(warm_.size())) {
      throw std::logic_error("VarPool: adopt out of order");
    }
    warm_.push_back(warm_value);
  }

  Eigen::VectorXd warm() const {
    return Eigen::Map<const Eigen::VectorXd>(warm_.data(), warm_.size());
  }

 private:
  conic::Program& prog_;
  std::vector<double> warm_;
};

/// Waypoint coordinate expressions for trajectory subproblems. Endpoints
/// are constants; interior waypoints are either free 2-D variables or, in
/// straight-line mode, parameterized as u_start + beta * (u_end - u_start)
/// with beta nondecreasing in [0, 1].
class PathVars {
 public:
  PathVars(conic::Program& prog, VarPool& pool, const Scenario& scn,
           const Trajectory& ref, bool straight)
      : scn_(scn), n_(scn.n_segments) {
    u_vars.assign(n_ + 1, {-1, -1});
    dir_ = scn.u_end - scn.u_start;
    const double dir_sq = dir_.squaredNorm();
    straight_ = straight && dir_sq > 0.0;
    if (straight_) {
      beta_vars.assign(n_ + 1, -1);
      for (int i = 1; i < n_; ++i) {
        const double b =
            (ref.waypoints[i] - scn.u_start).dot(dir_) / dir_sq;
        beta_vars[i] =
            pool.make("beta" + std::to_string(i), std::clamp(b, 0.0, 1.0));
        prog.add_box(beta_vars[i], 0.0, 1.0);
      }
      for (int i = 0; i < n_; ++i) {
        // nondecreasing path parameter
        prog.add_nonneg(beta_expr(i + 1) - beta_expr(i));
      }
    } else if (!straight) {
      for (int i = 1; i < n_; ++i) {
        u_vars[i][0] = pool.make("ux" + std::to_string(i),
                                 ref.waypoints[i].x());
        u_vars[i][1] = pool.make("uy" + std::to_string(i),
                                 ref.waypoints[i].y());
      }
    }
    // straight with zero-length path: every waypoint stays fixed
  }

  conic::LinExpr x(int i) const { return coord(i, 0); }
  conic::LinExpr y(int i) const { return coord(i, 1); }
  conic::LinExpr dx(int i) const { return x(i + 1) - x(i); }
  conic::LinExpr dy(int i) const { return y(i + 1) - y(i); }

  Trajectory extract(const Eigen::VectorXd& primal,
                     const Trajectory& ref) const {
    Trajectory out = ref;
    for (int i = 0; i <= n_; ++i) {
      if (straight_ && i > 0 && i < n_) {
        const double b = primal[beta_vars[i]];
        out.waypoints[i] = scn_.u_start + b * dir_;
      } else if (!straight_ && u_vars[i][0] >= 0) {
        out.waypoints[i] = {primal[u_vars[i][0]], primal[u_vars[i][1]]};
      } else if (i == 0) {
        out.waypoints[i] = scn_.u_start;
      } else if (i == n_) {
        out.waypoints[i] = scn_.u_end;
      }
    }
    return out;
  }

  std::vector<std::array<int, 2>> u_vars;
  std::vector<int> beta_vars;

 private:
  conic::LinExpr beta_expr(int i) const {
    if (i == 0) return conic::LinExpr(0.0);
    if (i == n_) return conic::LinExpr(1.0);
    return conic::LinExpr::variable(beta_vars[i]);
  }

  conic::LinExpr coord(int i, int axis) const {
    if (straight_) {
      const double base = axis == 0 ? scn_.u_start.x() : scn_.u_start.y();
      const double d = axis == 0 ? dir_.x() : dir_.y();
      if (i == 0) return conic::LinExpr(base);
      if (i == n_) return conic::LinExpr(base + d);
      return conic::LinExpr(base) +
             d * conic::LinExpr::variable(beta_vars[i]);
    }
    if (u_vars[i][axis] >= 0) {
      return conic::LinExpr::variable(u_vars[i][axis]);
    }
    const Eigen::Vector2d fixed = i == 0 ? scn_.u_start : scn_.u_end;
    return conic::LinExpr(axis == 0 ? fixed.x() : fixed.y());
  }

  const Scenario& scn_;
  int n_;
  Eigen::Vector2d dir_;
  bool straight_ = false;
};

inline void check_tight(double bound_at_ref, double exact, const char* what) {
  if (std::abs(bound_at_ref - exact) > 1e-9 * (1.0 + std::abs(exact))) {
    throw std::logic_error(std::string("first-order bound not tight at its "
                                       "expansion point: ") +
                           what);
  }
}

/// Propulsion-energy variables of one trajectory subproblem.
struct PropulsionVars {
  std::vector<int> s;      ///< segment lengths; empty when frozen
  std::vector<int> omega;  ///< induced-time slacks
  std::vector<int> a;      ///< s^2 / T epigraphs
  std::vector<int> e;      ///< s^3 / T^2 epigraphs
};

/// Shared epigraph machinery for the propulsion-energy budget. When `path`
/// is null the segment lengths stay frozen at the reference trajectory and
/// only durations move. omega_ref must hold the induced-time slack values
/// of the reference trajectory.
inline PropulsionVars add_propulsion_energy(
    conic::Program& prog, VarPool& pool, const Scenario& scn,
    const Trajectory& ref, const Eigen::VectorXd& omega_ref,
    const std::vector<int>& t_vars, const PathVars* path) {
  using conic::LinExpr;
  const int n_count = scn.n_segments;
  const double v0 = scn.propulsion.rotor_induced_v;
  PropulsionVars vars;
  vars.omega.resize(n_count);
  vars.a.resize(n_count);
  vars.e.resize(n_count);
  if (path != nullptr) vars.s.resize(n_count);

  for (int n = 0; n < n_count; ++n) {
    const double s_ref = ref.segment_length(n);
    const double t_ref = ref.durations[n];
    const std::string sn = std::to_string(n);

    LinExpr s_expr(s_ref);
    if (path != nullptr) {
      vars.s[n] = pool.make("s_" + sn, s_ref);
      s_expr = LinExpr::variable(vars.s[n]);
      prog.add_soc({s_expr, path->dx(n), path->dy(n)});
      prog.add_le(s_expr, LinExpr(scn.delta));
      prog.add_le(s_expr, scn.v_max * LinExpr::variable(t_vars[n]));
    } else {
      // speed cap with the length frozen
      prog.add_nonneg(LinExpr::variable(t_vars[n]) -
                      LinExpr(s_ref / scn.v_max));
    }

    vars.omega[n] = pool.make("w_" + sn, omega_ref[n]);
    vars.a[n] = pool.make("acc_" + sn, s_ref * s_ref / t_ref);
    vars.e[n] =
        pool.make("cub_" + sn, s_ref * s_ref * s_ref / (t_ref * t_ref));
    prog.add_quad_over_lin(s_expr, LinExpr::variable(vars.a[n]),
                           LinExpr::variable(t_vars[n]));
    prog.add_cubic_over_square(LinExpr::variable(vars.e[n]), s_expr,
                               LinExpr::variable(t_vars[n]));

    // induced-time chain: T^4 / w^2 <= first-order bound of w^2 + |du|^2/v0^2
    const Eigen::Vector2d du_ref = ref.waypoints[n + 1] - ref.waypoints[n];
    const sca::SpeedSlackBound beta_low(omega_ref[n], du_ref, v0);
    check_tight(beta_low.value(omega_ref[n], du_ref),
                beta_low.exact(omega_ref[n], du_ref), "induced-time slack");
    LinExpr beta_expr =
        LinExpr(-omega_ref[n] * omega_ref[n] -
                du_ref.squaredNorm() / (v0 * v0)) +
        2.0 * omega_ref[n] * LinExpr::variable(vars.omega[n]);
    if (path != nullptr) {
      beta_expr += (2.0 / (v0 * v0)) *
                   (du_ref.x() * path->dx(n) + du_ref.y() * path->dy(n));
    } else {
      beta_expr += LinExpr(2.0 * du_ref.squaredNorm() / (v0 * v0));
    }
    const int q = prog.add_quartic_over_square(
        LinExpr::variable(t_vars[n]), LinExpr::variable(vars.omega[n]),
        beta_expr);
    pool.adopt(q, t_ref * t_ref / std::max(omega_ref[n], 1e-9));
  }

  const double blade = scn.propulsion.p0_blade;
  const double blade_speed =
      3.0 * blade / (scn.propulsion.tip_speed * scn.propulsion.tip_speed);
  const double parasite = scn.propulsion.parasite_coeff();
  LinExpr energy;
  for (int n = 0; n < n_count; ++n) {
    energy += blade * LinExpr::variable(t_vars[n]) +
              blade_speed * LinExpr::variable(vars.a[n]) +
              scn.propulsion.p_induced * LinExpr::variable(vars.omega[n]) +
              parasite * LinExpr::variable(vars.e[n]);
  }
  prog.add_le(energy, LinExpr(scn.uav_energy));
  return vars;
}

}  // namespace skymin::detail

#endif  // SKYMIN_SRC_BUILDER_UTIL_HPP
