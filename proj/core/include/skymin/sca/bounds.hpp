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

#ifndef SKYMIN_SCA_BOUNDS_HPP
#define SKYMIN_SCA_BOUNDS_HPP

#include <Eigen/Core>
#include <cmath>

// First-order lower bounds used by the successive-convex-approximation
// subproblems. Every bound is tight at its expansion point and never
// exceeds the true function (tangent of a convex function).

namespace skymin::sca {

inline constexpr double kLog2E = 1.4426950408889634;  // log2(e)

/// Tangent of x^2 at x_ref: value(x) = x_ref^2 + 2 x_ref (x - x_ref).
struct SquareTangent {
  double ref;
  explicit SquareTangent(double x_ref) : ref(x_ref) {}
  double value(double x) const { return ref * ref + 2.0 * ref * (x - ref); }
  double constant() const { return -ref * ref; }  // value = constant + slope*x
  double slope() const { return 2.0 * ref; }
  static double exact(double x) { return x * x; }
};

/// Lower bound of the rate log2(1 + gp / (D + h^2)) as a function of the
/// squared horizontal distance D = |u - w|^2, expanded at D = dist_sq_ref.
/// The rate is convex in D, so the tangent in D lower-bounds it.
struct RateVsDistSq {
  double rate_at_ref;
  double dist_slope;  // positive; bound = rate_at_ref - dist_slope*(D - ref)
  double dist_sq_ref;

  RateVsDistSq(double gamma_p, double dist_sq_ref_, double h_sq)
      : dist_sq_ref(dist_sq_ref_) {
    const double denom = dist_sq_ref_ + h_sq;
    rate_at_ref = std::log2(1.0 + gamma_p / denom);
    dist_slope = kLog2E * gamma_p / (denom * (denom + gamma_p));
  }
  double value(double dist_sq) const {
    return rate_at_ref - dist_slope * (dist_sq - dist_sq_ref);
  }
  static double exact(double gamma_p, double dist_sq, double h_sq) {
    return std::log2(1.0 + gamma_p / (dist_sq + h_sq));
  }
};

/// Lower bound of omega^2 + |du|^2 / v0^2 (the right side of the
/// induced-time slack inequality), expanded at (omega_ref, du_ref).
struct SpeedSlackBound {
  double omega_ref;
  Eigen::Vector2d du_ref;
  double v0_sq;

  SpeedSlackBound(double omega_ref_, const Eigen::Vector2d& du_ref_,
                  double v0)
      : omega_ref(omega_ref_), du_ref(du_ref_), v0_sq(v0 * v0) {}
  double value(double omega, const Eigen::Vector2d& du) const {
    return omega_ref * omega_ref + 2.0 * omega_ref * (omega - omega_ref) -
           du_ref.squaredNorm() / v0_sq + 2.0 * du_ref.dot(du) / v0_sq;
  }
  double exact(double omega, const Eigen::Vector2d& du) const {
    return omega * omega + du.squaredNorm() / v0_sq;
  }
};

/// Lower bound of eps^2 / tau, jointly convex for tau > 0, expanded at
/// (eps_ref, tau_ref).
struct EnergyRateBound {
  double eps_ref, tau_ref;

  EnergyRateBound(double eps_ref_, double tau_ref_)
      : eps_ref(eps_ref_), tau_ref(tau_ref_) {}
  double value(double eps, double tau) const {
    const double base = eps_ref * eps_ref / tau_ref;
    return base + 2.0 * eps_ref / tau_ref * (eps - eps_ref) -
           base / tau_ref * (tau - tau_ref);
  }
  static double exact(double eps, double tau) { return eps * eps / tau; }
};

/// Lower bound of log2(1 + 1/(S I)), jointly convex for S, I > 0, expanded
/// at (s_ref, i_ref).
struct NomaRateBound {
  double rate_at_ref;
  double s_slope, i_slope;  // positive
  double s_ref, i_ref;

  NomaRateBound(double s_ref_, double i_ref_) : s_ref(s_ref_), i_ref(i_ref_) {
    rate_at_ref = std::log2(1.0 + 1.0 / (s_ref_ * i_ref_));
    s_slope = kLog2E / (s_ref_ + s_ref_ * s_ref_ * i_ref_);
    i_slope = kLog2E / (i_ref_ + i_ref_ * i_ref_ * s_ref_);
  }
  double value(double s, double i) const {
    return rate_at_ref - s_slope * (s - s_ref) - i_slope * (i - i_ref);
  }
  static double exact(double s, double i) {
    return std::log2(1.0 + 1.0 / (s * i));
  }
};

/// Lower bound of the squared distance |u - w|^2 expanded at u_ref
/// (tangent of a convex quadratic).
struct DistSqBound {
  Eigen::Vector2d u_ref, w;

  DistSqBound(const Eigen::Vector2d& u_ref_, const Eigen::Vector2d& w_)
      : u_ref(u_ref_), w(w_) {}
  double value(const Eigen::Vector2d& u) const {
    return (u_ref - w).squaredNorm() + 2.0 * (u_ref - w).dot(u - u_ref);
  }
  double exact(const Eigen::Vector2d& u) const {
    return (u - w).squaredNorm();
  }
};

/// Lower bound of log2(1 + 1/(S I)) in I alone (S held constant), convex
/// decreasing in I, expanded at i_ref.
struct OrderRateBound {
  double s_const;
  double rate_at_ref;
  double i_slope;
  double i_ref;

  OrderRateBound(double s_const_, double i_ref_)
      : s_const(s_const_), i_ref(i_ref_) {
    rate_at_ref = std::log2(1.0 + 1.0 / (s_const_ * i_ref_));
    i_slope = kLog2E / (i_ref_ + i_ref_ * i_ref_ * s_const_);
  }
  double value(double i) const {
    return rate_at_ref - i_slope * (i - i_ref);
  }
  double exact(double i) const {
    return std::log2(1.0 + 1.0 / (s_const * i));
  }
};

}  // namespace skymin::sca

#endif  // SKYMIN_SCA_BOUNDS_HPP
