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

#include "skymin/conic/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace skymin::conic {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalLimit: return "numerical-limit";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct CompiledRow {
  int begin = 0;
  int end = 0;
  double constant = 0.0;
};

struct CompiledBlock {
  Cone cone = Cone::NonNeg;
  double exponent = 0.0;
  int row0 = 0;
  int dim = 0;
  double nu = 0.0;
};

/// Program in scaled variables: x_original = col_scale .* x. Every
/// inequality block's rows are uniformly rescaled to unit magnitude, which
/// keeps cone membership intact.
struct Compiled {
  int n = 0;
  std::vector<int> idx;
  std::vector<double> val;
  std::vector<CompiledRow> rows;
  std::vector<CompiledBlock> blocks;
  double nu_total = 0.0;
  MatrixXd a_eq;  // 0 x n when absent
  VectorXd b_eq;
  VectorXd col_scale;
  /// A variable-free block evaluated to a violated membership.
  bool constant_infeasible = false;
};

double row_value(const Compiled& c, const CompiledRow& r, const VectorXd& x) {
  double v = r.constant;
  for (int i = r.begin; i < r.end; ++i) v += c.val[i] * x[c.idx[i]];
  return v;
}

// ---------------------------------------------------------------------------
// Cone barriers. Each returns false when y is not strictly interior;
// otherwise adds the barrier value and fills gradient and Hessian.

bool barrier_soc(const VectorXd& y, double& phi, VectorXd& g, MatrixXd& w) {
  const int d = static_cast<int>(y.size());
  if (y[0] <= 0.0) return false;
  const double det = y[0] * y[0] - y.tail(d - 1).squaredNorm();
  if (det <= 0.0) return false;
  phi += -std::log(det);
  VectorXd grad_det(d);
  grad_det[0] = 2.0 * y[0];
  grad_det.tail(d - 1) = -2.0 * y.tail(d - 1);
  g = -grad_det / det;
  w = grad_det * grad_det.transpose() / (det * det);
  w(0, 0) -= 2.0 / det;
  for (int i = 1; i < d; ++i) w(i, i) += 2.0 / det;
  return true;
}

bool barrier_rsoc(const VectorXd& y, double& phi, VectorXd& g, MatrixXd& w) {
  const int d = static_cast<int>(y.size());
  if (y[0] <= 0.0 || y[1] <= 0.0) return false;
  const double det = y[0] * y[1] - y.tail(d - 2).squaredNorm();
  if (det <= 0.0) return false;
  phi += -std::log(det);
  VectorXd grad_det(d);
  grad_det[0] = y[1];
  grad_det[1] = y[0];
  grad_det.tail(d - 2) = -2.0 * y.tail(d - 2);
  g = -grad_det / det;
  w = grad_det * grad_det.transpose() / (det * det);
  w(0, 1) -= 1.0 / det;
  w(1, 0) -= 1.0 / det;
  for (int i = 2; i < d; ++i) w(i, i) += 2.0 / det;
  return true;
}

bool barrier_exp(const VectorXd& y, double& phi, VectorXd& g, MatrixXd& w) {
  const double x1 = y[0], x2 = y[1], x3 = y[2];
  if (x1 <= 0.0 || x2 <= 0.0) return false;
  const double lg = std::log(x1 / x2);
  const double r = x2 * lg - x3;
  if (r <= 0.0) return false;
  phi += -std::log(r) - std::log(x1) - std::log(x2);
  Eigen::Vector3d gr(x2 / x1, lg - 1.0, -1.0);
  g = -gr / r;
  g[0] -= 1.0 / x1;
  g[1] -= 1.0 / x2;
  w = gr * gr.transpose() / (r * r);
  // minus Hessian of r over r
  w(0, 0) += (x2 / (x1 * x1)) / r;
  w(0, 1) -= (1.0 / x1) / r;
  w(1, 0) -= (1.0 / x1) / r;
  w(1, 1) += (1.0 / x2) / r;
  w(0, 0) += 1.0 / (x1 * x1);
  w(1, 1) += 1.0 / (x2 * x2);
  return true;
}

bool barrier_pow3(const VectorXd& y, double alpha, double& phi, VectorXd& g,
                  MatrixXd& w) {
  const double x = y[0], yy = y[1], z = y[2];
  if (x <= 0.0 || yy <= 0.0) return false;
  const double beta = 1.0 - alpha;
  const double xi = std::pow(x, 2.0 * alpha) * std::pow(yy, 2.0 * beta);
  const double det = xi - z * z;
  if (det <= 0.0) return false;
  phi += -std::log(det) - beta * std::log(x) - alpha * std::log(yy);
  Eigen::Vector3d gd(2.0 * alpha * xi / x, 2.0 * beta * xi / yy, -2.0 * z);
  g = -gd / det;
  g[0] -= beta / x;
  g[1] -= alpha / yy;
  w = gd * gd.transpose() / (det * det);
  // minus Hessian of det over det, plus the extra log terms
  w(0, 0) -= (2.0 * alpha * (2.0 * alpha - 1.0) * xi / (x * x)) / det;
  w(1, 1) -= (2.0 * beta * (2.0 * beta - 1.0) * xi / (yy * yy)) / det;
  const double cross = (4.0 * alpha * beta * xi / (x * yy)) / det;
  w(0, 1) -= cross;
  w(1, 0) -= cross;
  w(2, 2) += 2.0 / det;
  w(0, 0) += beta / (x * x);
  w(1, 1) += alpha / (yy * yy);
  return true;
}

// Strict interiority check without derivatives.
bool block_interior(const CompiledBlock& b, const VectorXd& y) {
  switch (b.cone) {
    case Cone::Zero:
      return true;  // handled as equality rows, never here
    case Cone::NonNeg:
      return (y.array() > 0.0).all();
    case Cone::Soc:
      return y[0] > 0.0 &&
             y[0] * y[0] - y.tail(y.size() - 1).squaredNorm() > 0.0;
    case Cone::RSoc:
      return y[0] > 0.0 && y[1] > 0.0 &&
             y[0] * y[1] - y.tail(y.size() - 2).squaredNorm() > 0.0;
    case Cone::Exp:
      return y[0] > 0.0 && y[1] > 0.0 &&
             y[1] * std::log(y[0] / y[1]) - y[2] > 0.0;
    case Cone::Pow3:
      return y[0] > 0.0 && y[1] > 0.0 &&
             std::pow(y[0], 2.0 * b.exponent) *
                     std::pow(y[1], 2.0 * (1.0 - b.exponent)) -
                 y[2] * y[2] >
                 0.0;
  }
  return false;
}

// Shift needed along the cone's interior ray to make y strictly interior.
double block_shift(const CompiledBlock& b, const VectorXd& y) {
  VectorXd e = VectorXd::Zero(y.size());
  switch (b.cone) {
    case Cone::Zero: return 0.0;
    case Cone::NonNeg: e.setOnes(); break;
    case Cone::Soc: e[0] = 1.0; break;
    case Cone::RSoc: e[0] = 1.0; e[1] = 1.0; break;
    case Cone::Exp: e << 1.0, 1.0, -1.0; break;
    case Cone::Pow3: e << 1.0, 1.0, 0.0; break;
  }
  double lo = 0.0;
  double hi = 1.0;
  const double unit = 1.0 + y.cwiseAbs().maxCoeff();
  while (!block_interior(b, y + (hi * unit) * e) && hi < 1e12) hi *= 2.0;
  if (hi >= 1e12) return hi * unit;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (block_interior(b, y + (mid * unit) * e)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi * unit;
}

void block_ray(const CompiledBlock& b, VectorXd& e) {
  e.setZero(b.dim);
  switch (b.cone) {
    case Cone::Zero: break;
    case Cone::NonNeg: e.setOnes(); break;
    case Cone::Soc: e[0] = 1.0; break;
    case Cone::RSoc: e[0] = 1.0; e[1] = 1.0; break;
    case Cone::Exp: e[0] = 1.0; e[1] = 1.0; e[2] = -1.0; break;
    case Cone::Pow3: e[0] = 1.0; e[1] = 1.0; break;
  }
}

// ---------------------------------------------------------------------------

Compiled compile(const Program& prog) {
  Compiled c;
  c.n = prog.num_vars();

  // Column scales from the caller's hints; uniform per-block row scales
  // from the largest magnitude in the scaled block.
  c.col_scale.resize(c.n);
  for (int j = 0; j < c.n; ++j) c.col_scale[j] = prog.scale_hint(j);

  std::vector<const ConeBlock*> eq_blocks;
  std::vector<const ConeBlock*> ineq_blocks;
  for (const ConeBlock& b : prog.blocks()) {
    (b.cone == Cone::Zero ? eq_blocks : ineq_blocks).push_back(&b);
  }

  int eq_rows = 0;
  for (const ConeBlock* b : eq_blocks) {
    eq_rows += static_cast<int>(b->rows.size());
  }
  c.a_eq.setZero(eq_rows, c.n);
  c.b_eq.setZero(eq_rows);
  int er = 0;
  for (const ConeBlock* b : eq_blocks) {
    for (const LinExpr& row : b->rows) {
      double mag = std::abs(row.constant());
      for (const Term& t : row.terms()) {
        mag = std::max(mag, std::abs(t.coef * c.col_scale[t.var]));
      }
      const double rs = mag > 0.0 ? 1.0 / mag : 1.0;
      for (const Term& t : row.terms()) {
        c.a_eq(er, t.var) += rs * t.coef * c.col_scale[t.var];
      }
      c.b_eq[er] = -rs * row.constant();
      ++er;
    }
  }

  for (const ConeBlock* b : ineq_blocks) {
    double mag = 0.0;
    bool any_terms = false;
    for (const LinExpr& row : b->rows) {
      mag = std::max(mag, std::abs(row.constant()));
      any_terms = any_terms || !row.terms().empty();
      for (const Term& t : row.terms()) {
        mag = std::max(mag, std::abs(t.coef * c.col_scale[t.var]));
      }
    }
    const double rs = mag > 0.0 ? 1.0 / mag : 1.0;

    // variable-free blocks are plain membership facts, not constraints
    if (!any_terms) {
      Eigen::VectorXd y(b->rows.size());
      for (std::size_t r = 0; r < b->rows.size(); ++r) {
        y[r] = b->rows[r].constant();
      }
      if (cone_margin(*b, y) < -1e-12) c.constant_infeasible = true;
      continue;
    }

    if (b->cone == Cone::NonNeg) {
      // split into singleton rows; barrier treats each independently
      for (const LinExpr& row : b->rows) {
        if (row.terms().empty()) {
          if (row.constant() < -1e-12) c.constant_infeasible = true;
          continue;
        }
        CompiledBlock cb;
        cb.cone = Cone::NonNeg;
        cb.row0 = static_cast<int>(c.rows.size());
        cb.dim = 1;
        cb.nu = 1.0;
        CompiledRow cr;
        cr.begin = static_cast<int>(c.idx.size());
        for (const Term& t : row.terms()) {
          c.idx.push_back(t.var);
          c.val.push_back(rs * t.coef * c.col_scale[t.var]);
        }
        cr.end = static_cast<int>(c.idx.size());
        cr.constant = rs * row.constant();
        c.rows.push_back(cr);
        c.blocks.push_back(cb);
        c.nu_total += 1.0;
      }
      continue;
    }

    CompiledBlock cb;
    cb.cone = b->cone;
    cb.exponent = b->exponent;
    cb.row0 = static_cast<int>(c.rows.size());
    cb.dim = static_cast<int>(b->rows.size());
    switch (b->cone) {
      case Cone::Soc:
      case Cone::RSoc: cb.nu = 2.0; break;
      default: cb.nu = 3.0; break;
    }

    // cone-preserving per-row balancing: a*b >= |c|^2 survives a->k*a,
    // b->b/k, and x^t y^(1-t) >= |z| survives independent scalings of x
    // and y with z following; this evens out wild magnitude spreads
    // inside one block (e.g. a reciprocal times a squared distance)
    const int dim = cb.dim;
    std::vector<double> row_mag(dim, 0.0);
    for (int r = 0; r < dim; ++r) {
      double mag = std::abs(b->rows[r].constant());
      for (const Term& t : b->rows[r].terms()) {
        mag = std::max(mag, std::abs(t.coef * c.col_scale[t.var]));
      }
      row_mag[r] = mag;
    }
    std::vector<double> row_scale(dim, 1.0);
    if (b->cone == Cone::RSoc && row_mag[0] > 0.0 && row_mag[1] > 0.0) {
      const double k = std::sqrt(row_mag[1] / row_mag[0]);
      row_scale[0] = k;
      row_scale[1] = 1.0 / k;
    } else if (b->cone == Cone::Pow3 && row_mag[0] > 0.0 &&
               row_mag[1] > 0.0 && row_mag[2] > 0.0) {
      row_scale[0] = 1.0 / row_mag[0];
      row_scale[1] = 1.0 / row_mag[1];
      row_scale[2] = std::pow(row_scale[0], b->exponent) *
                     std::pow(row_scale[1], 1.0 - b->exponent);
    }
    double total = 0.0;
    for (int r = 0; r < dim; ++r) {
      total = std::max(total, row_mag[r] * row_scale[r]);
    }
    const double uniform = total > 0.0 ? 1.0 / total : 1.0;

    for (int r = 0; r < dim; ++r) {
      const LinExpr& row = b->rows[r];
      const double factor = uniform * row_scale[r];
      CompiledRow cr;
      cr.begin = static_cast<int>(c.idx.size());
      for (const Term& t : row.terms()) {
        c.idx.push_back(t.var);
        c.val.push_back(factor * t.coef * c.col_scale[t.var]);
      }
      cr.end = static_cast<int>(c.idx.size());
      cr.constant = factor * row.constant();
      c.rows.push_back(cr);
    }
    c.blocks.push_back(cb);
    c.nu_total += cb.nu;
  }
  return c;
}

// Appends a slack variable moving every inequality block along its
// interior ray, plus a floor s >= -1 keeping the feasibility phase bounded.
Compiled with_slack(const Compiled& base) {
  Compiled c = base;
  c.n = base.n + 1;
  c.col_scale.conservativeResize(c.n);
  c.col_scale[c.n - 1] = 1.0;
  if (c.a_eq.rows() > 0) {
    c.a_eq.conservativeResize(Eigen::NoChange, c.n);
    c.a_eq.col(c.n - 1).setZero();
  }
  // rebuild rows with the slack terms appended
  c.idx.clear();
  c.val.clear();
  c.rows.clear();
  VectorXd e;
  for (const CompiledBlock& b : base.blocks) {
    block_ray(b, e);
    for (int r = 0; r < b.dim; ++r) {
      const CompiledRow& src = base.rows[b.row0 + r];
      CompiledRow dst;
      dst.begin = static_cast<int>(c.idx.size());
      for (int i = src.begin; i < src.end; ++i) {
        c.idx.push_back(base.idx[i]);
        c.val.push_back(base.val[i]);
      }
      if (e[r] != 0.0) {
        c.idx.push_back(base.n);
        c.val.push_back(e[r]);
      }
      dst.end = static_cast<int>(c.idx.size());
      dst.constant = src.constant;
      c.rows.push_back(dst);
    }
  }
  // floor: s + 1 >= 0
  CompiledBlock floor_block;
  floor_block.cone = Cone::NonNeg;
  floor_block.row0 = static_cast<int>(c.rows.size());
  floor_block.dim = 1;
  floor_block.nu = 1.0;
  CompiledRow floor_row;
  floor_row.begin = static_cast<int>(c.idx.size());
  c.idx.push_back(base.n);
  c.val.push_back(1.0);
  floor_row.end = static_cast<int>(c.idx.size());
  floor_row.constant = 1.0;
  c.rows.push_back(floor_row);
  c.blocks.push_back(floor_block);
  c.nu_total += 1.0;
  return c;
}

// Bounding ball ||(x, s)|| <= radius added to the feasibility phase so its
// sublevel sets stay bounded along directions the slack objective ignores.
void add_ball(Compiled& c, double radius) {
  CompiledBlock ball;
  ball.cone = Cone::Soc;
  ball.row0 = static_cast<int>(c.rows.size());
  ball.dim = c.n + 1;
  ball.nu = 2.0;
  CompiledRow head;
  head.begin = static_cast<int>(c.idx.size());
  head.end = head.begin;
  head.constant = radius;
  c.rows.push_back(head);
  for (int j = 0; j < c.n; ++j) {
    CompiledRow row;
    row.begin = static_cast<int>(c.idx.size());
    c.idx.push_back(j);
    c.val.push_back(1.0);
    row.end = static_cast<int>(c.idx.size());
    row.constant = 0.0;
    c.rows.push_back(row);
  }
  c.blocks.push_back(ball);
  c.nu_total += ball.nu;
}

// ---------------------------------------------------------------------------

class Ipm {
 public:
  Ipm(const Compiled& c, VectorXd c_min, bool verbose)
      : c_(c), c_min_(std::move(c_min)), verbose_(verbose) {
    have_eq_ = c_.a_eq.rows() > 0;
    if (have_eq_) eq_cod_.compute(c_.a_eq);
  }

  // exact restriction of a direction to the equality null space; the KKT
  // solve alone drifts under bad conditioning
  void project_direction(VectorXd& dx) const {
    if (have_eq_) dx -= eq_cod_.solve(c_.a_eq * dx);
  }

  // pulls an iterate back onto the equality manifold
  void restore_equalities(VectorXd& x) const {
    if (have_eq_) x += eq_cod_.solve(c_.b_eq - c_.a_eq * x);
  }

  enum class PathStatus { Converged, EarlyExit, Diverged, Stall, IterCap };

  struct PathResult {
    PathStatus status;
    double t = 0.0;
    double lambda = 0.0;
    int iterations = 0;
  };

  // Value of barrier at x; false when x is not strictly interior.
  bool phi_at(const VectorXd& x, double* phi_out) const {
    double phi = 0.0;
    VectorXd y;
    for (const CompiledBlock& b : c_.blocks) {
      y.resize(b.dim);
      for (int r = 0; r < b.dim; ++r) {
        y[r] = row_value(c_, c_.rows[b.row0 + r], x);
      }
      if (!block_interior(b, y)) return false;
      switch (b.cone) {
        case Cone::NonNeg: phi -= std::log(y[0]); break;
        case Cone::Soc:
          phi -= std::log(y[0] * y[0] - y.tail(b.dim - 1).squaredNorm());
          break;
        case Cone::RSoc:
          phi -= std::log(y[0] * y[1] - y.tail(b.dim - 2).squaredNorm());
          break;
        case Cone::Exp:
          phi -= std::log(y[1] * std::log(y[0] / y[1]) - y[2]) +
                 std::log(y[0]) + std::log(y[1]);
          break;
        case Cone::Pow3: {
          const double xi = std::pow(y[0], 2.0 * b.exponent) *
                            std::pow(y[1], 2.0 * (1.0 - b.exponent));
          phi -= std::log(xi - y[2] * y[2]) +
                 (1.0 - b.exponent) * std::log(y[0]) +
                 b.exponent * std::log(y[1]);
          break;
        }
        case Cone::Zero: break;
      }
    }
    *phi_out = phi;
    return true;
  }

  double min_margin(const VectorXd& x) const {
    double worst = std::numeric_limits<double>::infinity();
    VectorXd y;
    for (const CompiledBlock& b : c_.blocks) {
      y.resize(b.dim);
      for (int r = 0; r < b.dim; ++r) {
        y[r] = row_value(c_, c_.rows[b.row0 + r], x);
      }
      worst = std::min(worst, cone_margin_compiled(b, y));
    }
    return worst;
  }

  // Barrier parameter whose central point is nearest to x in the local
  // metric: argmin_t | t c_min + grad Phi(x) | in the H(x)^-1 norm.
  // Returns a fallback when the geometry gives no useful value.
  double suggest_t(const VectorXd& x, double fallback) {
    double lambda2 = 0.0;
    if (!newton_direction(x, 0.0, &lambda2)) return fallback;
    // after newton_direction with t=0: g_ = grad Phi, dx_ = -H^-1 grad Phi
    const VectorXd hinv_gphi = -dx_;
    VectorXd hinv_c = llt_.solve(c_min_);
    hinv_c += llt_.solve(c_min_ - h_last_ * hinv_c);
    const double denom = c_min_.dot(hinv_c);
    if (!(denom > 1e-300)) return fallback;
    const double t_star = -c_min_.dot(hinv_gphi) / denom;
    if (!std::isfinite(t_star) || t_star < 1e-8 || t_star > 1e14) {
      return fallback;
    }
    return t_star;
  }

  // Required slack-ray shift making x strictly interior everywhere.
  double required_shift(const VectorXd& x) const {
    double s = 0.0;
    VectorXd y;
    for (const CompiledBlock& b : c_.blocks) {
      y.resize(b.dim);
      for (int r = 0; r < b.dim; ++r) {
        y[r] = row_value(c_, c_.rows[b.row0 + r], x);
      }
      s = std::max(s, block_shift(b, y));
    }
    return s;
  }

  // Barrier path following for minimize c_min'x. The step-exit callback is
  // checked after every Newton step; the stage-exit callback after every
  // completed centering (where the duality-gap certificate is valid).
  template <typename StepExit, typename StageExit>
  PathResult follow(VectorXd& x, double t0, double gap_rel_tol, int max_iters,
                    double mu, StepExit step_exit, StageExit stage_exit) {
    PathResult res{PathStatus::IterCap, t0, 0.0, 0};
    double t = t0;

    while (res.iterations < max_iters) {
      // pull the iterate back onto the equality manifold unless the
      // correction would cost cone interiority
      if (have_eq_) {
        VectorXd restored = x;
        restore_equalities(restored);
        double phi_probe = 0.0;
        if (phi_at(restored, &phi_probe)) x = restored;
      }
      // center at the current t
      bool centered = false;
      bool floored = false;
      double lambda2 = 0.0;
      double lambda2_prev = std::numeric_limits<double>::infinity();
      double lambda2_checkpoint = std::numeric_limits<double>::infinity();
      const double f_stage = c_min_.dot(x);
      int stage_steps = 0;
      while (res.iterations < max_iters) {
        if (!newton_direction(x, t, &lambda2)) {
          res.status = PathStatus::Stall;
          return res;
        }
        const double gap_now = c_.nu_total / t;
        const double target = gap_rel_tol * (1.0 + std::abs(c_min_.dot(x)));
        const double ctol = gap_now <= target ? 1e-8 : 1e-5;
        if (verbose_) {
          std::cerr << "  it=" << res.iterations << " t=" << t
                    << " lambda2=" << lambda2 << " f=" << c_min_.dot(x)
                    << "\n";
        }
        // centered when the decrement is small, or when float precision
        // stops it from shrinking any further
        floored = lambda2 < 1e-2 && lambda2 > 0.9 * lambda2_prev;
        if (lambda2 * 0.5 <= ctol || floored) {
          centered = true;
          break;
        }
        lambda2_prev = lambda2;
        ++res.iterations;
        ++stage_steps;
        if (!line_search(x, t)) {
          res.status = PathStatus::Stall;
          return res;
        }
        if (step_exit(x)) {
          res.status = PathStatus::EarlyExit;
          res.t = t;
          res.lambda = std::sqrt(lambda2);
          return res;
        }
        const double f = c_min_.dot(x);
        if (std::abs(f) > 1e12 || x.cwiseAbs().maxCoeff() > 1e12) {
          res.status = PathStatus::Diverged;
          return res;
        }
        // budget per centering stage: extend while the decrement is still
        // falling materially; a flat slide means an unbounded direction or
        // a genuine stall
        if (stage_steps % 150 == 0) {
          if (lambda2 > 0.3 * lambda2_checkpoint || stage_steps >= 1200) {
            if (verbose_) {
              std::cerr << "  stall diag: largest |dx| components:";
              VectorXd adx = dx_.cwiseAbs();
              for (int rep = 0; rep < 6; ++rep) {
                int j;
                adx.maxCoeff(&j);
                std::cerr << " x" << j << "=" << dx_[j];
                adx[j] = 0.0;
              }
              std::cerr << "\n";
            }
            res.status = f < f_stage - 1e4 * (1.0 + std::abs(f_stage))
                             ? PathStatus::Diverged
                             : PathStatus::Stall;
            return res;
          }
          lambda2_checkpoint = lambda2;
        }
      }
      if (!centered) break;

      res.t = t;
      res.lambda = std::sqrt(std::max(0.0, lambda2));
      const double gap = c_.nu_total / t;
      const double target = gap_rel_tol * (1.0 + std::abs(c_min_.dot(x)));
      if (gap <= target) {
        res.status = PathStatus::Converged;
        return res;
      }
      if (stage_exit(x, gap)) {
        res.status = PathStatus::EarlyExit;
        return res;
      }
      // centering hit the precision floor: growing t further only erodes
      // the Newton systems, so settle for the gap already certified when
      // it is within sight of the target
      if (floored) {
        res.status = gap <= 100.0 * target ? PathStatus::Converged
                                           : PathStatus::Stall;
        return res;
      }
      // grow t, but do not overshoot the value that already meets the target
      const double t_need = c_.nu_total / std::max(target, 1e-300);
      t = std::min(t * mu, std::max(t * 1.2, 1.05 * t_need));
    }
    return res;
  }

  const Compiled& compiled() const { return c_; }

 private:
  static double cone_margin_compiled(const CompiledBlock& b,
                                     const VectorXd& y) {
    ConeBlock shim;
    shim.cone = b.cone;
    shim.exponent = b.exponent;
    return cone_margin(shim, y);
  }

  // Assembles gradient/Hessian and computes the Newton direction into dx_.
  // Returns false when the KKT factorization cannot be rescued.
  bool newton_direction(const VectorXd& x, double t, double* lambda2) {
    const int n = c_.n;
    if (h_.rows() != n) {
      h_.resize(n, n);
      g_.resize(n);
      dx_.resize(n);
    }
    h_.setZero();
    g_ = t * c_min_;

    VectorXd y, bg;
    MatrixXd bw;
    double phi = 0.0;
    for (const CompiledBlock& b : c_.blocks) {
      y.resize(b.dim);
      for (int r = 0; r < b.dim; ++r) {
        y[r] = row_value(c_, c_.rows[b.row0 + r], x);
      }
      bg.resize(b.dim);
      bw.resize(b.dim, b.dim);
      bool ok = true;
      switch (b.cone) {
        case Cone::NonNeg:
          ok = y[0] > 0.0;
          if (ok) {
            bg[0] = -1.0 / y[0];
            bw(0, 0) = 1.0 / (y[0] * y[0]);
          }
          break;
        case Cone::Soc: ok = barrier_soc(y, phi, bg, bw); break;
        case Cone::RSoc: ok = barrier_rsoc(y, phi, bg, bw); break;
        case Cone::Exp: ok = barrier_exp(y, phi, bg, bw); break;
        case Cone::Pow3: ok = barrier_pow3(y, b.exponent, phi, bg, bw); break;
        case Cone::Zero: break;
      }
      if (!ok) return false;  // lost interiority; caller treats as stall

      // scatter g += M' bg ; H += M' bw M
      for (int a = 0; a < b.dim; ++a) {
        const CompiledRow& ra = c_.rows[b.row0 + a];
        for (int i = ra.begin; i < ra.end; ++i) {
          g_[c_.idx[i]] += c_.val[i] * bg[a];
        }
        for (int bb = 0; bb < b.dim; ++bb) {
          const double w = bw(a, bb);
          if (w == 0.0) continue;
          const CompiledRow& rb = c_.rows[b.row0 + bb];
          for (int i = ra.begin; i < ra.end; ++i) {
            const double wi = w * c_.val[i];
            for (int j = rb.begin; j < rb.end; ++j) {
              h_(c_.idx[i], c_.idx[j]) += wi * c_.val[j];
            }
          }
        }
      }
    }

    // relative per-diagonal regularization keeps badly spread curvature
    // (active-constraint directions) from polluting the rest
    double reg = 1e-12;
    for (int attempt = 0; attempt < 5; ++attempt) {
      h_last_ = h_;
      h_last_.diagonal().array() +=
          reg * (1.0 + h_last_.diagonal().array().abs());
      llt_.compute(h_last_);
      if (llt_.info() == Eigen::Success) {
        // one pass of iterative refinement recovers the digits a badly
        // spread Hessian costs the factorization
        auto refined_solve = [&](const VectorXd& rhs) {
          VectorXd sol = llt_.solve(rhs);
          sol += llt_.solve(rhs - h_last_ * sol);
          return sol;
        };
        if (!have_eq_) {
          dx_ = refined_solve(-g_);
        } else {
          MatrixXd hia = llt_.solve(c_.a_eq.transpose());
          hia += llt_.solve(c_.a_eq.transpose() - h_last_ * hia);
          const VectorXd hig = refined_solve(g_);
          const MatrixXd s = c_.a_eq * hia;
          Eigen::LDLT<MatrixXd> sl(s);
          const VectorXd nu = sl.solve(-c_.a_eq * hig);
          dx_ = -hig - hia * nu;
        }
        if (dx_.allFinite()) {
          project_direction(dx_);
          *lambda2 = std::max(0.0, -g_.dot(dx_));
          return true;
        }
      }
      reg *= 1e3;
    }
    return false;
  }

  // Largest step keeping every nonnegative row positive; other cones are
  // handled by the backtracking itself.
  double nonneg_boundary_step(const VectorXd& x) const {
    double alpha = 1.0;
    for (const CompiledBlock& b : c_.blocks) {
      if (b.cone != Cone::NonNeg) continue;
      const CompiledRow& r = c_.rows[b.row0];
      double y = r.constant;
      double dy = 0.0;
      for (int i = r.begin; i < r.end; ++i) {
        y += c_.val[i] * x[c_.idx[i]];
        dy += c_.val[i] * dx_[c_.idx[i]];
      }
      if (dy < 0.0) alpha = std::min(alpha, -y / dy);
    }
    return alpha;
  }

  // Backtracking line search on t*c_min'x + Phi(x); keeps iterates strictly
  // interior. Returns false when no acceptable step exists.
  bool line_search(VectorXd& x, double t) {
    double phi0 = 0.0;
    if (!phi_at(x, &phi0)) return false;
    const double psi0 = t * c_min_.dot(x) + phi0;
    const double slope = g_.dot(dx_);

    double alpha = std::min(1.0, 0.995 * nonneg_boundary_step(x));
    VectorXd x_try;
    double phi_try = 0.0;
    for (int i = 0; i < 70; ++i) {
      x_try = x + alpha * dx_;
      if (phi_at(x_try, &phi_try)) {
        const double psi = t * c_min_.dot(x_try) + phi_try;
        if (psi <= psi0 + 0.01 * alpha * slope) {
          x = x_try;
          if (verbose_ && alpha < 1e-2) {
            std::cerr << "    step alpha=" << alpha << " blocked by "
                      << blocking_block(x, 2.0 * alpha) << "\n";
          }
          return true;
        }
      }
      alpha *= 0.6;
      if (alpha < 1e-14) break;
    }
    return false;
  }

  // Index and cone of the first block not strictly interior at x + a*dx.
  std::string blocking_block(const VectorXd& x, double a) const {
    const VectorXd probe = x + a * dx_;
    VectorXd y;
    for (std::size_t bi = 0; bi < c_.blocks.size(); ++bi) {
      const CompiledBlock& b = c_.blocks[bi];
      y.resize(b.dim);
      for (int r = 0; r < b.dim; ++r) {
        y[r] = row_value(c_, c_.rows[b.row0 + r], probe);
      }
      if (!block_interior(b, y)) {
        return "block " + std::to_string(bi) + " (" +
               to_string(b.cone) + " dim " + std::to_string(b.dim) + ")";
      }
    }
    return "armijo";
  }

  const Compiled& c_;
  VectorXd c_min_;
  bool verbose_ = false;
  bool have_eq_ = false;
  MatrixXd h_;
  MatrixXd h_last_;
  VectorXd g_;
  VectorXd dx_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> eq_cod_;
};

}  // namespace

ConicSolution solve(const Program& prog, const SolverOptions& opts) {
  return solve(prog, VectorXd(), opts);
}

ConicSolution solve(const Program& prog, const VectorXd& hint,
                    const SolverOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  ConicSolution sol;
  auto finish = [&](SolveStatus status) {
    sol.status = status;
    sol.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return sol;
  };

  std::string why;
  if (!prog.well_formed(&why)) {
    throw std::invalid_argument("conic::solve: malformed program: " + why);
  }

  Compiled c = compile(prog);
  const int n = c.n;
  if (c.constant_infeasible) {
    return finish(SolveStatus::Infeasible);
  }

  // scaled objective (maximize): c_min = -c_scaled / obj_scale
  VectorXd c_max = VectorXd::Zero(n);
  for (const Term& t : prog.objective().terms()) {
    c_max[t.var] += t.coef * c.col_scale[t.var];
  }
  double obj_scale = c_max.cwiseAbs().maxCoeff();
  if (!(obj_scale > 0.0)) obj_scale = 1.0;
  c_max /= obj_scale;

  // starting point: satisfy equalities, then use the hint if given
  VectorXd x = VectorXd::Zero(n);
  if (hint.size() == n) {
    x = hint.cwiseQuotient(c.col_scale);
  }
  if (c.a_eq.rows() > 0) {
    const VectorXd resid = c.b_eq - c.a_eq * x;
    if (resid.cwiseAbs().maxCoeff() > 1e-12) {
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(c.a_eq);
      x += cod.solve(resid);
      const VectorXd check = c.a_eq * x - c.b_eq;
      if (check.cwiseAbs().maxCoeff() > 1e-7) {
        return finish(SolveStatus::Infeasible);  // inconsistent equalities
      }
    }
  }

  Ipm ipm(c, -c_max, opts.verbose);
  int iters_used = 0;

  // Degenerate case: no inequality blocks means no barrier; the problem is
  // a linear program over an affine set.
  if (c.blocks.empty()) {
    VectorXd reduced = c_max;
    if (c.a_eq.rows() > 0) {
      // objective component not representable by the equality rows
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(
          c.a_eq.transpose());
      reduced = c_max - c.a_eq.transpose() * cod.solve(c_max);
    }
    if (reduced.cwiseAbs().maxCoeff() > 1e-12) {
      return finish(SolveStatus::Unbounded);
    }
    sol.primal = x.cwiseProduct(c.col_scale);
    sol.objective = prog.objective_value(sol.primal);
    sol.gap = 0.0;
    return finish(SolveStatus::Optimal);
  }

  // Phase I: minimize the interior slack unless the start already works.
  const double start_margin = ipm.min_margin(x);
  if (!(start_margin > 1e-9)) {
    Compiled c1 = with_slack(c);
    const double shift0 = ipm.required_shift(x) * 1.05 + 1e-3;
    const double radius = 1e5 * (1.0 + x.norm() + shift0);
    add_ball(c1, radius);

    VectorXd c1_min = VectorXd::Zero(c1.n);
    c1_min[c1.n - 1] = 1.0;
    Ipm phase1(c1, c1_min, opts.verbose);

    VectorXd xs(c1.n);
    xs.head(n) = x;
    xs[c1.n - 1] = shift0;

    // stop at the first strictly interior point; running phase I further
    // squeezes the iterate into a corner that phase II pays to escape
    auto step_exit = [&](const VectorXd& z) { return z[c1.n - 1] < -1e-6; };
    auto stage_exit = [&](const VectorXd& z, double gap) {
      return z[c1.n - 1] > 1e-8 && gap <= 0.4 * z[c1.n - 1];
    };
    // keep enough objective pressure that a warm, barely-shifted start
    // heads toward feasibility instead of the analytic center
    const double t0 = std::clamp(
        c1.nu_total / (0.1 * (1.0 + std::abs(xs[c1.n - 1]))), 1e-2, 1e7);
    Ipm::PathResult pr = phase1.follow(xs, t0, 1e-9, opts.max_newton_iters,
                                       opts.barrier_growth, step_exit,
                                       stage_exit);
    iters_used += pr.iterations;
    const double s_final = xs[c1.n - 1];

    if (s_final >= 0.0) {
      sol.iterations = iters_used;
      // a certificate is only meaningful if the bounding ball stayed slack
      const bool ball_active = xs.norm() > 0.95 * radius;
      const bool certified =
          (pr.status == Ipm::PathStatus::Converged ||
           pr.status == Ipm::PathStatus::EarlyExit) &&
          s_final > 1e-9 && !ball_active;
      return finish(certified ? SolveStatus::Infeasible
                              : SolveStatus::NumericalLimit);
    }
    x = xs.head(n);
  }

  // Phase II: maximize the objective from the interior point, starting at
  // the barrier parameter whose central point is nearest to the start.
  const double f0 = std::abs(c_max.dot(x));
  const double t_fallback =
      std::clamp(c.nu_total / (30.0 * (1.0 + f0)), 0.1, 1e3);
  const double t0 = ipm.suggest_t(x, t_fallback);
  auto never_step = [](const VectorXd&) { return false; };
  auto never_stage = [](const VectorXd&, double) { return false; };
  Ipm::PathResult pr =
      ipm.follow(x, t0, opts.tol, opts.max_newton_iters - iters_used,
                 opts.barrier_growth, never_step, never_stage);
  iters_used += pr.iterations;
  sol.iterations = iters_used;

  switch (pr.status) {
    case Ipm::PathStatus::Converged: {
      sol.primal = x.cwiseProduct(c.col_scale);
      sol.objective = prog.objective_value(sol.primal);
      const double lam = pr.lambda;
      const double gap_scaled =
          (c.nu_total + std::sqrt(c.nu_total) * lam) /
          (pr.t * std::max(1e-12, 1.0 - lam));
      sol.gap = gap_scaled * obj_scale;
      return finish(SolveStatus::Optimal);
    }
    case Ipm::PathStatus::Diverged:
      return finish(SolveStatus::Unbounded);
    default:
      return finish(SolveStatus::NumericalLimit);
  }
}

}  // namespace skymin::conic
