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

#ifndef SKYMIN_CONIC_PROGRAM_HPP
#define SKYMIN_CONIC_PROGRAM_HPP

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace skymin::conic {

/// Supported cone families. A constraint is "affine map of the variables
/// lands in the cone".
enum class Cone {
  Zero,    ///< rows == 0
  NonNeg,  ///< rows >= 0 componentwise
  Soc,     ///< rows[0] >= || rows[1..] ||
  RSoc,    ///< rows[0] * rows[1] >= sum_i rows[2+i]^2, rows[0], rows[1] >= 0
  Exp,     ///< rows[0] >= rows[1] * exp(rows[2] / rows[1]), rows[1] > 0
  Pow3,    ///< rows[0]^a * rows[1]^(1-a) >= |rows[2]|, rows[0], rows[1] >= 0
};

std::string to_string(Cone cone);

struct Term {
  int var;
  double coef;
};

/// Sparse affine expression: sum of coef * x_var plus a constant.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT(runtime/explicit)
  static LinExpr variable(int var, double coef = 1.0);

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double factor);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(double factor, LinExpr e) { return e *= factor; }
  friend LinExpr operator*(LinExpr e, double factor) { return e *= factor; }
  friend LinExpr operator-(LinExpr e) { return e *= -1.0; }

  void add_term(int var, double coef);
  /// Merge duplicate variables, drop zero coefficients, sort by index.
  void normalize();

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  double eval(const Eigen::VectorXd& x) const;
  int max_var() const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

struct ConeBlock {
  Cone cone;
  std::vector<LinExpr> rows;
  double exponent = 0.0;  ///< Pow3 only, in (0,1)
};

/// Solver-agnostic conic program: named variables, a linear objective
/// (always maximized), and affine-map-in-cone constraints.
///
/// dump() writes a plain-text form, one cone per line:
///   conic-program v1
///   vars <n>
///   maximize <expr>
///   <cone> [exponent] <expr> ; <expr> ; ...
/// where <expr> is "<const> [+|-] <coef>*x<i> ...".
class Program {
 public:
  /// scale_hint is the variable's natural magnitude; the solver uses it to
  /// equilibrate columns. It does not change the meaning of the program.
  int new_var(std::string name = "", double scale_hint = 1.0);
  int num_vars() const { return static_cast<int>(var_names_.size()); }
  const std::string& var_name(int v) const { return var_names_[v]; }
  double scale_hint(int v) const { return scale_hints_[v]; }

  void maximize(LinExpr objective);
  const LinExpr& objective() const { return objective_; }

  void add_zero(LinExpr row);
  void add_nonneg(LinExpr row);
  /// lhs <= rhs as one nonnegative row.
  void add_le(const LinExpr& lhs, const LinExpr& rhs);
  /// lo <= x_var <= hi as two nonnegative rows.
  void add_box(int var, double lo, double hi);
  void add_soc(std::vector<LinExpr> rows);
  void add_rsoc(std::vector<LinExpr> rows);
  void add_exp(LinExpr x1, LinExpr x2, LinExpr x3);
  void add_pow3(LinExpr x, LinExpr y, LinExpr z, double exponent);

  /// r <= log2(1 + c * x) with x >= 0; c > 0 (throws otherwise). Exact via
  /// an exponential-cone row.
  void add_hypograph_log_affine(int r, double c, int x);
  /// x^2 <= y * z with y, z >= 0 (rotated second-order cone).
  void add_quad_over_lin(const LinExpr& x, const LinExpr& y, const LinExpr& z);
  /// s^3 <= e * t^2 with s, t >= 0 (three-dimensional power cone).
  void add_cubic_over_square(const LinExpr& e, const LinExpr& s,
                             const LinExpr& t);
  /// t^4 / omega^2 <= beta with omega >= 0. Introduces one auxiliary q with
  /// t^2 <= q*omega and q^2 <= beta; returns q's index.
  int add_quartic_over_square(const LinExpr& t, const LinExpr& omega,
                              const LinExpr& beta);

  const std::vector<ConeBlock>& blocks() const { return blocks_; }

  bool well_formed(std::string* reason = nullptr) const;
  void dump(std::ostream& out) const;

  double objective_value(const Eigen::VectorXd& x) const;
  /// Largest constraint violation of x across all blocks, normalized per
  /// block by (1 + |row values|). Zero when feasible.
  double max_violation(const Eigen::VectorXd& x) const;

 private:
  std::vector<std::string> var_names_;
  std::vector<double> scale_hints_;
  LinExpr objective_;
  std::vector<ConeBlock> blocks_;
};

/// Normalized feasibility margin of y against one cone: positive inside,
/// negative outside, zero on the boundary.
double cone_margin(const ConeBlock& block, const Eigen::VectorXd& y);

}  // namespace skymin::conic

#endif  // SKYMIN_CONIC_PROGRAM_HPP
