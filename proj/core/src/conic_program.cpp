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

#include "skymin/conic/program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace skymin::conic {

std::string to_string(Cone cone) {
  switch (cone) {
    case Cone::Zero: return "zero";
    case Cone::NonNeg: return "nonneg";
    case Cone::Soc: return "soc";
    case Cone::RSoc: return "rsoc";
    case Cone::Exp: return "exp";
    case Cone::Pow3: return "pow3";
  }
  return "?";
}

LinExpr LinExpr::variable(int var, double coef) {
  LinExpr e;
  e.add_term(var, coef);
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  constant_ -= other.constant_;
  for (const Term& t : other.terms_) terms_.push_back({t.var, -t.coef});
  return *this;
}

LinExpr& LinExpr::operator*=(double factor) {
  constant_ *= factor;
  for (Term& t : terms_) t.coef *= factor;
  return *this;
}

void LinExpr::add_term(int var, double coef) { terms_.push_back({var, coef}); }

void LinExpr::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const Term& t : terms_) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) { return t.coef == 0.0; }),
               merged.end());
  terms_ = std::move(merged);
}

double LinExpr::eval(const Eigen::VectorXd& x) const {
  double v = constant_;
  for (const Term& t : terms_) v += t.coef * x[t.var];
  return v;
}

int LinExpr::max_var() const {
  int m = -1;
  for (const Term& t : terms_) m = std::max(m, t.var);
  return m;
}

int Program::new_var(std::string name, double scale_hint) {
  if (name.empty()) name = "x" + std::to_string(num_vars());
  var_names_.push_back(std::move(name));
  scale_hints_.push_back(scale_hint > 0.0 && std::isfinite(scale_hint)
                             ? scale_hint
                             : 1.0);
  return num_vars() - 1;
}

void Program::maximize(LinExpr objective) {
  objective.normalize();
  objective_ = std::move(objective);
}

namespace {
void normalize_rows(std::vector<LinExpr>& rows) {
  for (LinExpr& r : rows) r.normalize();
}
}  // namespace

void Program::add_zero(LinExpr row) {
  row.normalize();
  blocks_.push_back({Cone::Zero, {std::move(row)}, 0.0});
}

void Program::add_nonneg(LinExpr row) {
  row.normalize();
  blocks_.push_back({Cone::NonNeg, {std::move(row)}, 0.0});
}

void Program::add_le(const LinExpr& lhs, const LinExpr& rhs) {
  add_nonneg(rhs - lhs);
}

void Program::add_box(int var, double lo, double hi) {
  add_nonneg(LinExpr::variable(var) - LinExpr(lo));
  add_nonneg(LinExpr(hi) - LinExpr::variable(var));
}

void Program::add_soc(std::vector<LinExpr> rows) {
  if (rows.size() < 2) throw std::invalid_argument("soc: need >= 2 rows");
  normalize_rows(rows);
  blocks_.push_back({Cone::Soc, std::move(rows), 0.0});
}

void Program::add_rsoc(std::vector<LinExpr> rows) {
  if (rows.size() < 3) throw std::invalid_argument("rsoc: need >= 3 rows");
  normalize_rows(rows);
  blocks_.push_back({Cone::RSoc, std::move(rows), 0.0});
}

void Program::add_exp(LinExpr x1, LinExpr x2, LinExpr x3) {
  std::vector<LinExpr> rows{std::move(x1), std::move(x2), std::move(x3)};
  normalize_rows(rows);
  blocks_.push_back({Cone::Exp, std::move(rows), 0.0});
}

void Program::add_pow3(LinExpr x, LinExpr y, LinExpr z, double exponent) {
  if (!(exponent > 0.0) || !(exponent < 1.0)) {
    throw std::invalid_argument("pow3: exponent must be in (0,1)");
  }
  std::vector<LinExpr> rows{std::move(x), std::move(y), std::move(z)};
  normalize_rows(rows);
  blocks_.push_back({Cone::Pow3, std::move(rows), exponent});
}

void Program::add_hypograph_log_affine(int r, double c, int x) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("hypograph_log_affine: c must be > 0");
  }
  // 1 + c*x >= exp(r * ln 2)  <=>  r <= log2(1 + c*x)
  add_exp(LinExpr(1.0) + c * LinExpr::variable(x), LinExpr(1.0),
          std::log(2.0) * LinExpr::variable(r));
  add_nonneg(LinExpr::variable(x));
}

void Program::add_quad_over_lin(const LinExpr& x, const LinExpr& y,
                                const LinExpr& z) {
  add_rsoc({y, z, x});
}

void Program::add_cubic_over_square(const LinExpr& e, const LinExpr& s,
                                    const LinExpr& t) {
  add_pow3(e, t, s, 1.0 / 3.0);
  add_nonneg(s);
}

int Program::add_quartic_over_square(const LinExpr& t, const LinExpr& omega,
                                     const LinExpr& beta) {
  const int q = new_var("quartic_aux");
  add_rsoc({LinExpr::variable(q), omega, t});   // t^2 <= q * omega
  add_rsoc({beta, LinExpr(1.0), LinExpr::variable(q)});  // q^2 <= beta
  return q;
}

bool Program::well_formed(std::string* reason) const {
  auto fail = [&](const std::string& why) {
    if (reason != nullptr) *reason = why;
    return false;
  };
  auto check_expr = [&](const LinExpr& e) {
    for (const Term& t : e.terms()) {
      if (t.var < 0 || t.var >= num_vars()) return false;
      if (!std::isfinite(t.coef)) return false;
    }
    return std::isfinite(e.constant());
  };
  if (!check_expr(objective_)) return fail("objective malformed");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const ConeBlock& b = blocks_[i];
    const std::size_t dim = b.rows.size();
    bool dim_ok = true;
    switch (b.cone) {
      case Cone::Zero:
      case Cone::NonNeg: dim_ok = dim >= 1; break;
      case Cone::Soc: dim_ok = dim >= 2; break;
      case Cone::RSoc: dim_ok = dim >= 3; break;
      case Cone::Exp: dim_ok = dim == 3; break;
      case Cone::Pow3:
        dim_ok = dim == 3 && b.exponent > 0.0 && b.exponent < 1.0;
        break;
    }
    if (!dim_ok) {
      return fail("block " + std::to_string(i) + ": bad dimension for " +
                  to_string(b.cone));
    }
    for (const LinExpr& row : b.rows) {
      if (!check_expr(row)) {
        return fail("block " + std::to_string(i) + ": malformed row");
      }
    }
  }
  return true;
}

namespace {
void print_expr(std::ostream& out, const LinExpr& e) {
  out << e.constant();
  for (const Term& t : e.terms()) {
    if (t.coef >= 0.0) {
      out << " + " << t.coef;
    } else {
      out << " - " << -t.coef;
    }
    out << "*x" << t.var;
  }
}
}  // namespace

void Program::dump(std::ostream& out) const {
  out << "conic-program v1\n";
  out << "vars " << num_vars() << "\n";
  out << "maximize ";
  print_expr(out, objective_);
  out << "\n";
  for (const ConeBlock& b : blocks_) {
    out << to_string(b.cone);
    if (b.cone == Cone::Pow3) out << " " << b.exponent;
    out << " ";
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
      if (r > 0) out << " ; ";
      print_expr(out, b.rows[r]);
    }
    out << "\n";
  }
}

double Program::objective_value(const Eigen::VectorXd& x) const {
  return objective_.eval(x);
}

double cone_margin(const ConeBlock& block, const Eigen::VectorXd& y) {
  const double scale = 1.0 + y.cwiseAbs().maxCoeff();
  switch (block.cone) {
    case Cone::Zero:
      return -y.cwiseAbs().maxCoeff() / scale;
    case Cone::NonNeg:
      return y.minCoeff() / scale;
    case Cone::Soc: {
      const int d = static_cast<int>(y.size());
      return (y[0] - y.tail(d - 1).norm()) / scale;
    }
    case Cone::RSoc: {
      const int d = static_cast<int>(y.size());
      const double det = y[0] * y[1] - y.tail(d - 2).squaredNorm();
      return std::min({y[0] / scale, y[1] / scale, det / (scale * scale)});
    }
    case Cone::Exp: {
      if (y[0] <= 0.0 || y[1] <= 0.0) {
        return std::min(y[0], y[1]) / scale;
      }
      return (y[1] * std::log(y[0] / y[1]) - y[2]) / scale;
    }
    case Cone::Pow3: {
      if (y[0] <= 0.0 || y[1] <= 0.0) {
        return std::min(y[0], y[1]) / scale;
      }
      const double xi = std::pow(y[0], 2.0 * block.exponent) *
                        std::pow(y[1], 2.0 * (1.0 - block.exponent));
      return (xi - y[2] * y[2]) / (scale * scale);
    }
  }
  return 0.0;
}

double Program::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (const ConeBlock& b : blocks_) {
    Eigen::VectorXd y(b.rows.size());
    for (std::size_t r = 0; r < b.rows.size(); ++r) y[r] = b.rows[r].eval(x);
    worst = std::max(worst, -cone_margin(b, y));
  }
  return worst;
}

}  // namespace skymin::conic
