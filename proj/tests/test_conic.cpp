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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "skymin/conic/program.hpp"
#include "skymin/conic/solver.hpp"

using namespace skymin::conic;

TEST_CASE("linear program basics") {
  Program prog;
  const int x = prog.new_var("x");
  prog.maximize(LinExpr::variable(x));
  prog.add_nonneg(LinExpr(1.0) - LinExpr::variable(x));  // x <= 1

  ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(sol.objective - prog.objective_value(sol.primal)) <=
        1e-6 * (1.0 + std::abs(sol.objective)));
}

TEST_CASE("contradictory rows are infeasible") {
  Program prog;
  const int x = prog.new_var("x");
  prog.maximize(LinExpr::variable(x));
  prog.add_nonneg(LinExpr::variable(x) - LinExpr(1.0));  // x >= 1
  prog.add_nonneg(LinExpr(0.0) - LinExpr::variable(x));  // x <= 0

  CHECK(solve(prog).status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded ray detected") {
  Program prog;
  const int x = prog.new_var("x");
  prog.maximize(LinExpr::variable(x));
  prog.add_nonneg(LinExpr::variable(x));  // x >= 0

  CHECK(solve(prog).status == SolveStatus::Unbounded);
}

TEST_CASE("equality rows") {
  Program prog;
  const int x = prog.new_var("x");
  const int y = prog.new_var("y");
  prog.maximize(LinExpr::variable(x) + LinExpr::variable(y));
  prog.add_zero(LinExpr::variable(x) - LinExpr::variable(y) - LinExpr(0.25));
  prog.add_box(x, 0.0, 1.0);
  prog.add_box(y, 0.0, 1.0);

  ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.75).epsilon(1e-6));
  CHECK(sol.primal[x] - sol.primal[y] == doctest::Approx(0.25).epsilon(1e-7));

  // inconsistent equalities
  Program bad;
  const int z = bad.new_var("z");
  bad.maximize(LinExpr::variable(z));
  bad.add_zero(LinExpr::variable(z) - LinExpr(1.0));
  bad.add_zero(LinExpr::variable(z) - LinExpr(2.0));
  bad.add_box(z, -5.0, 5.0);
  CHECK(solve(bad).status == SolveStatus::Infeasible);
}

TEST_CASE("second-order cone projection") {
  // maximize x + y subject to ||(x, y)|| <= sqrt(2): optimum at (1, 1)
  Program prog;
  const int x = prog.new_var("x");
  const int y = prog.new_var("y");
  prog.maximize(LinExpr::variable(x) + LinExpr::variable(y));
  prog.add_soc({LinExpr(std::sqrt(2.0)), LinExpr::variable(x),
                LinExpr::variable(y)});

  ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.primal[x] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.primal[y] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("hypograph of log2(1+cx)") {
  Program prog;
  const int r = prog.new_var("r");
  const int x = prog.new_var("x");
  prog.maximize(LinExpr::variable(r));
  prog.add_hypograph_log_affine(r, 10.0, x);
  prog.add_nonneg(LinExpr(0.1) - LinExpr::variable(x));  // x <= 0.1

  ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));

  // x pinned at zero pins the best r at zero
  Program prog0;
  const int r0 = prog0.new_var("r");
  const int x0 = prog0.new_var("x");
  prog0.maximize(LinExpr::variable(r0));
  prog0.add_hypograph_log_affine(r0, 10.0, x0);
  prog0.add_nonneg(LinExpr(1e-9) - LinExpr::variable(x0));  // x <= 1e-9
  ConicSolution sol0 = solve(prog0);
  REQUIRE(sol0.status == SolveStatus::Optimal);
  CHECK(std::abs(sol0.objective) <= 1e-7);

  // membership view of the same fact: at x = 0, r > 0 violates, r <= 0 fits
  Eigen::VectorXd probe(prog0.num_vars());
  probe.setZero();
  probe[r0] = 0.1;
  CHECK(prog0.max_violation(probe) > 1e-8);
  probe[r0] = -0.1;
  CHECK(prog0.max_violation(probe) <= 1e-12);

  // a point violating the hypograph by 1e-4 is rejected
  Program pinned;
  const int rp = pinned.new_var("r");
  const int xp = pinned.new_var("x");
  pinned.maximize(LinExpr(0.0));
  pinned.add_hypograph_log_affine(rp, 10.0, xp);
  pinned.add_zero(LinExpr::variable(rp) - LinExpr(1.0001));
  pinned.add_zero(LinExpr::variable(xp) - LinExpr(0.1));
  CHECK(solve(pinned).status == SolveStatus::Infeasible);

  CHECK_THROWS_AS(prog.add_hypograph_log_affine(r, -1.0, x),
                  std::invalid_argument);
}

TEST_CASE("quad over lin cone") {
  // minimize y with 1 <= y * 1 (x=1, z=1): optimum y = 1
  Program prog;
  const int y = prog.new_var("y");
  prog.maximize(-1.0 * LinExpr::variable(y));
  prog.add_quad_over_lin(LinExpr(1.0), LinExpr::variable(y), LinExpr(1.0));
  ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-6));

  // hyperbolic form: maximize x with x^2 <= y z, y <= 2, z <= 3
  Program hyp;
  const int xx = hyp.new_var("x");
  const int yy = hyp.new_var("y");
  const int zz = hyp.new_var("z");
  hyp.maximize(LinExpr::variable(xx));
  hyp.add_quad_over_lin(LinExpr::variable(xx), LinExpr::variable(yy),
                        LinExpr::variable(zz));
  hyp.add_nonneg(LinExpr(2.0) - LinExpr::variable(yy));
  hyp.add_nonneg(LinExpr(3.0) - LinExpr::variable(zz));
  ConicSolution hsol = solve(hyp);
  REQUIRE(hsol.status == SolveStatus::Optimal);
  CHECK(hsol.objective == doctest::Approx(std::sqrt(6.0)).epsilon(1e-6));
}

TEST_CASE("cubic over square cone") {
  // minimize e with s = 3, t = 1 fixed: e* = 27
  Program prog;
  const int e = prog.new_var("e");
  prog.maximize(-1.0 * LinExpr::variable(e));
  prog.add_cubic_over_square(LinExpr::variable(e), LinExpr(3.0), LinExpr(1.0));
  ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(-sol.objective == doctest::Approx(27.0).epsilon(1e-6));

  // s = 0 is feasible for any e >= 0
  Program zero;
  const int e0 = zero.new_var("e");
  zero.maximize(-1.0 * LinExpr::variable(e0));
  zero.add_cubic_over_square(LinExpr::variable(e0), LinExpr(0.0),
                             LinExpr(1.0));
  ConicSolution z = solve(zero);
  REQUIRE(z.status == SolveStatus::Optimal);
  CHECK(-z.objective == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("quartic over square chain") {
  // minimize beta with t = 2, omega = 1: beta* = t^4/omega^2 = 16
  Program prog;
  const int beta = prog.new_var("beta");
  prog.maximize(-1.0 * LinExpr::variable(beta));
  prog.add_quartic_over_square(LinExpr(2.0), LinExpr(1.0),
                               LinExpr::variable(beta));
  ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(-sol.objective == doctest::Approx(16.0).epsilon(1e-6));

  // negative beta with positive t is infeasible
  Program neg;
  const int w = neg.new_var("omega");
  neg.maximize(LinExpr(0.0));
  neg.add_nonneg(LinExpr::variable(w) - LinExpr(0.1));
  neg.add_quartic_over_square(LinExpr(1.0), LinExpr::variable(w),
                              LinExpr(-0.5));
  CHECK(solve(neg).status == SolveStatus::Infeasible);
}

TEST_CASE("power cone feasible region boundary") {
  // margins around (e, s, t): s^3 <= e t^2
  ConeBlock block;
  block.cone = Cone::Pow3;
  block.exponent = 1.0 / 3.0;
  block.rows.resize(3);

  Eigen::VectorXd inside(3), outside(3);
  inside << 27.0 * 1.001, 1.0, 3.0;   // (e, t, s) layout: e^(1/3) t^(2/3) >= s
  outside << 27.0 * 0.999, 1.0, 3.0;
  CHECK(cone_margin(block, inside) > 0.0);
  CHECK(cone_margin(block, outside) < 0.0);
}

TEST_CASE("helper round trip: random feasible points pass, crossings fail") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> unit(0.05, 1.0);

  Program prog;
  const int r = prog.new_var("r");
  const int x = prog.new_var("x");
  const int a = prog.new_var("a");
  const int b = prog.new_var("b");
  const int cvar = prog.new_var("c");
  const int e = prog.new_var("e");
  const int s = prog.new_var("s");
  const int t = prog.new_var("t");
  prog.maximize(LinExpr(0.0));
  prog.add_hypograph_log_affine(r, 10.0, x);
  prog.add_quad_over_lin(LinExpr::variable(a), LinExpr::variable(b),
                         LinExpr::variable(cvar));
  prog.add_cubic_over_square(LinExpr::variable(e), LinExpr::variable(s),
                             LinExpr::variable(t));

  const double tol = 1e-8;
  int feasible_pass = 0;
  int crossing_fail = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    Eigen::VectorXd point(prog.num_vars());
    const double xv = unit(rng);
    const double bv = unit(rng);
    const double cv = unit(rng);
    const double sv = unit(rng);
    const double tv = unit(rng);
    const double margin = 1e-3 + 0.2 * unit(rng);
    // strictly inside each helper's region
    point[x] = xv;
    point[r] = std::log2(1.0 + 10.0 * xv) - margin;
    point[b] = bv;
    point[cvar] = cv;
    point[a] = std::sqrt(bv * cv) * (1.0 - margin);
    point[s] = sv;
    point[t] = tv;
    point[e] = sv * sv * sv / (tv * tv) * (1.0 + margin);
    if (prog.max_violation(point) <= tol) ++feasible_pass;

    // push each coordinate 1e-3 past its boundary
    Eigen::VectorXd crossed = point;
    crossed[r] = std::log2(1.0 + 10.0 * xv) + 1e-3;
    crossed[a] = std::sqrt(bv * cv) + 1e-3;
    crossed[e] = sv * sv * sv / (tv * tv) - 1e-3;
    if (prog.max_violation(crossed) > tol) ++crossing_fail;
  }
  CHECK(feasible_pass == trials);
  CHECK(crossing_fail == trials);
}

TEST_CASE("solver determinism") {
  auto build = [] {
    Program prog;
    const int x = prog.new_var("x");
    const int y = prog.new_var("y");
    const int r = prog.new_var("r");
    prog.maximize(LinExpr::variable(r) + 0.3 * LinExpr::variable(y));
    prog.add_hypograph_log_affine(r, 4.0, x);
    prog.add_nonneg(LinExpr(0.5) - LinExpr::variable(x));
    prog.add_soc({LinExpr(1.5), LinExpr::variable(x), LinExpr::variable(y)});
    return prog;
  };
  ConicSolution a = solve(build());
  ConicSolution b = solve(build());
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.objective == b.objective);  // bit-identical
  CHECK((a.primal - b.primal).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("program dump and well-formedness") {
  Program prog;
  const int x = prog.new_var("x");
  prog.maximize(LinExpr::variable(x));
  prog.add_nonneg(LinExpr(1.0) - LinExpr::variable(x));
  std::ostringstream out;
  prog.dump(out);
  CHECK(out.str().find("conic-program v1") == 0);
  CHECK(out.str().find("nonneg") != std::string::npos);

  Program bad;
  bad.maximize(LinExpr::variable(3));  // no such variable
  std::string why;
  CHECK(!bad.well_formed(&why));
  CHECK(!why.empty());
  CHECK_THROWS_AS(solve(bad), std::invalid_argument);
}

TEST_CASE("warm hint does not change the answer") {
  Program prog;
  const int x = prog.new_var("x");
  const int y = prog.new_var("y");
  prog.maximize(LinExpr::variable(x) + LinExpr::variable(y));
  prog.add_soc({LinExpr(1.0), LinExpr::variable(x), LinExpr::variable(y)});

  ConicSolution cold = solve(prog);
  Eigen::VectorXd hint(2);
  hint << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);  // boundary point
  ConicSolution warm = solve(prog, hint);
  REQUIRE(cold.status == SolveStatus::Optimal);
  REQUIRE(warm.status == SolveStatus::Optimal);
  CHECK(cold.objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(warm.objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}
