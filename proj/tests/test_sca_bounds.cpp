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

#include "skymin/sca/bounds.hpp"

using namespace skymin::sca;

namespace {
// absorb floating-point round-off when checking "bound <= exact"
bool below(double bound, double exact) {
  return bound <= exact + 1e-9 * (1.0 + std::abs(exact));
}
bool tight(double bound, double exact) {
  return std::abs(bound - exact) <= 1e-9 * (1.0 + std::abs(exact));
}
}  // namespace

TEST_CASE("square tangent: tight and below") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ref(0.0, 5.0);
  std::uniform_real_distribution<double> step(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double x_ref = ref(rng);
    const SquareTangent tangent(x_ref);
    CHECK(tight(tangent.value(x_ref), SquareTangent::exact(x_ref)));
    const double x = x_ref + step(rng);
    CHECK(below(tangent.value(x), SquareTangent::exact(x)));
  }
}

TEST_CASE("rate vs squared distance: tight and below") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dsq(0.0, 4e5);
  std::uniform_real_distribution<double> gp(1e2, 1e4);
  const double h_sq = 1e4;
  for (int i = 0; i < 1000; ++i) {
    const double d_ref = dsq(rng);
    const double gamma_p = gp(rng);
    const RateVsDistSq bound(gamma_p, d_ref, h_sq);
    CHECK(tight(bound.value(d_ref),
                RateVsDistSq::exact(gamma_p, d_ref, h_sq)));
    const double d = dsq(rng);
    CHECK(below(bound.value(d), RateVsDistSq::exact(gamma_p, d, h_sq)));
  }
}

TEST_CASE("induced-time slack bound: tight and below") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> om(0.1, 20.0);
  std::uniform_real_distribution<double> coord(-40.0, 40.0);
  const double v0 = 4.03;
  for (int i = 0; i < 1000; ++i) {
    const double omega_ref = om(rng);
    const Eigen::Vector2d du_ref(coord(rng), coord(rng));
    const SpeedSlackBound bound(omega_ref, du_ref, v0);
    CHECK(tight(bound.value(omega_ref, du_ref),
                bound.exact(omega_ref, du_ref)));
    const double omega = om(rng);
    const Eigen::Vector2d du(coord(rng), coord(rng));
    CHECK(below(bound.value(omega, du), bound.exact(omega, du)));
  }
}

TEST_CASE("per-slot energy rate bound: tight and below") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ev(1e-4, 2.0);
  std::uniform_real_distribution<double> tv(1e-4, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double eps_ref = ev(rng);
    const double tau_ref = tv(rng);
    const EnergyRateBound bound(eps_ref, tau_ref);
    CHECK(tight(bound.value(eps_ref, tau_ref),
                EnergyRateBound::exact(eps_ref, tau_ref)));
    const double eps = ev(rng);
    const double tau = tv(rng);
    CHECK(below(bound.value(eps, tau), EnergyRateBound::exact(eps, tau)));
  }
}

TEST_CASE("shared-window rate bound: tight and below") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sv(0.05, 50.0);
  std::uniform_real_distribution<double> iv(1.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double s_ref = sv(rng);
    const double i_ref = iv(rng);
    const NomaRateBound bound(s_ref, i_ref);
    CHECK(tight(bound.value(s_ref, i_ref),
                NomaRateBound::exact(s_ref, i_ref)));
    const double s = sv(rng);
    const double ii = iv(rng);
    CHECK(below(bound.value(s, ii), NomaRateBound::exact(s, ii)));
  }
}

TEST_CASE("squared distance bound: tight and below") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> coord(-500.0, 500.0);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d u_ref(coord(rng), coord(rng));
    const Eigen::Vector2d w(coord(rng), coord(rng));
    const DistSqBound bound(u_ref, w);
    CHECK(tight(bound.value(u_ref), bound.exact(u_ref)));
    const Eigen::Vector2d u(coord(rng), coord(rng));
    CHECK(below(bound.value(u), bound.exact(u)));
  }
}

TEST_CASE("interference-only rate bound: tight and below") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> sv(0.05, 50.0);
  std::uniform_real_distribution<double> iv(1.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double s_const = sv(rng);
    const double i_ref = iv(rng);
    const OrderRateBound bound(s_const, i_ref);
    CHECK(tight(bound.value(i_ref), bound.exact(i_ref)));
    const double ii = iv(rng);
    CHECK(below(bound.value(ii), bound.exact(ii)));
  }
}

TEST_CASE("log2(1 + 1/(xy)) is midpoint convex on the positive orthant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(1e-3, 20.0);
  for (int i = 0; i < 10000; ++i) {
    const double x1 = pos(rng), y1 = pos(rng);
    const double x2 = pos(rng), y2 = pos(rng);
    const double mid = NomaRateBound::exact(0.5 * (x1 + x2), 0.5 * (y1 + y2));
    const double avg = 0.5 * (NomaRateBound::exact(x1, y1) +
                              NomaRateBound::exact(x2, y2));
    CHECK(mid <= avg + 1e-12 * (1.0 + std::abs(avg)));
  }
}
