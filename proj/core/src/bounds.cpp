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

#include "skymin/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "skymin/noma.hpp"
#include "skymin/oma.hpp"

namespace skymin::bounds {

double hover_upper_bound(const Scenario& scn) {
  const double gamma_h = scn.gamma0 / (scn.altitude * scn.altitude);
  double worst = std::numeric_limits<double>::infinity();
  for (double e : scn.device_energy) {
    worst = std::min(worst, e * gamma_h / std::numbers::ln2);
  }
  return worst;
}

double max_range_speed(const PropulsionParams& params, double v_max) {
  if (!(v_max > 0.0)) {
    throw std::invalid_argument("max_range_speed: v_max must be > 0");
  }
  auto ratio = [&](double v) { return v / propulsion_power(v, params); };
  // golden-section search on (0, v_max]
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1e-6, hi = v_max;
  double m1 = hi - phi * (hi - lo);
  double m2 = lo + phi * (hi - lo);
  double f1 = ratio(m1), f2 = ratio(m2);
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + phi * (hi - lo);
      f2 = ratio(m2);
    } else {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - phi * (hi - lo);
      f1 = ratio(m1);
    }
  }
  const double mid = 0.5 * (lo + hi);
  return ratio(mid) >= ratio(v_max) ? mid : v_max;
}

SolveReport straight_line_solution(const Scenario& scn, Scheme scheme) {
  switch (scheme) {
    case Scheme::Oma1:
    case Scheme::StraightOma1: {
      oma::SolveOptions opt;
      opt.variant = oma::Variant::EqualTime;
      opt.straight_line = true;
      return oma::solve(scn, opt);
    }
    case Scheme::Oma2:
    case Scheme::StraightOma2: {
      oma::SolveOptions opt;
      opt.straight_line = true;
      return oma::solve(scn, opt);
    }
    case Scheme::Noma:
    case Scheme::StraightNoma: {
      noma::SolveOptions opt;
      opt.straight_line = true;
      return noma::solve(scn, opt);
    }
    default:
      throw std::invalid_argument(
          "straight_line_solution: scheme has no straight-line variant");
  }
}

}  // namespace skymin::bounds
