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

#include "skymin/report.hpp"

namespace skymin {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Oma1: return "oma1";
    case Scheme::Oma2: return "oma2";
    case Scheme::Noma: return "noma";
    case Scheme::StraightOma1: return "straight-oma1";
    case Scheme::StraightOma2: return "straight-oma2";
    case Scheme::StraightNoma: return "straight-noma";
    case Scheme::UpperBound: return "upper-bound";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(const std::string& tag) {
  if (tag == "oma1") return Scheme::Oma1;
  if (tag == "oma2") return Scheme::Oma2;
  if (tag == "noma") return Scheme::Noma;
  if (tag == "straight-oma1") return Scheme::StraightOma1;
  if (tag == "straight-oma2") return Scheme::StraightOma2;
  if (tag == "straight-noma") return Scheme::StraightNoma;
  if (tag == "upper-bound") return Scheme::UpperBound;
  return std::nullopt;
}

bool scheme_is_straight(Scheme scheme) {
  return scheme == Scheme::StraightOma1 || scheme == Scheme::StraightOma2 ||
         scheme == Scheme::StraightNoma;
}

bool scheme_is_noma(Scheme scheme) {
  return scheme == Scheme::Noma || scheme == Scheme::StraightNoma;
}

}  // namespace skymin
