// Copyright 2026 The qmonty Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "qmonty/errors.hpp"

namespace qmonty {

namespace angle_detail {

inline double ParseNumber(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DomainError("cannot parse angle '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace angle_detail

// Radians, either decimal ("0.7853981633974483") or as a fraction of pi:
// "pi", "-pi", "pi/4", "3pi/4", "3*pi/4", "0.5pi".
inline double ParseAngle(std::string_view text) {
  const std::string_view whole = text;
  const auto pi_pos = text.find("pi");
  if (pi_pos == std::string_view::npos) return angle_detail::ParseNumber(text, whole);

  std::string_view coeff = text.substr(0, pi_pos);
  std::string_view rest = text.substr(pi_pos + 2);
  if (!coeff.empty() && coeff.back() == '*') coeff.remove_suffix(1);
  double factor = 1.0;
  if (coeff == "-") {
    factor = -1.0;
  } else if (coeff == "+") {
    factor = 1.0;
  } else if (!coeff.empty()) {
    factor = angle_detail::ParseNumber(coeff.front() == '+' ? coeff.substr(1) : coeff, whole);
  }
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw DomainError("cannot parse angle '" + std::string(whole) + "'");
    divisor = angle_detail::ParseNumber(rest.substr(1), whole);
    if (divisor == 0.0) throw DomainError("angle '" + std::string(whole) + "' divides by zero");
  }
  return factor * std::numbers::pi / divisor;
}

}  // namespace qmonty
