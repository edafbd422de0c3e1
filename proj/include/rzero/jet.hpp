// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace rzero {

/// Value of a scalar function of t together with its first three
/// t-derivatives, evaluated at one point.
struct Jet3 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;

  bool finite() const {
    return std::isfinite(value) && std::isfinite(d1) && std::isfinite(d2) &&
           std::isfinite(d3);
  }
};

}  // namespace rzero
