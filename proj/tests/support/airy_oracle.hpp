#pragma once

#include <cmath>

#include <boost/math/special_functions/airy.hpp>

namespace polyheat::testing {

// g for p = 3, alpha = i: (3t)^(-1/3) Ai(x (3t)^(-1/3)).
inline double airy_kernel(double t, double x) {
  const double s = std::cbrt(1.0 / (3.0 * t));
  return s * boost::math::airy_ai(x * s);
}

}  // namespace polyheat::testing
