#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using Real = boost::multiprecision::cpp_dec_float_50;

// General robust loss for beta outside {0, 2}, evaluated in 50 digits:
// |b-2|/b * ( ((c/g)^2/|b-2| + 1)^(b/2) - 1 ).
inline Real general_loss(Real beta, Real gamma, Real c) {
  using boost::multiprecision::abs;
  using boost::multiprecision::pow;
  const Real a = abs(beta - 2);
  const Real u = (c / gamma) * (c / gamma);
  return a / beta * (pow(u / a + 1, beta / 2) - 1);
}

// Normalized weight ((c/g)^2/|b-2| + 1)^(b/2 - 1).
inline Real general_weight(Real beta, Real gamma, Real c) {
  using boost::multiprecision::abs;
  using boost::multiprecision::pow;
  const Real a = abs(beta - 2);
  const Real u = (c / gamma) * (c / gamma);
  return pow(u / a + 1, beta / 2 - 1);
}

}  // namespace oracle
