#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bisys/errors.hpp"

namespace bisys {

// Richardson extrapolation for quantities with an even error expansion,
// g(x) = c0 + c2 x^2 + c4 x^4 + ..., sampled on the halving ladder
// x, x/2, x/4, ... (values in that order). Each Neville sweep removes one
// power: level j combines with weight 4^j.
template <typename Scalar>
Scalar richardson_limit(std::vector<Scalar> values) {
  if (values.size() < 2)
    throw ExtrapolationError("richardson_limit: need at least two ladder rungs");
  for (std::size_t level = 1; level < values.size(); ++level) {
    const Scalar factor = std::pow(Scalar(4), Scalar(level));
    for (std::size_t i = 0; i + level < values.size(); ++i)
      values[i] = (factor * values[i + 1] - values[i]) / (factor - Scalar(1));
  }
  return values[0];
}

// Leading x^2 coefficient of the same expansion from three rungs
// {g(x), g(x/2), g(x/4)}: difference quotients in t = x^2 with one
// Richardson sweep, exact through the x^6 term.
template <typename Scalar>
Scalar leading_curvature(Scalar g0, Scalar g1, Scalar g2, Scalar x) {
  const Scalar t = x * x;
  const Scalar d1 = (g0 - g1) / (t - t / Scalar(4));
  const Scalar d2 = (g1 - g2) / (t / Scalar(4) - t / Scalar(16));
  return (Scalar(4) * d2 - d1) / Scalar(3);
}

}  // namespace bisys
