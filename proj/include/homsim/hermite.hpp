#pragma once

#include "homsim/errors.hpp"

namespace homsim {

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}, H_0 = 1, H_1 = 2x.
template <typename Scalar>
Scalar hermite(int n, Scalar x) {
  if (n < 0) throw ValidationError("hermite: negative order");
  Scalar hm = 1;
  if (n == 0) return hm;
  Scalar h = 2 * x;
  for (int k = 1; k < n; ++k) {
    const Scalar hp = 2 * x * h - Scalar(2 * k) * hm;
    hm = h;
    h = hp;
  }
  return h;
}

}  // namespace homsim
