#pragma once

#include <cmath>

namespace rsquant::detail {

// The "np is an integer" branch of the empirical index uses plain
// floating-point integrality on the product.
inline long long quantile_index(double n_times_p) {
  const double f = std::floor(n_times_p);
  if (n_times_p == f) return static_cast<long long>(f);
  return static_cast<long long>(f) + 1;
}

}  // namespace rsquant::detail
