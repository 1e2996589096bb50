#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>

namespace rsquant {

/// Shape parameters of a Beta(a, b) law; both must be strictly positive.
struct BetaParams {
  double a;
  double b;
};

/// log B(a, b) via log-gamma, stable for shapes well beyond 50.
double log_beta(double a, double b);

/// Beta(a, b) density at t in [0, 1]. Endpoint limits are returned as exact
/// values (0, a finite constant, or +infinity), never NaN.
/// Throws std::domain_error on t outside [0, 1] or nonpositive shapes.
double beta_pdf(const BetaParams& params, double t);
inline double beta_pdf(double a, double b, double t) { return beta_pdf(BetaParams{a, b}, t); }

/// Regularized incomplete beta function I_t(a, b).
/// Continued-fraction evaluation with the symmetry switch at t > a/(a+b);
/// endpoints return exactly 0 and 1.
/// Throws std::domain_error on t outside [0, 1] or nonpositive shapes.
double beta_cdf(const BetaParams& params, double t);
inline double beta_cdf(double a, double b, double t) { return beta_cdf(BetaParams{a, b}, t); }

/// Test utility: whether I_t(a,b) + I_{1-t}(b,a) equals 1 within 1e-12.
bool beta_complement_identity_ok(double a, double b, double t);

namespace detail {
inline void require_positive_step(double h) {
  if (!(h > 0.0)) throw std::domain_error("central_diff: step size must be positive");
}
}  // namespace detail

/// Central difference (fn(t+h) - fn(t-h)) / (2h), O(h^2) accurate.
template <std::invocable<double> F>
double central_diff(F&& fn, double t, double h) {
  detail::require_positive_step(h);
  return (fn(t + h) - fn(t - h)) / (2.0 * h);
}

/// Central difference restricted to [lo, hi]: falls back to a one-sided
/// second-order difference when t-h or t+h would leave the domain, so
/// probability-scale functions are never queried outside [0, 1].
template <std::invocable<double> F>
double central_diff_bounded(F&& fn, double t, double h, double lo, double hi) {
  detail::require_positive_step(h);
  if (t - h < lo) {
    return (-3.0 * fn(t) + 4.0 * fn(t + h) - fn(t + 2.0 * h)) / (2.0 * h);
  }
  if (t + h > hi) {
    return (3.0 * fn(t) - 4.0 * fn(t - h) + fn(t - 2.0 * h)) / (2.0 * h);
  }
  return (fn(t + h) - fn(t - h)) / (2.0 * h);
}

namespace detail {

inline double simpson_rule(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F&& fn, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth, bool& converged) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = simpson_rule(a, fa, m, fm, flm);
  const double right = simpson_rule(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    converged = false;
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, converged) +
         adaptive_simpson_rec(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, converged);
}

}  // namespace detail

/// Adaptive Simpson quadrature of fn over [a, b] to absolute tolerance tol.
/// Sets *converged to false if max_depth was exhausted somewhere.
template <typename F>
double integrate_adaptive_simpson(F&& fn, double a, double b, double tol, int max_depth,
                                  bool* converged = nullptr) {
  if (!(tol > 0.0)) throw std::domain_error("integrate_adaptive_simpson: tolerance must be positive");
  if (a == b) {
    if (converged) *converged = true;
    return 0.0;
  }
  const double fa = fn(a);
  const double fb = fn(b);
  const double m = 0.5 * (a + b);
  const double fm = fn(m);
  const double whole = detail::simpson_rule(a, fa, b, fb, fm);
  bool ok = true;
  const double value =
      detail::adaptive_simpson_rec(fn, a, fa, b, fb, m, fm, whole, tol, max_depth, ok);
  if (converged) *converged = ok;
  return value;
}

}  // namespace rsquant
