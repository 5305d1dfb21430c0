#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace rdcf {

namespace detail {

inline double simpson_panel(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson_rec(F&& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_panel(a, fa, m, fm, flm);
  const double right = simpson_panel(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over the finite interval [a, b].
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = detail::simpson_panel(a, fa, b, fb, fm);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol, 48);
}

/// Integral of f over [a, +inf), mapped onto [0, 1) via x = a + t/(1-t).
/// The integrand is assumed to decay fast enough that the mapped function
/// vanishes at t = 1; non-finite evaluations near the end point are treated
/// as zero.
template <class F>
double integrate_to_infinity(F&& f, double a, double abs_tol = 1e-10) {
  auto mapped = [&, a](double t) {
    if (t >= 1.0) return 0.0;
    const double u = 1.0 - t;
    const double x = a + t / u;
    const double v = f(x) / (u * u);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(mapped, 0.0, 1.0, abs_tol);
}

}  // namespace rdcf
