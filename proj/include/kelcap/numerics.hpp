#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "kelcap/brownian.hpp"

namespace kelcap {

// Principal-branch Lambert W: the w >= -1 with w e^w = x, for x >= -1/e.
// Residual |w e^w - x| <= 1e-12 max(1, |x|).
double lambert_w0(double x);

// W(exp(log_x)); usable when exp(log_x) would overflow.
double lambert_w0_exp(double log_x);

struct RootBracket {
  double lo{0.0};
  double hi{1.0};
  double tol{1e-12};  // on the bracket width
  int max_iter{200};
};

// Brent-style bracketed root finding: inverse-quadratic / secant steps with a
// bisection safeguard. Converges to bracket width <= tol (or an exact zero).
// Throws std::invalid_argument when f does not change sign over the bracket
// and std::runtime_error when max_iter is exhausted.
template <class F>
double find_root(F&& f, const RootBracket& bracket) {
  if (!(bracket.lo < bracket.hi)) throw std::invalid_argument("find_root: requires lo < hi");
  if (!(bracket.tol > 0.0)) throw std::invalid_argument("find_root: tol must be > 0");
  double a = bracket.lo, b = bracket.hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("find_root: no sign change over bracket");

  double c = a, fc = fa;
  double d = b - a, e = d;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < bracket.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * bracket.tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // secant / inverse quadratic interpolation
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw std::runtime_error("find_root: max iterations exceeded");
}

// Pathwise quadratures over a BrownianPath grid, both flavors of the
// exponential integrals appearing in the closed-form solutions.
//
// flavor (a): trapezoid rule for  int_0^{t_upto} exp(a s + b W_s) ds
double exp_time_integral(double a, double b, const BrownianPath& path, Eigen::Index upto);
Eigen::ArrayXd cum_exp_time_integral(double a, double b, const BrownianPath& path);

// flavor (b): left-point Ito sum  sum_{i < upto} exp(a t_i) dW_i
double exp_ito_integral(double a, const BrownianPath& path, Eigen::Index upto);
Eigen::ArrayXd cum_exp_ito_integral(double a, const BrownianPath& path);

}  // namespace kelcap
