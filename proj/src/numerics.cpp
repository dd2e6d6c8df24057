#include "kelcap/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kelcap {

namespace {

constexpr double kInvE = 0.36787944117144232160;

// series around the branch point x = -1/e, p = sqrt(2(1 + e x))
double branch_point_guess(double x) {
  const double p = std::sqrt(std::max(0.0, 2.0 * (1.0 + std::exp(1.0) * x)));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

}  // namespace

double lambert_w0(double x) {
  if (x < -kInvE) {
    if (x < -kInvE * (1.0 + 4e-16))
      throw std::domain_error("lambert_w0: argument below -1/e");
    x = -kInvE;
  }
  if (x == 0.0) return 0.0;

  double w = (x < 0.0) ? branch_point_guess(x) : std::log1p(x);
  const double tol = 1e-13 * std::max(1.0, std::abs(x));
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double r = w * ew - x;
    if (std::abs(r) <= tol) break;
    const double wp1 = w + 1.0;
    // Halley step; falls back to Newton when too close to the branch point
    double denom = ew * wp1;
    if (std::abs(wp1) > 1e-6) denom -= (w + 2.0) * r / (2.0 * wp1);
    w -= r / denom;
  }
  return w;
}

double lambert_w0_exp(double log_x) {
  if (log_x < 690.0) return lambert_w0(std::exp(log_x));
  // solve w + log w = log_x; Newton, quadratic from w0 = L - log L. The
  // log-domain residual equals the relative residual of w e^w vs x.
  double w = log_x - std::log(log_x);
  double best = w;
  double best_r = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 64; ++iter) {
    const double r = w + std::log(w) - log_x;
    if (std::abs(r) < best_r) {
      best_r = std::abs(r);
      best = w;
    }
    if (std::abs(r) <= 1e-13) break;
    w -= r / (1.0 + 1.0 / w);
  }
  return best;
}

double exp_time_integral(double a, double b, const BrownianPath& path, Eigen::Index upto) {
  if (upto < 0 || upto > path.n_steps)
    throw std::out_of_range("exp_time_integral: upto outside the path grid");
  double acc = 0.0;
  double w = 0.0;
  double prev = 1.0;  // exp(a*0 + b*W_0)
  for (Eigen::Index i = 0; i < upto; ++i) {
    w += path.increments[i];
    const double cur = std::exp(a * path.time(i + 1) + b * w);
    acc += 0.5 * (prev + cur) * path.dt;
    prev = cur;
  }
  return acc;
}

Eigen::ArrayXd cum_exp_time_integral(double a, double b, const BrownianPath& path) {
  Eigen::ArrayXd out(path.n_steps + 1);
  out[0] = 0.0;
  double w = 0.0;
  double prev = 1.0;
  for (Eigen::Index i = 0; i < path.n_steps; ++i) {
    w += path.increments[i];
    const double cur = std::exp(a * path.time(i + 1) + b * w);
    out[i + 1] = out[i] + 0.5 * (prev + cur) * path.dt;
    prev = cur;
  }
  return out;
}

double exp_ito_integral(double a, const BrownianPath& path, Eigen::Index upto) {
  if (upto < 0 || upto > path.n_steps)
    throw std::out_of_range("exp_ito_integral: upto outside the path grid");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < upto; ++i) acc += std::exp(a * path.time(i)) * path.increments[i];
  return acc;
}

Eigen::ArrayXd cum_exp_ito_integral(double a, const BrownianPath& path) {
  Eigen::ArrayXd out(path.n_steps + 1);
  out[0] = 0.0;
  for (Eigen::Index i = 0; i < path.n_steps; ++i)
    out[i + 1] = out[i] + std::exp(a * path.time(i)) * path.increments[i];
  return out;
}

}  // namespace kelcap
