#include "kelcap/closed_form.hpp"

#include <cmath>
#include <stdexcept>

#include "kelcap/numerics.hpp"

namespace kelcap {

namespace {

double require_power_gamma(const ModelParams& params) {
  if (const auto* p = std::get_if<PowerLawCapacity>(&params.capacity)) {
    if (!(p->gamma > 0.0)) throw std::invalid_argument("closed_form: gamma must be > 0");
    return p->gamma;
  }
  throw std::invalid_argument("closed_form: params must carry a power-law capacity");
}

void require_linear(const ModelParams& params) {
  if (std::abs(require_power_gamma(params) - 1.0) > 1e-12)
    throw std::invalid_argument("closed_form: this operation requires gamma = 1");
}

double require_log_alpha(const ModelParams& params) {
  if (const auto* l = std::get_if<LogarithmicCapacity>(&params.capacity)) {
    if (!(l->alpha > 0.0)) throw std::invalid_argument("closed_form: alpha must be > 0");
    return l->alpha;
  }
  throw std::invalid_argument("closed_form: params must carry a logarithmic capacity");
}

Trajectory make_trajectory(const BrownianPath& path, Eigen::ArrayXd k, double rho) {
  Trajectory tr;
  tr.times = path.times();
  tr.k_values = std::move(k);
  tr.rho_values = Eigen::ArrayXd::Constant(path.n_steps + 1, rho);
  return tr;
}

}  // namespace

Eigen::ArrayXd linear_sde_path(const LinearSdeCoeffs& coeffs, double z0,
                               const BrownianPath& path) {
  if (coeffs.b != 0.0 && coeffs.d != 0.0)
    throw std::invalid_argument(
        "linear_sde_path: b and d both nonzero requires a stochastic-integrand Ito integral");
  const double ae = coeffs.a - 0.5 * coeffs.b * coeffs.b;
  const Eigen::ArrayXd phi = (ae * path.times() + coeffs.b * path.cum_wiener()).exp();
  Eigen::ArrayXd z =
      z0 + (coeffs.c - coeffs.b * coeffs.d) * cum_exp_time_integral(-ae, -coeffs.b, path);
  if (coeffs.d != 0.0) z += coeffs.d * cum_exp_ito_integral(-ae, path);
  return phi * z;
}

Trajectory exact_power_path(const ModelParams& params, double rho, const BrownianPath& path) {
  validate(params);
  if (!(rho > 0.0)) throw std::invalid_argument("exact_power_path: rho must be > 0");
  const double gamma = require_power_gamma(params);
  const double mu_s = rho * params.mu;
  const double sg_s = rho * params.sigma;
  const double u0 = rho * params.k0 / params.k_tilde;
  const LinearSdeCoeffs coeffs{0.5 * sg_s * sg_s * gamma * (gamma + 1.0) - gamma * mu_s,
                               -gamma * sg_s, gamma * mu_s, 0.0};
  const Eigen::ArrayXd y = linear_sde_path(coeffs, std::pow(u0, -gamma), path);
  if (!((y > 0.0).all() && y.isFinite().all()))
    throw std::runtime_error("exact_power_path: solution overflowed or left the positive domain");
  return make_trajectory(path, (params.k_tilde / rho) * y.pow(-1.0 / gamma), rho);
}

Trajectory exact_linear_path(const ModelParams& params, double rho, const BrownianPath& path) {
  validate(params);
  if (!(rho > 0.0)) throw std::invalid_argument("exact_linear_path: rho must be > 0");
  require_linear(params);
  const double a = rho * params.mu - 0.5 * rho * rho * params.sigma * params.sigma;
  const Eigen::ArrayXd growth = (a * path.times() + rho * params.sigma * path.cum_wiener()).exp();
  const Eigen::ArrayXd integral = cum_exp_time_integral(a, rho * params.sigma, path);
  const Eigen::ArrayXd k =
      (params.k_tilde / rho) * growth /
      (params.k_tilde / (rho * params.k0) + rho * params.mu * integral);
  return make_trajectory(path, k, rho);
}

Trajectory exact_log_path(const ModelParams& params, const BrownianPath& path) {
  validate(params);
  const double alpha = require_log_alpha(params);
  if (params.mu == 0.0) throw std::invalid_argument("exact_log_path: mu must be nonzero");
  const double am = alpha * params.mu;
  const double c0 = std::log(params.k0);
  const double c = params.mu * (1.0 + alpha * std::log(params.k_tilde)) -
                   0.5 * params.sigma * params.sigma;
  const Eigen::ArrayXd t = path.times();
  const Eigen::ArrayXd ito = cum_exp_ito_integral(am, path);
  const Eigen::ArrayXd y =
      (-am * t).exp() * (c0 + c * ((am * t).exp() - 1.0) / am + params.sigma * ito);
  return make_trajectory(path, y.exp(), 1.0);
}

double expected_log_k_log(const ModelParams& params, double t) {
  validate(params);
  const double alpha = require_log_alpha(params);
  if (!(params.mu > 0.0)) throw std::invalid_argument("expected_log_k_log: mu must be > 0");
  const double am = alpha * params.mu;
  const double c0 = std::log(params.k0);
  const double level = (1.0 / alpha + std::log(params.k_tilde)) -
                       params.sigma * params.sigma / (2.0 * am);
  // algebraically equal to e^{-am t} (c0 + level (e^{am t} - 1)) but finite
  // for arbitrarily large t
  return level + (c0 - level) * std::exp(-am * t);
}

std::optional<double> equilibrium_linear(const ModelParams& params, double rho) {
  validate(params);
  require_linear(params);
  if (!(params.mu > 0.0)) throw std::invalid_argument("equilibrium_linear: mu must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("equilibrium_linear: rho must be > 0");
  const double k =
      params.k_tilde * (1.0 / rho - params.sigma * params.sigma / (2.0 * params.mu));
  if (!(k > 0.0)) return std::nullopt;
  return k;
}

double equilibrium_log(const ModelParams& params) {
  validate(params);
  const double alpha = require_log_alpha(params);
  if (!(params.mu > 0.0)) throw std::invalid_argument("equilibrium_log: mu must be > 0");
  return std::log(params.k_tilde) +
         (1.0 / alpha) * (1.0 - params.sigma * params.sigma / (2.0 * params.mu));
}

std::optional<double> equilibrium_numeric(const ModelParams& params, double rho) {
  validate(params);
  if (!(rho > 0.0)) throw std::invalid_argument("equilibrium_numeric: rho must be > 0");
  const double s2 = params.sigma * params.sigma;
  auto growth = [&](double k) { return rho * drift_mu_hat(params, rho * k) - 0.5 * rho * rho * s2; };
  // the log-growth is strictly decreasing in k for every capacity family here
  double lo = params.k_tilde * 1e-12;
  bool positive_somewhere = false;
  for (int i = 0; i < 60; ++i) {
    if (growth(lo) > 0.0) {
      positive_somewhere = true;
      break;
    }
    lo *= 1e-2;
    if (lo < 1e-300) break;
  }
  if (!positive_somewhere) return std::nullopt;
  double hi = params.k_tilde;
  int expand = 0;
  while (growth(hi) >= 0.0) {
    hi *= 2.0;
    if (++expand > 200) return std::nullopt;  // no finite equilibrium (e.g. NoCapacity)
  }
  return find_root(growth, RootBracket{lo, hi, 1e-10 * std::max(1.0, params.k_tilde), 300});
}

SecondOrderMean mean_k_second_order(const ModelParams& params, double rho, double delta_t,
                                    double k_t) {
  validate(params);
  require_linear(params);
  if (!(rho > 0.0)) throw std::invalid_argument("mean_k_second_order: rho must be > 0");
  if (!(k_t > 0.0)) throw std::invalid_argument("mean_k_second_order: k_t must be > 0");
  if (delta_t < 0.0) throw std::invalid_argument("mean_k_second_order: delta_t must be >= 0");
  const double s2 = params.sigma * params.sigma;
  const double q = rho * (k_t / params.k_tilde) * params.mu / (params.mu + rho * s2);
  const double value = k_t * ((1.0 + q) * std::exp(rho * params.mu * delta_t) -
                              q * std::exp((2.0 * rho * params.mu + rho * rho * s2) * delta_t));
  SecondOrderMean result;
  result.value = value;
  result.within_validity = k_t * std::exp(rho * params.mu * delta_t) <= 0.1 * params.k_tilde;
  return result;
}

}  // namespace kelcap
