#include "kelcap/leverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kelcap/detail/visit.hpp"
#include "kelcap/moments.hpp"
#include "kelcap/numerics.hpp"

namespace kelcap {

namespace {

struct PowerView {
  double gamma;
  double k_tilde;
};

// gamma = 1 power-law family: PowerLawCapacity{1} or the equivalent n = 1 series
PowerView power_view(const ModelParams& params) {
  if (const auto* p = std::get_if<PowerLawCapacity>(&params.capacity))
    return {p->gamma, params.k_tilde};
  if (const auto* s = std::get_if<SeriesCapacity>(&params.capacity)) {
    if (s->lambdas.size() == 1 && s->lambdas[0] < 0.0)
      return {s->gamma, std::pow(-s->lambdas[0], -1.0 / s->gamma)};
  }
  throw std::invalid_argument("leverage: params do not carry a power-law capacity family");
}

double log_alpha(const ModelParams& params) {
  if (const auto* l = std::get_if<LogarithmicCapacity>(&params.capacity)) return l->alpha;
  throw std::invalid_argument("leverage: params do not carry a logarithmic capacity");
}

void require_positive_mu(const ModelParams& params) {
  if (!(params.mu > 0.0))
    throw std::invalid_argument("leverage: stationary policies require mu > 0");
}

}  // namespace

double thorp_rho(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("thorp_rho: sigma must be > 0");
  return mu / (sigma * sigma);
}

double stationary_rho_linear(const ModelParams& params, double k) {
  require_positive_mu(params);
  if (k < 0.0) throw std::domain_error("stationary_rho_linear: k must be >= 0");
  return params.mu / (2.0 * params.mu * k / params.k_tilde + params.sigma * params.sigma);
}

double stationary_rho_power(const ModelParams& params, double k) {
  require_positive_mu(params);
  if (!(k > 0.0)) throw std::domain_error("stationary_rho_power: k must be > 0");
  const auto [gamma, k_tilde] = power_view(params);
  if (!(gamma > 0.0)) throw std::invalid_argument("stationary_rho_power: gamma must be > 0");
  const double s2 = params.sigma * params.sigma;
  const double hi = params.mu / s2;
  auto g = [&](double rho) {
    return params.mu * (1.0 - std::pow(k * rho / k_tilde, gamma)) - rho * s2;
  };
  // g(0+) = mu > 0 and g(mu/sigma^2) = -mu (k mu / (sigma^2 k_tilde))^gamma < 0
  return find_root(g, RootBracket{1e-12, hi, 1e-12, 200});
}

double stationary_rho_log(const ModelParams& params, double k) {
  require_positive_mu(params);
  if (!(k > 0.0)) throw std::domain_error("stationary_rho_log: k must be > 0");
  const double alpha = log_alpha(params);
  const double s2 = params.sigma * params.sigma;
  // K0 = 1 currency unit; argument evaluated in log form so alpha -> 0 stays finite
  const double log_z =
      (1.0 / alpha - 1.0) + std::log(params.k_tilde * s2 / (alpha * k * params.mu));
  return alpha * params.mu / s2 * lambert_w0_exp(log_z);
}

double stationary_rho_log_root(const ModelParams& params, double k) {
  require_positive_mu(params);
  if (!(k > 0.0)) throw std::domain_error("stationary_rho_log_root: k must be > 0");
  const double alpha = log_alpha(params);
  const double s2 = params.sigma * params.sigma;
  auto g = [&](double rho) {
    return alpha * params.mu * (std::log(params.k_tilde / rho) - std::log(k)) +
           params.mu * (1.0 - alpha) - rho * s2;
  };
  // g is strictly decreasing, +inf at rho -> 0+ and -inf at large rho
  double lo = 1e-12;
  for (int i = 0; i < 200 && g(lo) <= 0.0; ++i) lo *= 1e-2;
  double hi = std::max(1.0, 2.0 * params.mu / s2);
  for (int i = 0; i < 200 && g(hi) >= 0.0; ++i) hi *= 2.0;
  return find_root(g, RootBracket{lo, hi, 1e-12, 300});
}

double critical_xi_log(const ModelParams& params) {
  require_positive_mu(params);
  const double alpha = log_alpha(params);
  const double s2 = params.sigma * params.sigma;
  return std::exp((1.0 / alpha) * (1.0 - s2 / params.mu) - 1.0);
}

double stationarity_diagnostic(const ModelParams& params, double k) {
  require_positive_mu(params);
  if (k < 0.0) throw std::domain_error("stationarity_diagnostic: k must be >= 0");
  const double den = 2.0 * params.mu * k / params.k_tilde + params.sigma * params.sigma;
  return 2.0 * params.mu * params.mu * (k / params.k_tilde) / (den * den);
}

double asymptotic_slope(const ModelParams& params, CapacityKind kind) {
  switch (kind) {
    case CapacityKind::linear:
      return params.mu * params.k_tilde / 4.0;
    case CapacityKind::logarithmic:
      return params.mu * params.k_tilde;  // 4a with a = mu k_tilde / 4
  }
  throw std::invalid_argument("asymptotic_slope: unknown capacity kind");
}

double policy_rho(const LeveragePolicy& policy, const ModelParams& params, double k) {
  return std::visit(
      detail::overloaded{
          [](const ConstantPolicy& c) {
            if (c.rho < 0.0) throw std::invalid_argument("ConstantPolicy: rho must be >= 0");
            return c.rho;
          },
          [&](const ThorpPolicy&) { return thorp_rho(params.mu, params.sigma); },
          [&](const StationaryLinearPolicy&) { return stationary_rho_linear(params, k); },
          [&](const StationaryPowerPolicy&) { return stationary_rho_power(params, k); },
          [&](const StationaryLogPolicy&) { return stationary_rho_log(params, k); },
          [&](const MomentFirstOrderPolicy& m) {
            ModelParams at_k = params;
            at_k.k0 = k;
            return std::max(0.0, rho_opt_first_order(at_k, m.delta_t));
          }},
      policy);
}

PolicyEvaluation evaluate_policy(const LeveragePolicy& policy, const ModelParams& params,
                                 double k) {
  PolicyEvaluation eval;
  eval.rho = policy_rho(policy, params, k);
  eval.method = policy_name(policy);
  if (const auto* p = std::get_if<PowerLawCapacity>(&params.capacity); p && p->gamma == 1.0)
    eval.stationarity_ratio = stationarity_diagnostic(params, k);
  return eval;
}

}  // namespace kelcap
