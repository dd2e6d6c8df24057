#include "kelcap/model.hpp"

#include <cmath>
#include <stdexcept>

#include "kelcap/detail/visit.hpp"

namespace kelcap {

void validate(const ModelParams& params) {
  // sigma = 0 admitted as the deterministic limit
  if (!(params.sigma >= 0.0)) throw std::invalid_argument("ModelParams: sigma must be >= 0");
  if (!(params.k_tilde > 0.0)) throw std::invalid_argument("ModelParams: k_tilde must be > 0");
  if (!(params.k0 > 0.0)) throw std::invalid_argument("ModelParams: k0 must be > 0");
  if (!std::isfinite(params.mu)) throw std::invalid_argument("ModelParams: mu must be finite");
}

double eval_f(const CapacitySpec& capacity, double x) {
  return std::visit(
      detail::overloaded{
          [](const NoCapacity&) { return 0.0; },
          [x](const PowerLawCapacity& c) {
            if (!(c.gamma > 0.0))
              throw std::invalid_argument("PowerLawCapacity: gamma must be > 0");
            if (x < 0.0) throw std::domain_error("eval_f: x must be >= 0 for power-law capacity");
            return std::pow(x, c.gamma);
          },
          [x](const LogarithmicCapacity& c) {
            if (!(c.alpha > 0.0))
              throw std::invalid_argument("LogarithmicCapacity: alpha must be > 0");
            if (!(x > 0.0))
              throw std::domain_error("eval_f: x must be > 0 for logarithmic capacity");
            return c.alpha * std::log(x);
          },
          [x](const SeriesCapacity& c) {
            if (!(c.gamma > 0.0)) throw std::invalid_argument("SeriesCapacity: gamma must be > 0");
            if (x < 0.0) throw std::domain_error("eval_f: x must be >= 0 for series capacity");
            double acc = 0.0;
            for (Eigen::Index k = 0; k < c.lambdas.size(); ++k)
              acc += c.lambdas[k] * std::pow(x, static_cast<double>(k + 1) * c.gamma);
            return -acc;
          }},
      capacity);
}

double drift_mu_hat(const ModelParams& params, double rho_k) {
  // series capacities carry their own scale; the others are evaluated at
  // rho K / k_tilde
  const double x = std::holds_alternative<SeriesCapacity>(params.capacity)
                       ? rho_k
                       : rho_k / params.k_tilde;
  return params.mu * (1.0 - eval_f(params.capacity, x));
}

double return_functional(const ModelParams& params, double k) {
  if (!(k > 0.0)) throw std::domain_error("return_functional: k must be > 0");
  return k * drift_mu_hat(params, k);
}

const char* policy_name(const LeveragePolicy& policy) {
  return std::visit(detail::overloaded{
                        [](const ConstantPolicy&) { return "constant"; },
                        [](const ThorpPolicy&) { return "thorp"; },
                        [](const StationaryLinearPolicy&) { return "stationary_linear"; },
                        [](const StationaryPowerPolicy&) { return "stationary_power"; },
                        [](const StationaryLogPolicy&) { return "stationary_log"; },
                        [](const MomentFirstOrderPolicy&) { return "moment_first_order"; }},
                    policy);
}

}  // namespace kelcap
