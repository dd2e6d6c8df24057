#pragma once

#include <variant>

#include <Eigen/Core>

namespace kelcap {

// Carrying-capacity cost function f entering the effective drift
// mu_hat = mu (1 - f).

struct NoCapacity {};  // f = 0, plain geometric Brownian motion

struct PowerLawCapacity {
  double gamma{1.0};  // f(x) = x^gamma, x = rho K / k_tilde
};

struct LogarithmicCapacity {
  double alpha{1.0};  // f(x) = alpha log x, x = rho K / k_tilde
};

// Drift parametrized as mu (1 + sum_{k=1..n} lambda_k (rho K)^{k gamma});
// lambda_0 = 1 is implicit and never stored. The lambdas carry the capacity
// scale themselves: PowerLawCapacity{gamma} with scale k_tilde equals the
// n=1 series with lambda_1 = -(1/k_tilde)^gamma.
struct SeriesCapacity {
  double gamma{1.0};
  Eigen::ArrayXd lambdas;  // lambda_1..lambda_n; n = 0 is the GBM limit
};

using CapacitySpec =
    std::variant<NoCapacity, PowerLawCapacity, LogarithmicCapacity, SeriesCapacity>;

struct ModelParams {
  double mu{1.0};        // drift rate [1/time]
  double sigma{0.2};     // volatility [1/sqrt(time)]
  double k0{1.0};        // initial capital [currency]
  double k_tilde{10.0};  // carrying-capacity scale [currency]
  CapacitySpec capacity{NoCapacity{}};
};

// throws std::invalid_argument unless sigma > 0, k_tilde > 0, k0 > 0
void validate(const ModelParams& params);

// f at x, where x = rho K / k_tilde for the power-law and logarithmic
// families and x = rho K for the series form (whose drift is assembled
// directly in drift_mu_hat). NoCapacity -> 0. The returned value is the
// quantity subtracted inside (1 - f).
double eval_f(const CapacitySpec& capacity, double x);

// mu_hat(rho K) = mu (1 - f(rho K / k_tilde)), series form
// mu (1 + sum_k lambda_k (rho K)^{k gamma}).
double drift_mu_hat(const ModelParams& params, double rho_k);

// K mu_hat(K) at rho = 1.
double return_functional(const ModelParams& params, double k);

// Leverage rules rho(t, K); all variants are state feedback.
struct ConstantPolicy {
  double rho{1.0};
};
struct ThorpPolicy {};            // mu / sigma^2
struct StationaryLinearPolicy {}; // mu / (2 mu K / k_tilde + sigma^2), gamma = 1
struct StationaryPowerPolicy {};  // root of mu(1 - (K rho / k_tilde)^gamma) - rho sigma^2
struct StationaryLogPolicy {};    // Lambert-W form, logarithmic capacity
struct MomentFirstOrderPolicy {
  double delta_t{0.0};            // time-horizon correction; 0 reduces to StationaryLinear
};

using LeveragePolicy = std::variant<ConstantPolicy, ThorpPolicy, StationaryLinearPolicy,
                                    StationaryPowerPolicy, StationaryLogPolicy,
                                    MomentFirstOrderPolicy>;

const char* policy_name(const LeveragePolicy& policy);

}  // namespace kelcap
