#pragma once

#include <optional>

#include "kelcap/model.hpp"

namespace kelcap {

// Kelly-optimal constant leverage for plain GBM.
double thorp_rho(double mu, double sigma);

// Quasi-stationary optimal leverage, gamma = 1 power-law capacity:
// rho(K) = mu / (2 mu K / k_tilde + sigma^2). Includes the functional
// derivative of the drift; valid through second order in K / k_tilde.
double stationary_rho_linear(const ModelParams& params, double k);

// Root of mu (1 - (K rho / k_tilde)^gamma) - rho sigma^2 = 0 in
// (0, mu/sigma^2]; the stationary condition without the functional-derivative
// term, solvable for any gamma. At gamma = 1 this differs from
// stationary_rho_linear exactly by that term.
double stationary_rho_power(const ModelParams& params, double k);

// Logarithmic capacity: rho = alpha W(K0 e^{1/alpha - 1} k_tilde sigma^2 /
// (alpha K mu)) mu / sigma^2 with K0 normalized to 1 currency unit; k is
// measured in those units.
double stationary_rho_log(const ModelParams& params, double k);

// Same stationarity condition solved by bracketed root finding instead of
// Lambert W; independent cross-check route.
double stationary_rho_log_root(const ModelParams& params, double k);

// K / k_tilde at which the logarithmic-capacity optimal leverage equals 1.
double critical_xi_log(const ModelParams& params);

// |d rho / dt| / |d K / dt / K| for the gamma = 1 stationary policy; the
// quasi-stationary approximation needs this << 1.
double stationarity_diagnostic(const ModelParams& params, double k);

enum class CapacityKind { linear, logarithmic };

// Asymptotic slope of <K(t)> under the Kelly policy: mu k_tilde / 4 for the
// linear family, mu k_tilde (= 4a) for the logarithmic one.
double asymptotic_slope(const ModelParams& params, CapacityKind kind);

// rho(t, K) for any policy variant. Throws when the policy requires a
// capacity family the params do not carry.
double policy_rho(const LeveragePolicy& policy, const ModelParams& params, double k);

struct PolicyEvaluation {
  double rho{0.0};
  const char* method{""};
  std::optional<double> stationarity_ratio;  // gamma = 1 family only
};

PolicyEvaluation evaluate_policy(const LeveragePolicy& policy, const ModelParams& params,
                                 double k);

}  // namespace kelcap
