#pragma once

#include <optional>

#include <Eigen/Core>

#include "kelcap/brownian.hpp"
#include "kelcap/model.hpp"
#include "kelcap/sde.hpp"

namespace kelcap {

// dz = (a z + c) dt + (b z + d) dW
struct LinearSdeCoeffs {
  double a{0.0}, b{0.0}, c{0.0}, d{0.0};
};

// Pathwise solution z(t_i) on the path grid via the integrating factor
// Phi_t = exp((a - b^2/2) t + b W_t):
//   z = Phi_t (z0 + (c - b d) int Phi_s^{-1} ds + d int Phi_s^{-1} dW_s).
// Supports b = 0 or d = 0 (the stochastic integral is evaluated with a
// deterministic integrand); throws otherwise.
Eigen::ArrayXd linear_sde_path(const LinearSdeCoeffs& coeffs, double z0,
                               const BrownianPath& path);

// Power-law capacity, constant rho: y = K^{-gamma} reduces the SDE to the
// inhomogeneous linear form above; parameters enter rescaled as mu -> rho mu,
// sigma -> rho sigma, k_tilde -> k_tilde / rho.
Trajectory exact_power_path(const ModelParams& params, double rho, const BrownianPath& path);

// gamma = 1 specialization, implemented from its own displayed formula as an
// independent cross-check of exact_power_path.
Trajectory exact_linear_path(const ModelParams& params, double rho, const BrownianPath& path);

// Logarithmic capacity (Gompertz-type), rho fixed to 1.
Trajectory exact_log_path(const ModelParams& params, const BrownianPath& path);

// <log K(t)> for logarithmic capacity, rho = 1.
double expected_log_k_log(const ModelParams& params, double t);

// Stochastic equilibrium K_inf = k_tilde (1/rho - sigma^2 / (2 mu)) for the
// gamma = 1 family; nullopt when the log-growth is negative at all K > 0
// (1/rho <= sigma^2 / (2 mu)).
std::optional<double> equilibrium_linear(const ModelParams& params, double rho);

// log K at the logarithmic-capacity equilibrium, rho = 1:
// log k_tilde + (1/alpha)(1 - sigma^2 / (2 mu)).
double equilibrium_log(const ModelParams& params);

// Root of <d log K> = 0 in K for any capacity family at constant rho;
// nullopt when no positive equilibrium exists.
std::optional<double> equilibrium_numeric(const ModelParams& params, double rho);

struct SecondOrderMean {
  double value{0.0};
  bool within_validity{true};  // k e^{rho mu delta_t} << k_tilde
};

// First order in K/k_tilde mean of the gamma = 1 solution over a horizon
// delta_t starting from k_t:
//   K [(1 + q) e^{rho mu dt} - q e^{(2 rho mu + rho^2 sigma^2) dt}],
//   q = rho (K/k_tilde) mu / (mu + rho sigma^2).
SecondOrderMean mean_k_second_order(const ModelParams& params, double rho, double delta_t,
                                    double k_t);

}  // namespace kelcap
