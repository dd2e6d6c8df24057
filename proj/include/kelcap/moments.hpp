#pragma once

#include <Eigen/Core>

#include "kelcap/model.hpp"

namespace kelcap {

// Coupled moments e_m = <K^{m gamma}>, m = 0..M, e_0 = 1. At the initial
// time the distribution is a Dirac delta, so e_m = k0^{gamma m}.
struct MomentTowerState {
  double gamma{1.0};
  Eigen::ArrayXd lambdas;   // lambda_1..lambda_n
  double rho{1.0};
  Eigen::ArrayXd e_values;  // size M + 1

  Eigen::Index truncation() const { return e_values.size() - 1; }
};

// Series view of a capacity: PowerLaw{gamma} -> lambda_1 = -(1/k_tilde)^gamma,
// NoCapacity -> empty series. Throws for logarithmic capacity.
SeriesCapacity as_series(const CapacitySpec& capacity, double k_tilde);

MomentTowerState dirac_tower(const ModelParams& params, double rho, Eigen::Index m_levels);

// d e_m / dt = mu rho gamma m sum_{k=0..n} lambda_k rho^{k gamma} e_{m+k}
//              + gamma m (gamma m - 1) sigma^2 rho^2 / 2 e_m,  lambda_0 = 1,
// for m = 1..M-n. Throws (insufficient truncation) when M < n + 1.
Eigen::ArrayXd tower_rhs(const MomentTowerState& state, const ModelParams& params);

// RK4 integration of the truncated tower; the top n levels (whose derivatives
// would reference moments beyond M) stay frozen at their initial values.
MomentTowerState integrate_tower(MomentTowerState state, const ModelParams& params,
                                 double t_end, double dt = 1e-3);

// Taylor value of d<log K>/dt at the horizon delta_t:
//   order 0: Phi(0) = mu rho (1 + sum_k lambda_k rho^{k gamma} e_k(t0)) - sigma^2 rho^2 / 2
//   order 1: Phi(0) + Phi'(0) delta_t, with Phi'(0) from tower_rhs at the
//            Dirac initial moments.
double phi_growth(const ModelParams& params, double rho, double delta_t, int order);

// Analytic d/drho of phi_growth at fixed delta_t and order.
double phi_growth_drho(const ModelParams& params, double rho, double delta_t, int order);

// Closed-form optimum for the gamma = 1, n = 1 family:
//   rho_opt = mu / (2 mu K0 / k_tilde + sigma^2)
//           + (-3 k_tilde^3 mu^4 sigma^2 K0 - 2 k_tilde^2 mu^5 K0^2)
//             / (2 mu K0 + k_tilde sigma^2)^4 * delta_t.
double rho_opt_first_order(const ModelParams& params, double delta_t);

// argmax of phi_growth over rho in (0, 2 mu / sigma^2]: coarse scan,
// golden-section refinement, then Newton polish on the analytic derivative.
// *unimodal (optional) reports whether the scan saw a single interior rise
// and fall; when it did not, the result is the refined grid-scan argmax.
double optimize_rho_numeric(const ModelParams& params, double delta_t, int order,
                            bool* unimodal = nullptr);

}  // namespace kelcap
