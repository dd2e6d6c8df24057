#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kelcap/model.hpp"
#include "kelcap/sde.hpp"

namespace kelcap::experiments {

// Tabular output of one experiment. metadata (ordered key=value pairs) is
// sufficient to reproduce the columns bit-exactly; summary holds the scalar
// findings next to the analytic predictions they are compared against.
struct ExperimentResult {
  std::string name;
  std::vector<std::pair<std::string, Eigen::ArrayXd>> columns;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::pair<std::string, double>> summary;
};

// Every experiment derives its own seed space from (master_seed, name), so
// experiments can run concurrently without sharing streams; within one
// experiment all parameter cells reuse the same paths (common random numbers,
// which is what makes the paired policy comparisons tight).
std::uint64_t experiment_seed(std::uint64_t master_seed, std::string_view name);

// <log K(T)> over a rho grid, one curve per capacity strength lambda = 1/k_tilde
// (lambda = 0 is the GBM row). Log-space stepping throughout: exact for GBM and
// positivity-safe at rho sigma sqrt(dt) = O(1).
struct LogReturnVsRhoConfig {
  double mu{2.0};
  double sigma{1.0};
  double k0{1.0};
  double t_horizon{1.0};
  Eigen::ArrayXd lambdas;  // default {0, 0.1, 0.5, 1}
  double rho_min{0.1};
  double rho_max{4.0};
  double rho_step{0.1};
  Eigen::Index n_paths{2000};
  double dt{0.01};
  std::uint64_t master_seed{42};
};
ExperimentResult logreturn_vs_rho(const LogReturnVsRhoConfig& config = {});

// Mean-K trajectories of a dynamic Kelly policy against constant-rho
// strategies on the same paths, with the analytic equilibrium of each
// constant strategy in the summary.
struct KellyVsConstantConfig {
  ModelParams params{0.1, 0.1, 1.0, 10.0, PowerLawCapacity{1.0}};
  LeveragePolicy dynamic_policy{StationaryLinearPolicy{}};
  Eigen::ArrayXd constant_rhos;  // default {1.0, 0.8, 0.6, 0.4, 0.2}
  double t_horizon{60.0};
  Eigen::Index n_paths{2000};
  double dt{0.01};
  std::uint64_t master_seed{42};
  StepScheme scheme{StepScheme::automatic};
};
ExperimentResult kelly_vs_constant(const KellyVsConstantConfig& config = {});
KellyVsConstantConfig kelly_vs_constant_log_defaults();  // logarithmic-capacity variant

// Zeroth- vs first-order time-horizon correction of the moment-expansion
// optimum, paired on identical paths.
struct ZerothVsFirstConfig {
  double mu{1.0};
  double sigma{0.2};
  double k0{1.0};
  double k_tilde{100.0};
  double delta_t{0.01};
  double t_horizon{3.0};
  Eigen::Index n_paths{1000};
  double dt{0.01};
  std::uint64_t master_seed{42};
};
ExperimentResult zeroth_vs_first_order(const ZerothVsFirstConfig& config = {});

// Asymptotic linear regime of <K(t)> under the Kelly policies for linear and
// logarithmic capacity; OLS slope over the final half of the horizon against
// the predicted slopes mu k_tilde / 4 and mu k_tilde.
struct LinearRegimeConfig {
  double mu{1.0};
  double sigma{0.2};
  double k0{1.0};
  double k_tilde{10.0};
  double alpha{1.0};
  double t_horizon{7.0};
  Eigen::Index n_paths{2000};
  double dt{0.01};
  std::uint64_t master_seed{42};
};
ExperimentResult linear_regime(const LinearRegimeConfig& config = {});

// K mu_hat(K) curves (rho = 1) for power laws gamma = 1..5 and the
// logarithmic capacity.
struct ReturnFunctionalConfig {
  double mu{1.0};
  double k_tilde{10.0};
  double alpha{1.0};
  Eigen::ArrayXd gammas;  // default {1, 2, 3, 4, 5}
  double k_min{0.05};
  double k_max{20.0};
  Eigen::Index n_points{400};
};
ExperimentResult return_functional_sweep(const ReturnFunctionalConfig& config = {});

// Optimal rho(K) curves from the stationary conditions for several gamma and
// for the logarithmic capacity.
struct RhoVsKConfig {
  double mu{1.0};
  double sigma{0.2};
  double k_tilde{50.0};
  double alpha{1.0};
  Eigen::ArrayXd gammas;  // default {1, 2, 3, 4, 5}
  double k_min{0.1};
  double k_max{10.0};
  Eigen::Index n_points{200};
};
ExperimentResult rho_vs_k_sweep(const RhoVsKConfig& config = {});

}  // namespace kelcap::experiments
