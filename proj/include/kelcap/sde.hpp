#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "kelcap/brownian.hpp"
#include "kelcap/model.hpp"

namespace kelcap {

struct Trajectory {
  Eigen::ArrayXd times;
  Eigen::ArrayXd k_values;    // K(t_i), K(0) = k0, all > 0
  Eigen::ArrayXd rho_values;  // rho applied over [t_i, t_i+1); last entry evaluated at t_n
};

// direct:    Euler-Maruyama in K; throws on K <= 0 (with the step index).
// log_space: Euler on y = log K with the Ito-corrected drift; K stays positive.
// automatic: log_space for logarithmic capacity (f undefined for K <= 0),
//            direct otherwise.
enum class StepScheme { automatic, direct, log_space };

struct SimOptions {
  StepScheme scheme{StepScheme::automatic};
};

Trajectory simulate(const ModelParams& params, const LeveragePolicy& policy,
                    const BrownianPath& path, const SimOptions& options = {});

struct EnsembleStats {
  Eigen::ArrayXd times;
  Eigen::ArrayXd mean_k, mean_log_k;
  Eigen::ArrayXd stderr_k, stderr_log_k;  // sample std / sqrt(n)
  Eigen::Index n_paths{0};                // paths contributing to the statistics
  std::vector<std::int64_t> failed_paths; // indices of paths that errored
};

struct EnsembleOptions {
  SimOptions sim{};
  int n_workers{0};  // 0 = hardware concurrency; the result is identical for any value
};

// Cross-path per-step statistics. Paths are independent streams keyed by
// (master_seed, path_index); the reduction is performed in fixed chunk order,
// so the output does not depend on the number of workers. Per-path failures
// are collected and tolerated up to 1% of n_paths, above which the whole
// ensemble throws.
EnsembleStats ensemble(const ModelParams& params, const LeveragePolicy& policy,
                       Eigen::Index n_paths, std::uint64_t master_seed, double dt,
                       Eigen::Index n_steps, const EnsembleOptions& options = {});

}  // namespace kelcap
