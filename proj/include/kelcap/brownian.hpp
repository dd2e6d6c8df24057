#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace kelcap {

// Wiener increments on a uniform time grid. The increment stream is a pure
// function of (master_seed, path_index), so ensembles are reproducible and
// trivially parallel.
struct BrownianPath {
  double dt{0.01};
  Eigen::Index n_steps{0};
  Eigen::ArrayXd increments;  // dW_i ~ N(0, dt), size n_steps
  std::uint64_t master_seed{0};
  std::int64_t path_index{0};

  double time(Eigen::Index i) const { return dt * static_cast<double>(i); }

  // grid times t_0..t_n, size n_steps + 1
  Eigen::ArrayXd times() const;

  // W at grid points, W_0 = 0, size n_steps + 1
  Eigen::ArrayXd cum_wiener() const;
};

BrownianPath generate_path(std::uint64_t master_seed, std::int64_t path_index, double dt,
                           Eigen::Index n_steps);

}  // namespace kelcap
