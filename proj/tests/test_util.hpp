#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "kelcap/brownian.hpp"

namespace kelcap::test {

inline BrownianPath zero_path(double dt, Eigen::Index n_steps) {
  BrownianPath path;
  path.dt = dt;
  path.n_steps = n_steps;
  path.increments = Eigen::ArrayXd::Zero(n_steps);
  return path;
}

// exact GBM on the path grid: k0 exp((rho mu - rho^2 sigma^2 / 2) t + rho sigma W)
inline Eigen::ArrayXd gbm_exact(double k0, double mu, double sigma, double rho,
                                const BrownianPath& path) {
  const double a = rho * mu - 0.5 * rho * rho * sigma * sigma;
  return k0 * (a * path.times() + rho * sigma * path.cum_wiener()).exp();
}

// uniform draws for randomized properties; mt19937_64 keeps the test
// deterministic without touching the library's own generators
struct Draw {
  std::mt19937_64 gen;
  explicit Draw(std::uint64_t seed) : gen(seed) {}
  double in(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
};

}  // namespace kelcap::test
