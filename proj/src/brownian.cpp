#include "kelcap/brownian.hpp"

#include <cmath>
#include <stdexcept>

#include "kelcap/rng.hpp"

namespace kelcap {

Eigen::ArrayXd BrownianPath::times() const {
  return Eigen::ArrayXd::LinSpaced(n_steps + 1, 0.0, dt * static_cast<double>(n_steps));
}

Eigen::ArrayXd BrownianPath::cum_wiener() const {
  Eigen::ArrayXd w(n_steps + 1);
  w[0] = 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n_steps; ++i) {
    acc += increments[i];
    w[i + 1] = acc;
  }
  return w;
}

BrownianPath generate_path(std::uint64_t master_seed, std::int64_t path_index, double dt,
                           Eigen::Index n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("generate_path: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("generate_path: n_steps must be >= 1");
  BrownianPath path;
  path.dt = dt;
  path.n_steps = n_steps;
  path.increments.resize(n_steps);
  path.master_seed = master_seed;
  path.path_index = path_index;
  NormalSampler normal(path_stream(master_seed, path_index));
  const double s = std::sqrt(dt);
  for (Eigen::Index i = 0; i < n_steps; ++i) path.increments[i] = s * normal();
  return path;
}

}  // namespace kelcap
