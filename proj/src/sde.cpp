#include "kelcap/sde.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "kelcap/leverage.hpp"

namespace kelcap {

namespace {

bool resolve_log_space(StepScheme scheme, const CapacitySpec& capacity) {
  switch (scheme) {
    case StepScheme::direct:
      return false;
    case StepScheme::log_space:
      return true;
    case StepScheme::automatic:
      return std::holds_alternative<LogarithmicCapacity>(capacity);
  }
  throw std::invalid_argument("sde: unknown step scheme");
}

// One Euler-Maruyama sweep. k_out has n_steps + 1 slots; logk_out and rho_out
// are optional. In log-space mode the state variable is y = log K with the
// Ito-corrected drift, so K stays positive by construction.
void integrate_path(const ModelParams& params, const LeveragePolicy& policy,
                    const BrownianPath& path, bool log_space, double* k_out, double* logk_out,
                    double* rho_out) {
  const Eigen::Index n = path.n_steps;
  const double s2 = params.sigma * params.sigma;
  double k = params.k0;
  double y = std::log(params.k0);
  k_out[0] = k;
  if (logk_out) logk_out[0] = y;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rho = policy_rho(policy, params, k);
    if (rho_out) rho_out[i] = rho;
    const double dw = path.increments[i];
    const double mu_hat = drift_mu_hat(params, rho * k);
    if (log_space) {
      y += (rho * mu_hat - 0.5 * rho * rho * s2) * path.dt + rho * params.sigma * dw;
      if (!(y > -700.0 && y < 700.0))
        throw std::runtime_error("simulate: log-capital out of range at step " +
                                 std::to_string(i + 1));
      k = std::exp(y);
    } else {
      k += rho * mu_hat * k * path.dt + rho * params.sigma * k * dw;
      if (!(k > 0.0))
        throw std::runtime_error("simulate: positivity violation at step " +
                                 std::to_string(i + 1));
      if (!std::isfinite(k))
        throw std::runtime_error("simulate: non-finite capital at step " + std::to_string(i + 1));
      if (logk_out) y = std::log(k);
    }
    k_out[i + 1] = k;
    if (logk_out) logk_out[i + 1] = y;
  }
  if (rho_out) rho_out[n] = policy_rho(policy, params, k);
}

}  // namespace

Trajectory simulate(const ModelParams& params, const LeveragePolicy& policy,
                    const BrownianPath& path, const SimOptions& options) {
  validate(params);
  if (!(path.dt > 0.0) || path.increments.size() != path.n_steps)
    throw std::invalid_argument("simulate: malformed BrownianPath");
  const bool log_space = resolve_log_space(options.scheme, params.capacity);
  Trajectory tr;
  tr.times = path.times();
  tr.k_values.resize(path.n_steps + 1);
  tr.rho_values.resize(path.n_steps + 1);
  integrate_path(params, policy, path, log_space, tr.k_values.data(), nullptr,
                 tr.rho_values.data());
  return tr;
}

EnsembleStats ensemble(const ModelParams& params, const LeveragePolicy& policy,
                       Eigen::Index n_paths, std::uint64_t master_seed, double dt,
                       Eigen::Index n_steps, const EnsembleOptions& options) {
  validate(params);
  if (n_paths < 2) throw std::invalid_argument("ensemble: n_paths must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("ensemble: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("ensemble: n_steps must be >= 1");
  const bool log_space = resolve_log_space(options.sim.scheme, params.capacity);

  // fixed-size chunks accumulated in path order, then reduced in chunk order:
  // the result is bit-identical for any worker count
  constexpr Eigen::Index kChunk = 64;
  const Eigen::Index n_chunks = (n_paths + kChunk - 1) / kChunk;
  struct ChunkAccum {
    Eigen::ArrayXd sum_k, sum_k2, sum_l, sum_l2;
    Eigen::Index n_ok{0};
    std::vector<std::int64_t> failed;
  };
  std::vector<ChunkAccum> chunks(static_cast<std::size_t>(n_chunks));

  std::atomic<Eigen::Index> next_chunk{0};
  auto worker = [&]() {
    std::vector<double> kbuf(static_cast<std::size_t>(n_steps) + 1);
    std::vector<double> lbuf(static_cast<std::size_t>(n_steps) + 1);
    for (;;) {
      const Eigen::Index c = next_chunk.fetch_add(1);
      if (c >= n_chunks) break;
      ChunkAccum& acc = chunks[static_cast<std::size_t>(c)];
      acc.sum_k = Eigen::ArrayXd::Zero(n_steps + 1);
      acc.sum_k2 = Eigen::ArrayXd::Zero(n_steps + 1);
      acc.sum_l = Eigen::ArrayXd::Zero(n_steps + 1);
      acc.sum_l2 = Eigen::ArrayXd::Zero(n_steps + 1);
      const Eigen::Index lo = c * kChunk;
      const Eigen::Index hi = std::min(n_paths, lo + kChunk);
      for (Eigen::Index p = lo; p < hi; ++p) {
        try {
          const BrownianPath path = generate_path(master_seed, p, dt, n_steps);
          integrate_path(params, policy, path, log_space, kbuf.data(), lbuf.data(), nullptr);
          Eigen::Map<const Eigen::ArrayXd> kv(kbuf.data(), n_steps + 1);
          Eigen::Map<const Eigen::ArrayXd> lv(lbuf.data(), n_steps + 1);
          acc.sum_k += kv;
          acc.sum_k2 += kv * kv;
          acc.sum_l += lv;
          acc.sum_l2 += lv * lv;
          ++acc.n_ok;
        } catch (const std::exception&) {
          acc.failed.push_back(p);
        }
      }
    }
  };

  int n_workers = options.n_workers > 0 ? options.n_workers
                                        : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::max(1, n_workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EnsembleStats stats;
  Eigen::ArrayXd sum_k = Eigen::ArrayXd::Zero(n_steps + 1);
  Eigen::ArrayXd sum_k2 = Eigen::ArrayXd::Zero(n_steps + 1);
  Eigen::ArrayXd sum_l = Eigen::ArrayXd::Zero(n_steps + 1);
  Eigen::ArrayXd sum_l2 = Eigen::ArrayXd::Zero(n_steps + 1);
  Eigen::Index n_ok = 0;
  for (const ChunkAccum& acc : chunks) {
    if (acc.n_ok > 0) {
      sum_k += acc.sum_k;
      sum_k2 += acc.sum_k2;
      sum_l += acc.sum_l;
      sum_l2 += acc.sum_l2;
      n_ok += acc.n_ok;
    }
    stats.failed_paths.insert(stats.failed_paths.end(), acc.failed.begin(), acc.failed.end());
  }

  const auto n_failed = static_cast<Eigen::Index>(stats.failed_paths.size());
  if (n_failed * 100 > n_paths)
    throw std::runtime_error("ensemble: " + std::to_string(n_failed) + " of " +
                             std::to_string(n_paths) + " paths failed (>1%)");
  if (n_ok < 2) throw std::runtime_error("ensemble: fewer than 2 paths succeeded");

  const auto n = static_cast<double>(n_ok);
  stats.times = Eigen::ArrayXd::LinSpaced(n_steps + 1, 0.0, dt * static_cast<double>(n_steps));
  stats.mean_k = sum_k / n;
  stats.mean_log_k = sum_l / n;
  stats.stderr_k = ((sum_k2 - n * stats.mean_k.square()).max(0.0) / (n - 1.0)).sqrt() /
                   std::sqrt(n);
  stats.stderr_log_k = ((sum_l2 - n * stats.mean_log_k.square()).max(0.0) / (n - 1.0)).sqrt() /
                       std::sqrt(n);
  stats.n_paths = n_ok;
  return stats;
}

}  // namespace kelcap
