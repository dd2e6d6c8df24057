#include "kelcap/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "kelcap/closed_form.hpp"
#include "kelcap/leverage.hpp"
#include "kelcap/rng.hpp"
#include "kelcap/version.hpp"

namespace kelcap::experiments {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// short form for column/summary tags; metadata stays at full precision
std::string tag(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string num(Eigen::Index x) { return std::to_string(static_cast<long long>(x)); }
std::string num(std::uint64_t x) { return std::to_string(x); }

std::string join(const Eigen::ArrayXd& values) {
  std::string out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += num(values[i]);
  }
  return out;
}

Eigen::ArrayXd default_if_empty(const Eigen::ArrayXd& values, std::initializer_list<double> def) {
  if (values.size() > 0) return values;
  Eigen::ArrayXd out(static_cast<Eigen::Index>(def.size()));
  Eigen::Index i = 0;
  for (double v : def) out[i++] = v;
  return out;
}

const char* scheme_name(StepScheme scheme) {
  switch (scheme) {
    case StepScheme::automatic: return "auto";
    case StepScheme::direct: return "direct";
    case StepScheme::log_space: return "log";
  }
  return "auto";
}

// Policies evaluated on identical Brownian paths (common random numbers);
// per-step mean/stderr of K plus per-path terminal values for paired tests.
struct PairedCase {
  ModelParams params;
  LeveragePolicy policy;
  StepScheme scheme{StepScheme::automatic};
};

struct PairedSeries {
  Eigen::ArrayXd mean_k, stderr_k;
  Eigen::ArrayXd terminal_k, terminal_log_k;  // per path
};

std::vector<PairedSeries> run_paired(const std::vector<PairedCase>& cases, Eigen::Index n_paths,
                                     std::uint64_t seed, double dt, Eigen::Index n_steps) {
  if (n_paths < 2) throw std::invalid_argument("experiments: n_paths must be >= 2");
  const std::size_t n_cases = cases.size();
  std::vector<Eigen::ArrayXd> sum(n_cases, Eigen::ArrayXd::Zero(n_steps + 1));
  std::vector<Eigen::ArrayXd> sum2(n_cases, Eigen::ArrayXd::Zero(n_steps + 1));
  std::vector<PairedSeries> out(n_cases);
  for (auto& series : out) {
    series.terminal_k.resize(n_paths);
    series.terminal_log_k.resize(n_paths);
  }
  for (Eigen::Index p = 0; p < n_paths; ++p) {
    const BrownianPath path = generate_path(seed, p, dt, n_steps);
    for (std::size_t c = 0; c < n_cases; ++c) {
      const Trajectory tr =
          simulate(cases[c].params, cases[c].policy, path, SimOptions{cases[c].scheme});
      sum[c] += tr.k_values;
      sum2[c] += tr.k_values.square();
      out[c].terminal_k[p] = tr.k_values[n_steps];
      out[c].terminal_log_k[p] = std::log(tr.k_values[n_steps]);
    }
  }
  const double n = static_cast<double>(n_paths);
  for (std::size_t c = 0; c < n_cases; ++c) {
    out[c].mean_k = sum[c] / n;
    out[c].stderr_k =
        ((sum2[c] - n * out[c].mean_k.square()).max(0.0) / (n - 1.0)).sqrt() / std::sqrt(n);
  }
  return out;
}

struct MeanStderr {
  double mean, stderr;
};

MeanStderr mean_stderr(const Eigen::ArrayXd& values) {
  const double n = static_cast<double>(values.size());
  const double m = values.mean();
  const double var = std::max(0.0, (values - m).square().sum() / (n - 1.0));
  return {m, std::sqrt(var / n)};
}

double ols_slope(const Eigen::ArrayXd& t, const Eigen::ArrayXd& y) {
  const double tm = t.mean();
  const double ym = y.mean();
  return ((t - tm) * (y - ym)).sum() / (t - tm).square().sum();
}

}  // namespace

std::uint64_t experiment_seed(std::uint64_t master_seed, std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  SplitMix64 mix(master_seed ^ h);
  return mix.next();
}

ExperimentResult logreturn_vs_rho(const LogReturnVsRhoConfig& config) {
  const Eigen::ArrayXd lambdas = default_if_empty(config.lambdas, {0.0, 0.1, 0.5, 1.0});
  const auto n_rho = static_cast<Eigen::Index>(
      std::lround((config.rho_max - config.rho_min) / config.rho_step) + 1);
  if (n_rho < 1) throw std::invalid_argument("logreturn_vs_rho: empty rho grid");
  const auto n_steps = static_cast<Eigen::Index>(std::lround(config.t_horizon / config.dt));
  const std::uint64_t seed = experiment_seed(config.master_seed, "logreturn_vs_rho");

  Eigen::ArrayXd rho_grid(n_rho);
  for (Eigen::Index r = 0; r < n_rho; ++r)
    rho_grid[r] = config.rho_min + config.rho_step * static_cast<double>(r);

  const Eigen::Index n_cells = lambdas.size() * n_rho;
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(n_cells);
  Eigen::ArrayXd sum2 = Eigen::ArrayXd::Zero(n_cells);

  std::vector<ModelParams> per_lambda;
  for (Eigen::Index l = 0; l < lambdas.size(); ++l) {
    ModelParams params;
    params.mu = config.mu;
    params.sigma = config.sigma;
    params.k0 = config.k0;
    if (lambdas[l] > 0.0) {
      params.k_tilde = 1.0 / lambdas[l];
      params.capacity = PowerLawCapacity{1.0};
    } else {
      params.k_tilde = 1.0;
      params.capacity = NoCapacity{};
    }
    validate(params);
    per_lambda.push_back(params);
  }

  const SimOptions options{StepScheme::log_space};
  for (Eigen::Index p = 0; p < config.n_paths; ++p) {
    const BrownianPath path = generate_path(seed, p, config.dt, n_steps);
    for (Eigen::Index l = 0; l < lambdas.size(); ++l) {
      for (Eigen::Index r = 0; r < n_rho; ++r) {
        const Trajectory tr =
            simulate(per_lambda[l], ConstantPolicy{rho_grid[r]}, path, options);
        const double log_kt = std::log(tr.k_values[n_steps]);
        const Eigen::Index cell = l * n_rho + r;
        sum[cell] += log_kt;
        sum2[cell] += log_kt * log_kt;
      }
    }
  }

  ExperimentResult result;
  result.name = "logreturn_vs_rho";
  result.columns.emplace_back("rho", rho_grid);
  const double n = static_cast<double>(config.n_paths);
  for (Eigen::Index l = 0; l < lambdas.size(); ++l) {
    Eigen::ArrayXd mean(n_rho), se(n_rho);
    for (Eigen::Index r = 0; r < n_rho; ++r) {
      const Eigen::Index cell = l * n_rho + r;
      mean[r] = sum[cell] / n;
      se[r] = std::sqrt(std::max(0.0, (sum2[cell] - n * mean[r] * mean[r]) / (n - 1.0)) / n);
    }
    const std::string suffix = "[lambda=" + tag(lambdas[l]) + "]";
    result.columns.emplace_back("mean_log_k" + suffix, mean);
    result.columns.emplace_back("stderr_log_k" + suffix, se);
    Eigen::Index argmax = 0;
    mean.maxCoeff(&argmax);
    result.summary.emplace_back("argmax_rho" + suffix, rho_grid[argmax]);
  }
  if (config.sigma > 0.0)
    result.summary.emplace_back("thorp_rho", thorp_rho(config.mu, config.sigma));

  result.metadata = {{"mu", num(config.mu)},
                     {"sigma", num(config.sigma)},
                     {"k0", num(config.k0)},
                     {"t_horizon", num(config.t_horizon)},
                     {"lambdas", join(lambdas)},
                     {"rho_min", num(config.rho_min)},
                     {"rho_max", num(config.rho_max)},
                     {"rho_step", num(config.rho_step)},
                     {"n_paths", num(config.n_paths)},
                     {"dt", num(config.dt)},
                     {"master_seed", num(config.master_seed)},
                     {"derived_seed", num(seed)},
                     {"scheme", "log"}};
  return result;
}

ExperimentResult kelly_vs_constant(const KellyVsConstantConfig& config) {
  validate(config.params);
  const Eigen::ArrayXd rhos = default_if_empty(config.constant_rhos, {1.0, 0.8, 0.6, 0.4, 0.2});
  const auto n_steps = static_cast<Eigen::Index>(std::lround(config.t_horizon / config.dt));
  const bool log_capacity = std::holds_alternative<LogarithmicCapacity>(config.params.capacity);
  const std::string name = log_capacity ? "kelly_vs_constant_log" : "kelly_vs_constant";
  const std::uint64_t seed = experiment_seed(config.master_seed, name);

  std::vector<PairedCase> cases;
  cases.push_back({config.params, config.dynamic_policy, config.scheme});
  for (Eigen::Index r = 0; r < rhos.size(); ++r)
    cases.push_back({config.params, ConstantPolicy{rhos[r]}, config.scheme});
  const std::vector<PairedSeries> runs =
      run_paired(cases, config.n_paths, seed, config.dt, n_steps);

  ExperimentResult result;
  result.name = name;
  result.columns.emplace_back(
      "t", Eigen::ArrayXd::LinSpaced(n_steps + 1, 0.0, config.dt * static_cast<double>(n_steps)));
  const std::string dyn_tag = std::string("[") + policy_name(config.dynamic_policy) + "]";
  result.columns.emplace_back("mean_k" + dyn_tag, runs[0].mean_k);
  result.columns.emplace_back("stderr_k" + dyn_tag, runs[0].stderr_k);
  const MeanStderr dyn_log = mean_stderr(runs[0].terminal_log_k);
  result.summary.emplace_back("terminal_mean_log_k" + dyn_tag, dyn_log.mean);

  for (Eigen::Index r = 0; r < rhos.size(); ++r) {
    const PairedSeries& run = runs[static_cast<std::size_t>(r) + 1];
    const std::string suffix = "[rho=" + tag(rhos[r]) + "]";
    result.columns.emplace_back("mean_k" + suffix, run.mean_k);
    result.columns.emplace_back("stderr_k" + suffix, run.stderr_k);
    result.summary.emplace_back("terminal_mean_log_k" + suffix,
                                mean_stderr(run.terminal_log_k).mean);
    std::optional<double> equilibrium;
    if (log_capacity)
      equilibrium = equilibrium_numeric(config.params, rhos[r]);
    else
      equilibrium = equilibrium_linear(config.params, rhos[r]);
    result.summary.emplace_back(
        "equilibrium" + suffix,
        equilibrium ? *equilibrium : std::numeric_limits<double>::quiet_NaN());
    const MeanStderr diff = mean_stderr(runs[0].terminal_log_k - run.terminal_log_k);
    result.summary.emplace_back("paired_z" + suffix,
                                diff.stderr > 0.0 ? diff.mean / diff.stderr : 0.0);
  }

  const auto* log_cap = std::get_if<LogarithmicCapacity>(&config.params.capacity);
  const auto* pow_cap = std::get_if<PowerLawCapacity>(&config.params.capacity);
  result.metadata = {{"mu", num(config.params.mu)},
                     {"sigma", num(config.params.sigma)},
                     {"k0", num(config.params.k0)},
                     {"k_tilde", num(config.params.k_tilde)},
                     {"capacity", log_capacity ? "log" : "power"},
                     {"gamma", num(pow_cap ? pow_cap->gamma : 0.0)},
                     {"alpha", num(log_cap ? log_cap->alpha : 0.0)},
                     {"dynamic_policy", policy_name(config.dynamic_policy)},
                     {"constant_rhos", join(rhos)},
                     {"t_horizon", num(config.t_horizon)},
                     {"n_paths", num(config.n_paths)},
                     {"dt", num(config.dt)},
                     {"master_seed", num(config.master_seed)},
                     {"derived_seed", num(seed)},
                     {"scheme", scheme_name(config.scheme)}};
  return result;
}

KellyVsConstantConfig kelly_vs_constant_log_defaults() {
  KellyVsConstantConfig config;
  config.params.capacity = LogarithmicCapacity{1.0};
  config.dynamic_policy = StationaryLogPolicy{};
  return config;
}

ExperimentResult zeroth_vs_first_order(const ZerothVsFirstConfig& config) {
  ModelParams params;
  params.mu = config.mu;
  params.sigma = config.sigma;
  params.k0 = config.k0;
  params.k_tilde = config.k_tilde;
  params.capacity = PowerLawCapacity{1.0};
  validate(params);
  const auto n_steps = static_cast<Eigen::Index>(std::lround(config.t_horizon / config.dt));
  const std::uint64_t seed = experiment_seed(config.master_seed, "zeroth_vs_first_order");

  // log-space stepping: the zeroth-order policy starts near rho ~ mu/sigma^2,
  // where direct Euler steps can cross zero
  const std::vector<PairedCase> cases = {
      {params, MomentFirstOrderPolicy{0.0}, StepScheme::log_space},
      {params, MomentFirstOrderPolicy{config.delta_t}, StepScheme::log_space}};
  const std::vector<PairedSeries> runs =
      run_paired(cases, config.n_paths, seed, config.dt, n_steps);

  ExperimentResult result;
  result.name = "zeroth_vs_first_order";
  result.columns.emplace_back(
      "t", Eigen::ArrayXd::LinSpaced(n_steps + 1, 0.0, config.dt * static_cast<double>(n_steps)));
  result.columns.emplace_back("mean_k[order=0]", runs[0].mean_k);
  result.columns.emplace_back("stderr_k[order=0]", runs[0].stderr_k);
  result.columns.emplace_back("mean_k[order=1]", runs[1].mean_k);
  result.columns.emplace_back("stderr_k[order=1]", runs[1].stderr_k);

  const MeanStderr diff = mean_stderr(runs[1].terminal_k - runs[0].terminal_k);
  result.summary.emplace_back("terminal_mean_k[order=0]", mean_stderr(runs[0].terminal_k).mean);
  result.summary.emplace_back("terminal_mean_k[order=1]", mean_stderr(runs[1].terminal_k).mean);
  result.summary.emplace_back("paired_diff_mean", diff.mean);
  result.summary.emplace_back("paired_diff_stderr", diff.stderr);
  result.summary.emplace_back("paired_z", diff.stderr > 0.0 ? diff.mean / diff.stderr : 0.0);

  result.metadata = {{"mu", num(config.mu)},
                     {"sigma", num(config.sigma)},
                     {"k0", num(config.k0)},
                     {"k_tilde", num(config.k_tilde)},
                     {"delta_t", num(config.delta_t)},
                     {"t_horizon", num(config.t_horizon)},
                     {"n_paths", num(config.n_paths)},
                     {"dt", num(config.dt)},
                     {"master_seed", num(config.master_seed)},
                     {"derived_seed", num(seed)},
                     {"scheme", "log"}};
  return result;
}

ExperimentResult linear_regime(const LinearRegimeConfig& config) {
  if (!(config.t_horizon >= 5.0))
    throw std::invalid_argument("linear_regime: t_horizon must be >= 5 (asymptotic window)");
  ModelParams linear;
  linear.mu = config.mu;
  linear.sigma = config.sigma;
  linear.k0 = config.k0;
  linear.k_tilde = config.k_tilde;
  linear.capacity = PowerLawCapacity{1.0};
  ModelParams logarithmic = linear;
  logarithmic.capacity = LogarithmicCapacity{config.alpha};
  validate(linear);
  const auto n_steps = static_cast<Eigen::Index>(std::lround(config.t_horizon / config.dt));
  const std::uint64_t seed = experiment_seed(config.master_seed, "linear_regime");

  const std::vector<PairedCase> cases = {
      {linear, StationaryLinearPolicy{}, StepScheme::automatic},
      {logarithmic, StationaryLogPolicy{}, StepScheme::automatic}};
  const std::vector<PairedSeries> runs =
      run_paired(cases, config.n_paths, seed, config.dt, n_steps);

  const Eigen::ArrayXd t =
      Eigen::ArrayXd::LinSpaced(n_steps + 1, 0.0, config.dt * static_cast<double>(n_steps));
  const Eigen::Index fit_from = (n_steps + 1) / 2;  // final half of the horizon
  const Eigen::Index fit_len = n_steps + 1 - fit_from;
  const double slope_linear =
      ols_slope(t.segment(fit_from, fit_len), runs[0].mean_k.segment(fit_from, fit_len));
  const double slope_log =
      ols_slope(t.segment(fit_from, fit_len), runs[1].mean_k.segment(fit_from, fit_len));

  ExperimentResult result;
  result.name = "linear_regime";
  result.columns.emplace_back("t", t);
  result.columns.emplace_back("mean_k[linear]", runs[0].mean_k);
  result.columns.emplace_back("mean_k[log]", runs[1].mean_k);
  result.summary.emplace_back("fitted_slope_linear", slope_linear);
  result.summary.emplace_back("fitted_slope_log", slope_log);
  result.summary.emplace_back("theory_slope_linear",
                              asymptotic_slope(linear, CapacityKind::linear));
  result.summary.emplace_back("theory_slope_log",
                              asymptotic_slope(logarithmic, CapacityKind::logarithmic));
  result.summary.emplace_back("slope_ratio_log_over_linear", slope_log / slope_linear);

  result.metadata = {{"mu", num(config.mu)},
                     {"sigma", num(config.sigma)},
                     {"k0", num(config.k0)},
                     {"k_tilde", num(config.k_tilde)},
                     {"alpha", num(config.alpha)},
                     {"t_horizon", num(config.t_horizon)},
                     {"n_paths", num(config.n_paths)},
                     {"dt", num(config.dt)},
                     {"master_seed", num(config.master_seed)},
                     {"derived_seed", num(seed)},
                     {"scheme", "auto"},
                     {"fit_window", "final 50%"}};
  return result;
}

ExperimentResult return_functional_sweep(const ReturnFunctionalConfig& config) {
  if (!(config.k_min > 0.0) || !(config.k_max > config.k_min) || config.n_points < 2)
    throw std::invalid_argument("return_functional_sweep: bad k grid");
  const Eigen::ArrayXd gammas = default_if_empty(config.gammas, {1.0, 2.0, 3.0, 4.0, 5.0});
  const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(config.n_points, config.k_min, config.k_max);

  ExperimentResult result;
  result.name = "return_functional";
  result.columns.emplace_back("k", k);
  for (Eigen::Index g = 0; g < gammas.size(); ++g) {
    ModelParams params;
    params.mu = config.mu;
    params.k_tilde = config.k_tilde;
    params.capacity = PowerLawCapacity{gammas[g]};
    Eigen::ArrayXd column(k.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) column[i] = return_functional(params, k[i]);
    result.columns.emplace_back("k_mu_hat[gamma=" + tag(gammas[g]) + "]", column);
  }
  ModelParams log_params;
  log_params.mu = config.mu;
  log_params.k_tilde = config.k_tilde;
  log_params.capacity = LogarithmicCapacity{config.alpha};
  Eigen::ArrayXd log_column(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) log_column[i] = return_functional(log_params, k[i]);
  result.columns.emplace_back("k_mu_hat[log]", log_column);

  result.summary.emplace_back("zero_crossing_power", config.k_tilde);
  result.summary.emplace_back("zero_crossing_log",
                              config.k_tilde * std::exp(1.0 / config.alpha));

  result.metadata = {{"mu", num(config.mu)},      {"k_tilde", num(config.k_tilde)},
                     {"alpha", num(config.alpha)}, {"gammas", join(gammas)},
                     {"k_min", num(config.k_min)}, {"k_max", num(config.k_max)},
                     {"n_points", num(config.n_points)}, {"rho", "1"}};
  return result;
}

ExperimentResult rho_vs_k_sweep(const RhoVsKConfig& config) {
  if (!(config.k_min > 0.0) || !(config.k_max > config.k_min) || config.n_points < 2)
    throw std::invalid_argument("rho_vs_k_sweep: bad k grid");
  const Eigen::ArrayXd gammas = default_if_empty(config.gammas, {1.0, 2.0, 3.0, 4.0, 5.0});
  const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(config.n_points, config.k_min, config.k_max);

  ExperimentResult result;
  result.name = "rho_vs_k";
  result.columns.emplace_back("k", k);
  for (Eigen::Index g = 0; g < gammas.size(); ++g) {
    ModelParams params;
    params.mu = config.mu;
    params.sigma = config.sigma;
    params.k_tilde = config.k_tilde;
    params.capacity = PowerLawCapacity{gammas[g]};
    Eigen::ArrayXd column(k.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) column[i] = stationary_rho_power(params, k[i]);
    result.columns.emplace_back("rho[gamma=" + tag(gammas[g]) + "]", column);
  }
  ModelParams log_params;
  log_params.mu = config.mu;
  log_params.sigma = config.sigma;
  log_params.k_tilde = config.k_tilde;
  log_params.capacity = LogarithmicCapacity{config.alpha};
  Eigen::ArrayXd log_column(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i)
    log_column[i] = stationary_rho_log(log_params, k[i]);
  result.columns.emplace_back("rho[log]", log_column);

  result.summary.emplace_back("thorp_rho", thorp_rho(config.mu, config.sigma));

  result.metadata = {{"mu", num(config.mu)},       {"sigma", num(config.sigma)},
                     {"k_tilde", num(config.k_tilde)}, {"alpha", num(config.alpha)},
                     {"gammas", join(gammas)},     {"k_min", num(config.k_min)},
                     {"k_max", num(config.k_max)}, {"n_points", num(config.n_points)}};
  return result;
}

}  // namespace kelcap::experiments
