#include "kelcap/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kelcap/closed_form.hpp"
#include "kelcap/csv.hpp"
#include "kelcap/experiments.hpp"
#include "kelcap/leverage.hpp"
#include "kelcap/moments.hpp"
#include "kelcap/sde.hpp"
#include "kelcap/version.hpp"

namespace kelcap::cli {

namespace {

namespace exp = kelcap::experiments;

constexpr auto kTakeLast = CLI::MultiOptionPolicy::TakeLast;

std::string fmt(double x) { return csv::format_double(x); }

// ---------------------------------------------------------------- config file

// Pulls "--config FILE" (or --config=FILE) out of the raw arguments and turns
// the file's key=value lines into option tokens. The tokens are injected
// right after the subcommand, ahead of the user's own flags, so with TakeLast
// everywhere explicit flags win over the config file.
std::vector<std::string> extract_config_tokens(std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config requires a file path");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  std::vector<std::string> tokens;
  if (config_path.empty()) return tokens;
  std::ifstream file(config_path);
  if (!file) throw std::invalid_argument("cannot read config file '" + config_path + "'");
  std::string line;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const std::size_t eq = line.find('=', first);
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key=value: '" + line + "'");
    const std::string key = line.substr(first, eq - first);
    const std::string value = line.substr(eq + 1);
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

// ------------------------------------------------------------------ flag sets

struct ModelFlags {
  std::string capacity{"power"};
  double gamma{1.0};
  double alpha{1.0};
  std::vector<double> lambdas;
  double mu{1.0};
  double sigma{0.2};
  double k0{1.0};
  double k_tilde{10.0};
};

void add_model_flags(CLI::App* sub, ModelFlags& flags) {
  sub->add_option("--capacity", flags.capacity, "capacity family: none|power|log|series")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sub->add_option("--gamma", flags.gamma, "power-law exponent")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sub->add_option("--alpha", flags.alpha, "logarithmic capacity strength")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sub->add_option("--lambdas", flags.lambdas, "series coefficients lambda_1..lambda_n")
      ->delimiter(',')
      ->multi_option_policy(kTakeLast);
  sub->add_option("--mu", flags.mu, "drift rate")->capture_default_str()->multi_option_policy(
      kTakeLast);
  sub->add_option("--sigma", flags.sigma, "volatility")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sub->add_option("--k0", flags.k0, "initial capital")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sub->add_option("--k-tilde", flags.k_tilde, "carrying-capacity scale")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
}

ModelParams make_params(const ModelFlags& flags) {
  ModelParams params;
  params.mu = flags.mu;
  params.sigma = flags.sigma;
  params.k0 = flags.k0;
  params.k_tilde = flags.k_tilde;
  if (flags.capacity == "none") {
    params.capacity = NoCapacity{};
  } else if (flags.capacity == "power") {
    params.capacity = PowerLawCapacity{flags.gamma};
  } else if (flags.capacity == "log") {
    params.capacity = LogarithmicCapacity{flags.alpha};
  } else if (flags.capacity == "series") {
    Eigen::ArrayXd lambdas(static_cast<Eigen::Index>(flags.lambdas.size()));
    for (std::size_t i = 0; i < flags.lambdas.size(); ++i)
      lambdas[static_cast<Eigen::Index>(i)] = flags.lambdas[i];
    params.capacity = SeriesCapacity{flags.gamma, lambdas};
  } else {
    throw std::invalid_argument("unknown capacity '" + flags.capacity +
                                "' (expected none|power|log|series)");
  }
  validate(params);
  return params;
}

StepScheme parse_scheme(const std::string& name) {
  if (name == "auto") return StepScheme::automatic;
  if (name == "direct") return StepScheme::direct;
  if (name == "log") return StepScheme::log_space;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected auto|direct|log)");
}

LeveragePolicy parse_policy(const std::string& name, double rho, double policy_delta_t) {
  if (name == "constant") return ConstantPolicy{rho};
  if (name == "thorp") return ThorpPolicy{};
  if (name == "stationary-linear") return StationaryLinearPolicy{};
  if (name == "stationary-power") return StationaryPowerPolicy{};
  if (name == "stationary-log") return StationaryLogPolicy{};
  if (name == "moment-first-order") return MomentFirstOrderPolicy{policy_delta_t};
  throw std::invalid_argument("unknown policy '" + name + "'");
}

void write_result(const exp::ExperimentResult& result, const std::string& out_dir,
                  double wall_seconds, std::ostream& out) {
  csv::write_result_files(out_dir, result, wall_seconds);
  out << "wrote " << (std::filesystem::path(out_dir) / (result.name + ".csv")).string() << " and "
      << (std::filesystem::path(out_dir) / (result.name + ".meta")).string() << "\n";
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_{std::chrono::steady_clock::now()};
};

// ----------------------------------------------------------------- subcommands

struct SimulateFlags {
  ModelFlags model;
  std::string policy{"constant"};
  double rho{1.0};
  double policy_delta_t{0.01};
  double t_horizon{1.0};
  double dt{0.01};
  Eigen::Index n_paths{2000};
  std::uint64_t seed{42};
  std::string scheme{"auto"};
  int workers{0};
  std::string out_dir{"out"};
};

int run_simulate(const SimulateFlags& flags, std::ostream& out) {
  Stopwatch watch;
  const ModelParams params = make_params(flags.model);
  const LeveragePolicy policy = parse_policy(flags.policy, flags.rho, flags.policy_delta_t);
  const auto n_steps = static_cast<Eigen::Index>(std::lround(flags.t_horizon / flags.dt));
  if (n_steps < 1) throw std::invalid_argument("simulate: t-horizon shorter than dt");
  EnsembleOptions options;
  options.sim.scheme = parse_scheme(flags.scheme);
  options.n_workers = flags.workers;
  const EnsembleStats stats =
      ensemble(params, policy, flags.n_paths, flags.seed, flags.dt, n_steps, options);

  exp::ExperimentResult result;
  result.name = "simulate";
  result.columns = {{"t", stats.times},
                    {"mean_k", stats.mean_k},
                    {"stderr_k", stats.stderr_k},
                    {"mean_log_k", stats.mean_log_k},
                    {"stderr_log_k", stats.stderr_log_k}};
  result.metadata = {{"capacity", flags.model.capacity},
                     {"gamma", fmt(flags.model.gamma)},
                     {"alpha", fmt(flags.model.alpha)},
                     {"mu", fmt(flags.model.mu)},
                     {"sigma", fmt(flags.model.sigma)},
                     {"k0", fmt(flags.model.k0)},
                     {"k_tilde", fmt(flags.model.k_tilde)},
                     {"policy", flags.policy},
                     {"rho", fmt(flags.rho)},
                     {"policy_delta_t", fmt(flags.policy_delta_t)},
                     {"t_horizon", fmt(flags.t_horizon)},
                     {"dt", fmt(flags.dt)},
                     {"n_paths", std::to_string(flags.n_paths)},
                     {"master_seed", std::to_string(flags.seed)},
                     {"scheme", flags.scheme},
                     {"n_failed_paths", std::to_string(stats.failed_paths.size())}};
  result.summary = {{"terminal_mean_k", stats.mean_k[n_steps]},
                    {"terminal_mean_log_k", stats.mean_log_k[n_steps]}};
  write_result(result, flags.out_dir, watch.seconds(), out);
  return 0;
}

int run_equilibrium(const ModelFlags& model, double rho, std::ostream& out) {
  const ModelParams params = make_params(model);
  if (model.capacity == "power" && std::abs(model.gamma - 1.0) <= 1e-12) {
    const auto analytic = equilibrium_linear(params, rho);
    out << "equilibrium=" << (analytic ? fmt(*analytic) : "none") << "\n";
  } else if (model.capacity == "log") {
    out << "equilibrium_log_k=" << fmt(equilibrium_log(params)) << "\n";
  }
  const auto numeric = equilibrium_numeric(params, rho);
  out << "equilibrium_numeric=" << (numeric ? fmt(*numeric) : "none") << "\n";
  return 0;
}

int run_optimal_rho(const ModelFlags& model, double k, std::ostream& out) {
  const ModelParams params = make_params(model);
  out << "thorp_rho=" << fmt(thorp_rho(params.mu, params.sigma)) << "\n";
  if (model.capacity == "log") {
    const double lambert = stationary_rho_log(params, k);
    const double bisect = stationary_rho_log_root(params, k);
    out << "rho_lambert=" << fmt(lambert) << "\n";
    out << "rho_bisect=" << fmt(bisect) << "\n";
    out << "lambert_bisect_gap=" << fmt(std::abs(lambert - bisect)) << "\n";
    out << "critical_xi=" << fmt(critical_xi_log(params)) << "\n";
  } else if (model.capacity == "power") {
    out << "rho_stationary_power=" << fmt(stationary_rho_power(params, k)) << "\n";
    if (std::abs(model.gamma - 1.0) <= 1e-12) {
      out << "rho_stationary_linear=" << fmt(stationary_rho_linear(params, k)) << "\n";
      out << "stationarity_diagnostic=" << fmt(stationarity_diagnostic(params, k)) << "\n";
    }
  } else {
    throw std::invalid_argument("optimal-rho: capacity must be power or log");
  }
  return 0;
}

struct MomentsFlags {
  ModelFlags model;
  double delta_t{0.01};
  int order{1};
};

int run_moments(const MomentsFlags& flags, std::ostream& out) {
  const ModelParams params = make_params(flags.model);
  const double rho0 = optimize_rho_numeric(params, flags.delta_t, 0);
  out << "rho_numeric_order0=" << fmt(rho0) << "\n";
  if (flags.order >= 1) {
    bool unimodal = true;
    const double rho1 = optimize_rho_numeric(params, flags.delta_t, 1, &unimodal);
    out << "rho_numeric_order1=" << fmt(rho1) << "\n";
    if (!unimodal) out << "warning=non-unimodal objective, grid-scan argmax refined\n";
    out << "phi_at_order1_optimum=" << fmt(phi_growth(params, rho1, flags.delta_t, 1)) << "\n";
  }
  const SeriesCapacity series = as_series(params.capacity, params.k_tilde);
  if (series.lambdas.size() == 1 && std::abs(series.gamma - 1.0) <= 1e-12 &&
      series.lambdas[0] < 0.0) {
    out << "rho_closed_form_order0=" << fmt(rho_opt_first_order(params, 0.0)) << "\n";
    out << "rho_closed_form_order1=" << fmt(rho_opt_first_order(params, flags.delta_t)) << "\n";
  }
  return 0;
}

struct FigureFlags {
  std::string name;
  std::uint64_t seed{42};
  double dt{0.01};
  Eigen::Index n_paths{0};   // 0 = figure default
  double t_horizon{0.0};     // 0 = figure default
  std::string out_dir{"out"};
};

exp::ExperimentResult run_figure_by_name(const FigureFlags& flags) {
  const bool has_paths = flags.n_paths > 0;
  const bool has_horizon = flags.t_horizon > 0.0;
  if (flags.name == "logreturn-vs-rho") {
    exp::LogReturnVsRhoConfig config;
    config.master_seed = flags.seed;
    config.dt = flags.dt;
    if (has_paths) config.n_paths = flags.n_paths;
    if (has_horizon) config.t_horizon = flags.t_horizon;
    return exp::logreturn_vs_rho(config);
  }
  if (flags.name == "kelly-vs-constant" || flags.name == "kelly-vs-constant-log") {
    exp::KellyVsConstantConfig config;
    if (flags.name == "kelly-vs-constant-log") config = exp::kelly_vs_constant_log_defaults();
    config.master_seed = flags.seed;
    config.dt = flags.dt;
    if (has_paths) config.n_paths = flags.n_paths;
    if (has_horizon) config.t_horizon = flags.t_horizon;
    return exp::kelly_vs_constant(config);
  }
  if (flags.name == "zeroth-vs-first-order") {
    exp::ZerothVsFirstConfig config;
    config.master_seed = flags.seed;
    config.dt = flags.dt;
    if (has_paths) config.n_paths = flags.n_paths;
    if (has_horizon) config.t_horizon = flags.t_horizon;
    return exp::zeroth_vs_first_order(config);
  }
  if (flags.name == "linear-regime") {
    exp::LinearRegimeConfig config;
    config.master_seed = flags.seed;
    config.dt = flags.dt;
    if (has_paths) config.n_paths = flags.n_paths;
    if (has_horizon) config.t_horizon = flags.t_horizon;
    return exp::linear_regime(config);
  }
  if (flags.name == "return-functional") return exp::return_functional_sweep({});
  if (flags.name == "rho-vs-k") return exp::rho_vs_k_sweep({});
  throw std::invalid_argument(
      "unknown figure '" + flags.name +
      "' (expected logreturn-vs-rho|kelly-vs-constant|kelly-vs-constant-log|"
      "zeroth-vs-first-order|linear-regime|return-functional|rho-vs-k)");
}

int run_figure(const FigureFlags& flags, std::ostream& out) {
  Stopwatch watch;
  const exp::ExperimentResult result = run_figure_by_name(flags);
  write_result(result, flags.out_dir, watch.seconds(), out);
  return 0;
}

int run_all(std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  const char* names[] = {"logreturn-vs-rho", "kelly-vs-constant", "kelly-vs-constant-log",
                         "zeroth-vs-first-order", "linear-regime", "return-functional",
                         "rho-vs-k"};
  for (const char* name : names) {
    FigureFlags flags;
    flags.name = name;
    flags.seed = seed;
    flags.out_dir = out_dir;
    run_figure(flags, out);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"capacity-limited stochastic growth: simulation, exact solutions, and "
               "Kelly-optimal leverage"};
  app.name("kelcap");
  app.set_version_flag("--version", std::string(kVersion));
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);

  SimulateFlags simulate_flags;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo ensemble of the capital SDE");
  add_model_flags(sim, simulate_flags.model);
  sim->add_option("--policy", simulate_flags.policy,
                  "constant|thorp|stationary-linear|stationary-power|stationary-log|"
                  "moment-first-order")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--rho", simulate_flags.rho, "leverage for the constant policy")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--policy-delta-t", simulate_flags.policy_delta_t,
                  "horizon of the moment-first-order policy")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--t-horizon", simulate_flags.t_horizon, "simulated horizon")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--dt", simulate_flags.dt, "time step")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--n-paths", simulate_flags.n_paths, "ensemble size")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--seed", simulate_flags.seed, "master seed")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--scheme", simulate_flags.scheme, "stepping: auto|direct|log")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--workers", simulate_flags.workers, "worker threads (0 = auto)")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  sim->add_option("--out", simulate_flags.out_dir, "output directory")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);

  ModelFlags equilibrium_model;
  double equilibrium_rho = 1.0;
  auto* equi = app.add_subcommand("equilibrium", "stochastic equilibrium of <d log K> = 0");
  add_model_flags(equi, equilibrium_model);
  equi->add_option("--rho", equilibrium_rho, "constant leverage")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);

  ModelFlags optimal_model;
  double optimal_k = 1.0;
  auto* opt = app.add_subcommand("optimal-rho", "stationary optimal leverage at capital K");
  add_model_flags(opt, optimal_model);
  opt->add_option("--k", optimal_k, "current capital")
      ->required()
      ->multi_option_policy(kTakeLast);

  MomentsFlags moments_flags;
  auto* mom = app.add_subcommand("moments", "moment-expansion optimum over a finite horizon");
  add_model_flags(mom, moments_flags.model);
  mom->add_option("--delta-t", moments_flags.delta_t, "time horizon of the expansion")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  mom->add_option("--order", moments_flags.order, "expansion order (0 or 1)")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);

  FigureFlags figure_flags;
  auto* fig = app.add_subcommand("figure", "reproduce one experiment as CSV");
  fig->add_option("name", figure_flags.name, "experiment name")->required();
  fig->add_option("--seed", figure_flags.seed, "master seed")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  fig->add_option("--dt", figure_flags.dt, "time step")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  fig->add_option("--n-paths", figure_flags.n_paths, "ensemble size (0 = figure default)")
      ->multi_option_policy(kTakeLast);
  fig->add_option("--t-horizon", figure_flags.t_horizon, "horizon (0 = figure default)")
      ->multi_option_policy(kTakeLast);
  fig->add_option("--out", figure_flags.out_dir, "output directory")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);

  std::uint64_t all_seed = 42;
  std::string all_out = "out";
  auto* all = app.add_subcommand("all", "run the full experiment suite");
  all->add_option("--seed", all_seed, "master seed")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);
  all->add_option("--out", all_out, "output directory")
      ->capture_default_str()
      ->multi_option_policy(kTakeLast);

  std::vector<std::string> merged;
  try {
    std::vector<std::string> user_args = args;
    const std::vector<std::string> config_tokens = extract_config_tokens(user_args);
    merged.push_back("kelcap");
    if (!user_args.empty()) {
      merged.push_back(user_args.front());  // subcommand
      merged.insert(merged.end(), config_tokens.begin(), config_tokens.end());
      merged.insert(merged.end(), user_args.begin() + 1, user_args.end());
    }
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }

  std::vector<const char*> argv;
  argv.reserve(merged.size());
  for (const std::string& arg : merged) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(sim)) return run_simulate(simulate_flags, out);
    if (app.got_subcommand(equi)) return run_equilibrium(equilibrium_model, equilibrium_rho, out);
    if (app.got_subcommand(opt)) return run_optimal_rho(optimal_model, optimal_k, out);
    if (app.got_subcommand(mom)) return run_moments(moments_flags, out);
    if (app.got_subcommand(fig)) return run_figure(figure_flags, out);
    if (app.got_subcommand(all)) return run_all(all_seed, all_out, out);
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::domain_error& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 1;
}

}  // namespace kelcap::cli
