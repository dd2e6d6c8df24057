#include "kelcap/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "kelcap/detail/visit.hpp"

namespace kelcap {

SeriesCapacity as_series(const CapacitySpec& capacity, double k_tilde) {
  return std::visit(
      detail::overloaded{
          [](const NoCapacity&) {
            return SeriesCapacity{1.0, Eigen::ArrayXd()};
          },
          [k_tilde](const PowerLawCapacity& p) {
            if (!(p.gamma > 0.0)) throw std::invalid_argument("as_series: gamma must be > 0");
            Eigen::ArrayXd lambdas(1);
            lambdas[0] = -std::pow(1.0 / k_tilde, p.gamma);
            return SeriesCapacity{p.gamma, lambdas};
          },
          [](const LogarithmicCapacity&) -> SeriesCapacity {
            throw std::invalid_argument("as_series: logarithmic capacity has no power-series form");
          },
          [](const SeriesCapacity& s) { return s; }},
      capacity);
}

MomentTowerState dirac_tower(const ModelParams& params, double rho, Eigen::Index m_levels) {
  if (m_levels < 0) throw std::invalid_argument("dirac_tower: m_levels must be >= 0");
  const SeriesCapacity series = as_series(params.capacity, params.k_tilde);
  MomentTowerState state;
  state.gamma = series.gamma;
  state.lambdas = series.lambdas;
  state.rho = rho;
  state.e_values.resize(m_levels + 1);
  for (Eigen::Index m = 0; m <= m_levels; ++m)
    state.e_values[m] = std::pow(params.k0, series.gamma * static_cast<double>(m));
  return state;
}

Eigen::ArrayXd tower_rhs(const MomentTowerState& state, const ModelParams& params) {
  const Eigen::Index big_m = state.truncation();
  const Eigen::Index n = state.lambdas.size();
  if (big_m < n + 1)
    throw std::invalid_argument("tower_rhs: insufficient truncation for the series length");
  const Eigen::Index m_max = big_m - n;
  const double s2r2 = 0.5 * params.sigma * params.sigma * state.rho * state.rho;
  Eigen::ArrayXd out(m_max);
  for (Eigen::Index m = 1; m <= m_max; ++m) {
    double drift = state.e_values[m];  // k = 0 term, lambda_0 = 1
    for (Eigen::Index k = 1; k <= n; ++k)
      drift += state.lambdas[k - 1] *
               std::pow(state.rho, static_cast<double>(k) * state.gamma) * state.e_values[m + k];
    const double gm = state.gamma * static_cast<double>(m);
    out[m - 1] = params.mu * state.rho * gm * drift + gm * (gm - 1.0) * s2r2 * state.e_values[m];
  }
  return out;
}

MomentTowerState integrate_tower(MomentTowerState state, const ModelParams& params,
                                 double t_end, double dt) {
  if (t_end < 0.0) throw std::invalid_argument("integrate_tower: t_end must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_tower: dt must be > 0");
  const Eigen::Index n = state.lambdas.size();
  const Eigen::Index m_max = state.truncation() - n;
  if (m_max < 1)
    throw std::invalid_argument("integrate_tower: insufficient truncation for the series length");

  auto deriv = [&](const Eigen::ArrayXd& e) {
    MomentTowerState probe = state;
    probe.e_values = e;
    return tower_rhs(probe, params);
  };
  auto advanced = [&](const Eigen::ArrayXd& e, const Eigen::ArrayXd& rate, double h) {
    Eigen::ArrayXd out = e;
    out.segment(1, m_max) += h * rate;  // levels above m_max stay frozen
    return out;
  };

  double t = 0.0;
  while (t < t_end - 1e-15) {
    const double h = std::min(dt, t_end - t);
    const Eigen::ArrayXd& e = state.e_values;
    const Eigen::ArrayXd k1 = deriv(e);
    const Eigen::ArrayXd k2 = deriv(advanced(e, k1, 0.5 * h));
    const Eigen::ArrayXd k3 = deriv(advanced(e, k2, 0.5 * h));
    const Eigen::ArrayXd k4 = deriv(advanced(e, k3, h));
    state.e_values = advanced(e, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, h);
    t += h;
  }
  return state;
}

double phi_growth(const ModelParams& params, double rho, double delta_t, int order) {
  if (order != 0 && order != 1)
    throw std::invalid_argument("phi_growth: order must be 0 or 1");
  validate(params);
  const SeriesCapacity series = as_series(params.capacity, params.k_tilde);
  const Eigen::Index n = series.lambdas.size();
  const double s2 = params.sigma * params.sigma;

  double phi0 = params.mu * rho - 0.5 * s2 * rho * rho;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double kg = static_cast<double>(k) * series.gamma;
    phi0 += params.mu * rho * series.lambdas[k - 1] * std::pow(rho, kg) * std::pow(params.k0, kg);
  }
  if (order == 0 || n == 0) return phi0;

  // Phi'(0) = mu rho sum_k lambda_k rho^{k gamma} e_k'(t0), Dirac initial moments
  ModelParams series_params = params;
  series_params.capacity = series;
  MomentTowerState tower = dirac_tower(series_params, rho, 2 * n);
  const Eigen::ArrayXd rate = tower_rhs(tower, params);
  double dphi = 0.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double kg = static_cast<double>(k) * series.gamma;
    dphi += params.mu * rho * series.lambdas[k - 1] * std::pow(rho, kg) * rate[k - 1];
  }
  return phi0 + dphi * delta_t;
}

double phi_growth_drho(const ModelParams& params, double rho, double delta_t, int order) {
  if (order != 0 && order != 1)
    throw std::invalid_argument("phi_growth_drho: order must be 0 or 1");
  validate(params);
  const SeriesCapacity series = as_series(params.capacity, params.k_tilde);
  const Eigen::Index n = series.lambdas.size();
  const double s2 = params.sigma * params.sigma;
  const double mu = params.mu;
  const double k0 = params.k0;
  const double gamma = series.gamma;

  double dphi0 = mu - s2 * rho;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double kg = static_cast<double>(k) * gamma;
    dphi0 += mu * series.lambdas[k - 1] * std::pow(k0, kg) * (1.0 + kg) * std::pow(rho, kg);
  }
  if (order == 0 || n == 0) return dphi0;

  // Psi(rho) = sum_{k>=1} sum_{j>=0} l_k l_j mu^2 gamma k K0^{(k+j)g} rho^{2+(k+j)g}
  //          + sum_{k>=1} l_k mu gamma k (gamma k - 1) sigma^2/2 K0^{kg} rho^{3+kg}
  double dpsi = 0.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double lk = series.lambdas[k - 1];
    const double gk = gamma * static_cast<double>(k);
    for (Eigen::Index j = 0; j <= n; ++j) {
      const double lj = (j == 0) ? 1.0 : series.lambdas[j - 1];
      const double gkj = gamma * static_cast<double>(k + j);
      dpsi += lk * lj * mu * mu * gk * std::pow(k0, gkj) * (2.0 + gkj) * std::pow(rho, 1.0 + gkj);
    }
    dpsi += lk * mu * gk * (gk - 1.0) * 0.5 * s2 * std::pow(k0, gk) * (3.0 + gk) *
            std::pow(rho, 2.0 + gk);
  }
  return dphi0 + dpsi * delta_t;
}

double rho_opt_first_order(const ModelParams& params, double delta_t) {
  if (delta_t < 0.0) throw std::invalid_argument("rho_opt_first_order: delta_t must be >= 0");
  validate(params);
  const SeriesCapacity series = as_series(params.capacity, params.k_tilde);
  if (series.lambdas.size() != 1 || std::abs(series.gamma - 1.0) > 1e-12 ||
      !(series.lambdas[0] < 0.0))
    throw std::invalid_argument("rho_opt_first_order: needs the gamma = 1, n = 1 family");
  const double kt = -1.0 / series.lambdas[0];
  const double mu = params.mu;
  const double k0 = params.k0;
  const double s2 = params.sigma * params.sigma;
  const double zeroth = mu / (2.0 * mu * k0 / kt + s2);
  const double correction =
      (-3.0 * kt * kt * kt * mu * mu * mu * mu * s2 * k0 -
       2.0 * kt * kt * mu * mu * mu * mu * mu * k0 * k0) /
      std::pow(2.0 * mu * k0 + kt * s2, 4);
  return zeroth + correction * delta_t;
}

double optimize_rho_numeric(const ModelParams& params, double delta_t, int order,
                            bool* unimodal) {
  if (order != 0 && order != 1)
    throw std::invalid_argument("optimize_rho_numeric: order must be 0 or 1");
  validate(params);
  if (!(params.mu > 0.0))
    throw std::invalid_argument("optimize_rho_numeric: requires mu > 0");
  const double hi = 2.0 * params.mu / (params.sigma * params.sigma);
  auto f = [&](double r) { return phi_growth(params, r, delta_t, order); };

  // coarse scan for the global maximum and a unimodality check
  constexpr int kScan = 64;
  double best_x = 0.0, best_f = f(0.0);
  int best_i = 0;
  double prev = best_f;
  int n_maxima = 0;
  bool rising = false;
  for (int i = 1; i <= kScan; ++i) {
    const double x = hi * static_cast<double>(i) / kScan;
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
      best_i = i;
    }
    if (fx > prev) {
      rising = true;
    } else if (fx < prev && rising) {
      ++n_maxima;
      rising = false;
    }
    prev = fx;
  }
  if (rising) ++n_maxima;  // maximum at the right edge
  if (unimodal) *unimodal = n_maxima <= 1;

  double a = hi * static_cast<double>(std::max(0, best_i - 1)) / kScan;
  double b = hi * static_cast<double>(std::min(kScan, best_i + 1)) / kScan;

  // golden-section to width 1e-8
  constexpr double kGolden = 0.61803398874989484820;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-8) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
  }
  double root = 0.5 * (a + b);

  // Newton polish on the analytic derivative; the golden bracket alone cannot
  // resolve the flat top of a quadratic maximum below ~sqrt(eps)
  for (int iter = 0; iter < 20; ++iter) {
    const double g = phi_growth_drho(params, root, delta_t, order);
    const double h = 1e-6 * std::max(1.0, std::abs(root));
    const double g2 = (phi_growth_drho(params, root + h, delta_t, order) -
                       phi_growth_drho(params, root - h, delta_t, order)) /
                      (2.0 * h);
    if (!(g2 < 0.0)) break;
    const double step = g / g2;
    const double next = std::min(hi, std::max(best_x > 0.0 ? 0.0 : 1e-300, root - step));
    if (!(std::abs(next - root) > 1e-14 * std::max(1.0, std::abs(root)))) {
      root = next;
      break;
    }
    root = next;
  }
  return root;
}

}  // namespace kelcap
