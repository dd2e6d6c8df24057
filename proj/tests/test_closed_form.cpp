#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kelcap/closed_form.hpp"
#include "kelcap/sde.hpp"
#include "test_util.hpp"

using namespace kelcap;

namespace {

ModelParams linear_params(double mu, double sigma, double k0, double k_tilde) {
  ModelParams params;
  params.mu = mu;
  params.sigma = sigma;
  params.k0 = k0;
  params.k_tilde = k_tilde;
  params.capacity = PowerLawCapacity{1.0};
  return params;
}

ModelParams log_params(double mu, double sigma, double k0, double k_tilde, double alpha) {
  ModelParams params;
  params.mu = mu;
  params.sigma = sigma;
  params.k0 = k0;
  params.k_tilde = k_tilde;
  params.capacity = LogarithmicCapacity{alpha};
  return params;
}

// deterministic logistic solution, the sigma = 0 limit of the gamma = 1 model
double logistic_exact(double k0, double mu, double k_star, double t) {
  return k_star * k0 * std::exp(mu * t) / (k_star + k0 * (std::exp(mu * t) - 1.0));
}

// RK4 oracle for the sigma = 0 power-law ODE dK/dt = mu K (1 - (K/k_tilde)^gamma)
double power_ode_rk4(double k0, double mu, double k_tilde, double gamma, double t_end,
                     double dt) {
  auto f = [&](double k) { return mu * k * (1.0 - std::pow(k / k_tilde, gamma)); };
  double k = k0;
  const auto n = static_cast<long>(std::lround(t_end / dt));
  for (long i = 0; i < n; ++i) {
    const double k1 = f(k);
    const double k2 = f(k + 0.5 * dt * k1);
    const double k3 = f(k + 0.5 * dt * k2);
    const double k4 = f(k + dt * k3);
    k += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return k;
}

}  // namespace

TEST_CASE("exact_power_path specializes to exact_linear_path at gamma = 1") {
  const auto params = linear_params(1.0, 0.2, 1.0, 10.0);
  const auto path = generate_path(21, 0, 0.01, 300);
  for (const double rho : {0.5, 1.0, 2.0}) {
    const auto general = exact_power_path(params, rho, path);
    const auto special = exact_linear_path(params, rho, path);
    const double max_rel =
        ((general.k_values - special.k_values).abs() / special.k_values).maxCoeff();
    CHECK(max_rel <= 1e-12);
  }
}

TEST_CASE("exact paths honor the initial condition") {
  const auto path = generate_path(4, 2, 0.01, 50);
  const auto params = linear_params(1.0, 0.2, 0.7, 10.0);
  CHECK(exact_power_path(params, 1.0, path).k_values[0] ==
        doctest::Approx(0.7).epsilon(1e-14));
  CHECK(exact_linear_path(params, 1.0, path).k_values[0] ==
        doctest::Approx(0.7).epsilon(1e-14));
  const auto lp = log_params(1.0, 0.2, 0.7, 10.0, 1.0);
  CHECK(exact_log_path(lp, path).k_values[0] == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("exact_power_path sigma = 0 reduces to the logistic solution") {
  const auto params = linear_params(1.0, 0.0, 0.5, 1.0);
  const auto path = test::zero_path(1e-3, 10000);
  const auto tr = exact_power_path(params, 1.0, path);
  for (const Eigen::Index i : {100, 1000, 5000, 10000}) {
    const double t = path.time(i);
    CHECK(std::abs(tr.k_values[i] - logistic_exact(0.5, 1.0, 1.0, t)) <= 1e-5);
  }
  CHECK(tr.k_values[10000] == doctest::Approx(1.0).epsilon(1e-4));  // K -> capacity
}

TEST_CASE("exact_power_path sigma = 0 agrees with an RK4 ODE oracle for gamma = 3") {
  ModelParams params;
  params.mu = 1.0;
  params.sigma = 0.0;
  params.k0 = 0.3;
  params.k_tilde = 2.0;
  params.capacity = PowerLawCapacity{3.0};
  const auto path = test::zero_path(1e-3, 4000);
  const auto tr = exact_power_path(params, 1.0, path);
  const double oracle = power_ode_rk4(0.3, 1.0, 2.0, 3.0, 4.0, 1e-3);
  CHECK(std::abs(tr.k_values[4000] - oracle) <= 1e-4);
}

TEST_CASE("exact_linear_path: capacity -> infinity recovers GBM") {
  const auto params = linear_params(1.0, 0.3, 1.0, 1e12);
  const auto path = generate_path(8, 1, 0.01, 100);
  const auto tr = exact_linear_path(params, 1.0, path);
  const Eigen::ArrayXd gbm = test::gbm_exact(1.0, 1.0, 0.3, 1.0, path);
  CHECK(((tr.k_values - gbm).abs() / gbm).maxCoeff() <= 1e-9);
}

TEST_CASE("exact vs Euler deviation shrinks as dt -> 0") {
  const auto params = linear_params(1.0, 0.2, 1.0, 10.0);
  double prev = -1.0;
  for (const double dt : {0.02, 0.01, 0.005}) {
    const auto n_steps = static_cast<Eigen::Index>(std::lround(1.0 / dt));
    double acc = 0.0;
    for (int p = 0; p < 20; ++p) {
      const auto path = generate_path(31, p, dt, n_steps);
      const auto exact = exact_linear_path(params, 1.0, path);
      const auto euler = simulate(params, ConstantPolicy{1.0}, path);
      acc += ((exact.k_values - euler.k_values).abs() / exact.k_values).maxCoeff();
    }
    if (prev > 0.0) CHECK(acc < prev);
    prev = acc;
  }
}

TEST_CASE("pathwise agreement scales like sqrt(dt) with a bounded constant") {
  const auto params = linear_params(1.0, 0.2, 1.0, 10.0);
  double prev_median = -1.0;
  for (const double dt : {0.02, 0.01, 0.005}) {
    const auto n_steps = static_cast<Eigen::Index>(std::lround(1.0 / dt));
    std::vector<double> errs;
    for (int p = 0; p < 50; ++p) {
      const auto path = generate_path(33, p, dt, n_steps);
      const auto exact = exact_linear_path(params, 1.0, path);
      const auto euler = simulate(params, ConstantPolicy{1.0}, path);
      errs.push_back(std::abs(euler.k_values[n_steps] - exact.k_values[n_steps]) /
                     exact.k_values[n_steps]);
    }
    std::nth_element(errs.begin(), errs.begin() + 25, errs.end());
    const double median = errs[25];
    CHECK(median / std::sqrt(dt) < 0.05);  // e <= C sqrt(dt), C bounded
    if (prev_median > 0.0) CHECK(median < prev_median);
    prev_median = median;
  }
}

TEST_CASE("exact_log_path: deterministic Gompertz fixed point k_tilde e") {
  const auto params = log_params(1.0, 0.0, 1.0, 10.0, 1.0);
  const auto path = test::zero_path(0.01, 3000);
  const auto tr = exact_log_path(params, path);
  CHECK(tr.k_values[3000] ==
        doctest::Approx(10.0 * std::exp(1.0)).epsilon(1e-8));
}

TEST_CASE("exact_log_path keeps the Ito correction on a zero-noise path") {
  const auto params = log_params(1.0, 0.3, 2.0, 10.0, 1.0);
  const auto path = test::zero_path(0.01, 200);
  const auto tr = exact_log_path(params, path);
  const double am = 1.0;
  const double c = 1.0 * (1.0 + std::log(10.0)) - 0.5 * 0.09;
  for (const Eigen::Index i : {0, 50, 200}) {
    const double t = path.time(i);
    const double expected =
        std::exp(std::exp(-am * t) * (std::log(2.0) + c * (std::exp(am * t) - 1.0) / am));
    CHECK(tr.k_values[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("exact_log_path agrees with the generic linear-SDE solver") {
  const auto params = log_params(0.8, 0.25, 1.5, 12.0, 1.3);
  const auto path = generate_path(55, 0, 0.01, 400);
  const auto direct = exact_log_path(params, path);
  LinearSdeCoeffs coeffs;
  coeffs.a = -1.3 * 0.8;
  coeffs.b = 0.0;
  coeffs.c = 0.8 * (1.0 + 1.3 * std::log(12.0)) - 0.5 * 0.25 * 0.25;
  coeffs.d = 0.25;
  const Eigen::ArrayXd y = linear_sde_path(coeffs, std::log(1.5), path);
  // the generic solver quadratures int Phi^{-1} ds, the specialization uses
  // the analytic antiderivative; they agree to the trapezoid error O(dt^2)
  CHECK(((direct.k_values - y.exp()).abs() / direct.k_values).maxCoeff() <= 1e-4);
}

TEST_CASE("linear_sde_path rejects simultaneous multiplicative and additive noise") {
  const auto path = test::zero_path(0.01, 10);
  CHECK_THROWS_AS(linear_sde_path({1.0, 1.0, 1.0, 1.0}, 1.0, path), std::invalid_argument);
}

TEST_CASE("log-space Euler error vs exact_log_path scales like dt") {
  const auto params = log_params(1.0, 0.2, 1.0, 10.0, 1.0);
  double prev_median = -1.0;
  for (const double dt : {0.02, 0.01, 0.005}) {
    const auto n_steps = static_cast<Eigen::Index>(std::lround(1.0 / dt));
    std::vector<double> errs;
    for (int p = 0; p < 50; ++p) {
      const auto path = generate_path(37, p, dt, n_steps);
      const auto exact = exact_log_path(params, path);
      const auto euler = simulate(params, ConstantPolicy{1.0}, path);
      errs.push_back(
          std::abs(std::log(euler.k_values[n_steps]) - std::log(exact.k_values[n_steps])));
    }
    std::nth_element(errs.begin(), errs.begin() + 25, errs.end());
    const double median = errs[25];
    CHECK(median / dt < 1.0);  // |log K error| <= C dt
    if (prev_median > 0.0) CHECK(median < prev_median);
    prev_median = median;
  }
}

TEST_CASE("expected_log_k_log anchor values and asymptote") {
  const auto params = log_params(0.1, 0.1, 1.0, 10.0, 1.0);
  CHECK(expected_log_k_log(params, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(expected_log_k_log(params, 1e4) ==
        doctest::Approx(std::log(10.0) + 0.95).epsilon(1e-12));
  // against the displayed form at a finite time
  const double t = 7.0;
  const double am = 0.1;
  const double level = (1.0 + std::log(10.0)) - 0.01 / (2.0 * 0.1);
  const double displayed = std::exp(-am * t) * (0.0 + level * (std::exp(am * t) - 1.0));
  CHECK(expected_log_k_log(params, t) == doctest::Approx(displayed).epsilon(1e-13));
}

TEST_CASE("MC mean of log K follows expected_log_k_log (logarithmic capacity)") {
  const auto params = log_params(0.1, 0.1, 1.0, 10.0, 1.0);
  const auto stats = ensemble(params, ConstantPolicy{1.0}, 800, 13, 0.01, 1000);
  for (const Eigen::Index i : {250, 500, 750, 1000}) {
    const double t = stats.times[i];
    CHECK(std::abs(stats.mean_log_k[i] - expected_log_k_log(params, t)) <=
          3.0 * stats.stderr_log_k[i]);
  }
}

TEST_CASE("equilibrium_linear") {
  const auto params = linear_params(0.1, 0.1, 1.0, 10.0);
  const auto k = equilibrium_linear(params, 1.0);
  REQUIRE(k.has_value());
  CHECK(*k == doctest::Approx(9.5).epsilon(1e-14));

  // sigma -> 0: the deterministic capacity
  CHECK(*equilibrium_linear(linear_params(0.1, 0.0, 1.0, 10.0), 1.0) ==
        doctest::Approx(10.0).epsilon(1e-14));

  // boundary rho = 2 mu / sigma^2: equilibrium collapses to zero
  const double rho_boundary = 2.0 * 0.1 / 0.01;
  CHECK_FALSE(equilibrium_linear(params, rho_boundary).has_value());
  const auto near = equilibrium_linear(params, rho_boundary * (1.0 - 1e-9));
  REQUIRE(near.has_value());
  CHECK(*near <= 1e-7);
  CHECK_FALSE(equilibrium_linear(params, rho_boundary * 2.0).has_value());
}

TEST_CASE("equilibrium_log") {
  CHECK(equilibrium_log(log_params(0.1, 0.1, 1.0, 10.0, 1.0)) ==
        doctest::Approx(std::log(10.0) + 0.95).epsilon(1e-14));
  // sigma^2 = 2 mu: the noise shift cancels exactly
  CHECK(equilibrium_log(log_params(0.1, std::sqrt(0.2), 1.0, 10.0, 1.0)) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-12));
  // alpha -> infinity: capacity term dominates
  CHECK(equilibrium_log(log_params(0.1, 0.1, 1.0, 10.0, 1e9)) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-8));
}

TEST_CASE("equilibrium_numeric reproduces the closed forms") {
  const auto lin = linear_params(0.1, 0.1, 1.0, 10.0);
  for (const double rho : {0.5, 1.0, 1.5}) {
    const auto numeric = equilibrium_numeric(lin, rho);
    const auto analytic = equilibrium_linear(lin, rho);
    REQUIRE(numeric.has_value());
    REQUIRE(analytic.has_value());
    CHECK(*numeric == doctest::Approx(*analytic).epsilon(1e-9));
  }

  const auto lg = log_params(0.1, 0.1, 1.0, 10.0, 1.0);
  const auto numeric = equilibrium_numeric(lg, 1.0);
  REQUIRE(numeric.has_value());
  CHECK(*numeric == doctest::Approx(std::exp(equilibrium_log(lg))).epsilon(1e-8));
  // constant rho != 1: root of rho mu (1 - alpha log(rho K / k_tilde)) = rho^2 sigma^2 / 2
  const double rho = 0.4;
  const auto shifted = equilibrium_numeric(lg, rho);
  const double by_hand =
      (10.0 / rho) * std::exp(1.0 - rho * 0.01 / (2.0 * 0.1));
  REQUIRE(shifted.has_value());
  CHECK(*shifted == doctest::Approx(by_hand).epsilon(1e-8));

  // GBM has no finite equilibrium
  ModelParams gbm;
  gbm.mu = 1.0;
  gbm.sigma = 0.5;
  CHECK_FALSE(equilibrium_numeric(gbm, 1.0).has_value());
  // negative growth everywhere
  CHECK_FALSE(equilibrium_numeric(lin, 25.0).has_value());
}

TEST_CASE("mean_k_second_order limits") {
  // capacity -> infinity: the GBM mean
  const auto wide = linear_params(1.0, 0.2, 1.0, 1e12);
  const auto gbm_mean = mean_k_second_order(wide, 1.0, 0.3, 2.0);
  CHECK(gbm_mean.value == doctest::Approx(2.0 * std::exp(0.3)).epsilon(1e-9));
  CHECK(gbm_mean.within_validity);

  // delta_t = 0 returns the current capital
  const auto params = linear_params(1.0, 0.2, 1.0, 100.0);
  CHECK(mean_k_second_order(params, 1.0, 0.0, 3.0).value ==
        doctest::Approx(3.0).epsilon(1e-14));

  // validity indicator
  CHECK(mean_k_second_order(params, 1.0, 0.01, 1.0).within_validity);
  CHECK_FALSE(mean_k_second_order(params, 1.0, 0.01, 50.0).within_validity);
}

TEST_CASE("mean_k_second_order against a small Monte Carlo oracle") {
  const auto params = linear_params(1.0, 0.2, 1.0, 100.0);
  const double delta_t = 0.01;
  const auto stats = ensemble(params, ConstantPolicy{1.0}, 20000, 77, 1e-3, 10);
  const auto predicted = mean_k_second_order(params, 1.0, delta_t, 1.0);
  CHECK(std::abs(predicted.value - stats.mean_k[10]) <= 3.0 * stats.stderr_k[10]);
}
