#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kelcap/sde.hpp"
#include "test_util.hpp"

using namespace kelcap;

TEST_CASE("generate_path is a pure function of (seed, index)") {
  const auto a = generate_path(42, 7, 0.01, 250);
  const auto b = generate_path(42, 7, 0.01, 250);
  CHECK((a.increments == b.increments).all());

  const auto c = generate_path(42, 8, 0.01, 250);
  CHECK_FALSE((a.increments == c.increments).all());

  const auto d = generate_path(43, 7, 0.01, 250);
  CHECK_FALSE((a.increments == d.increments).all());
}

TEST_CASE("generate_path increments have the right scale") {
  const auto path = generate_path(5, 0, 0.01, 1000000);
  const double mean = path.increments.mean();
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(0.01 / 1e6));
  const double var = path.increments.square().mean();
  CHECK(var == doctest::Approx(0.01).epsilon(0.01));
}

TEST_CASE("generate_path validates input") {
  CHECK_THROWS_AS(generate_path(1, 0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(generate_path(1, 0, 0.01, 0), std::invalid_argument);
}

TEST_CASE("simulate: deterministic exponential growth at sigma = 0") {
  ModelParams params;
  params.mu = 1.0;
  params.sigma = 0.0;
  const auto path = test::zero_path(1e-3, 1000);
  const auto tr = simulate(params, ConstantPolicy{1.0}, path);
  CHECK(tr.k_values[0] == 1.0);
  CHECK(std::abs(tr.k_values[1000] - std::exp(1.0)) <= 2.0 * std::exp(1.0) * 1e-3);
  CHECK(tr.times.size() == tr.k_values.size());
  CHECK(tr.rho_values.size() == tr.k_values.size());
  CHECK((tr.rho_values == 1.0).all());
}

TEST_CASE("simulate: zero-drift fixed point at capacity") {
  ModelParams params;
  params.mu = 0.7;
  params.sigma = 0.0;
  params.k0 = 10.0;
  params.k_tilde = 10.0;
  params.capacity = PowerLawCapacity{1.0};
  const auto tr = simulate(params, ConstantPolicy{1.0}, test::zero_path(0.01, 200));
  CHECK((tr.k_values == 10.0).all());
}

TEST_CASE("simulate matches exact GBM pathwise within strong tolerance") {
  ModelParams params;
  params.mu = 1.0;
  params.sigma = 0.5;
  const double rho = 0.7;
  const auto path = generate_path(11, 3, 0.005, 200);
  const auto tr = simulate(params, ConstantPolicy{rho}, path);
  const Eigen::ArrayXd exact = test::gbm_exact(1.0, params.mu, params.sigma, rho, path);
  const double max_rel = ((tr.k_values - exact).abs() / exact).maxCoeff();
  CHECK(max_rel < 0.05);
}

TEST_CASE("strong convergence: GBM error decreases monotonically in dt") {
  ModelParams params;
  params.mu = 1.0;
  params.sigma = 0.5;
  double prev = -1.0;
  for (const double dt : {0.01, 0.005, 0.0025}) {
    const auto n_steps = static_cast<Eigen::Index>(std::lround(1.0 / dt));
    double acc = 0.0;
    for (int p = 0; p < 50; ++p) {
      const auto path = generate_path(17, p, dt, n_steps);
      const auto tr = simulate(params, ConstantPolicy{1.0}, path);
      const Eigen::ArrayXd exact = test::gbm_exact(1.0, params.mu, params.sigma, 1.0, path);
      acc += (tr.k_values - exact).abs().maxCoeff();
    }
    if (prev > 0.0) CHECK(acc < prev);
    prev = acc;
  }
}

TEST_CASE("simulate: positivity violation reports the step") {
  ModelParams params;
  params.mu = 0.0;
  params.sigma = 1.0;
  BrownianPath path = test::zero_path(0.04, 5);
  path.increments[2] = -0.5;  // 1 + rho dW = 1 - 2.5 < 0
  CHECK_THROWS_WITH_AS(simulate(params, ConstantPolicy{5.0}, path, {StepScheme::direct}),
                       "simulate: positivity violation at step 3", std::runtime_error);
  // log-space stepping survives the same increment
  const auto tr = simulate(params, ConstantPolicy{5.0}, path, {StepScheme::log_space});
  CHECK((tr.k_values > 0.0).all());
}

TEST_CASE("log-space scheme is the default for logarithmic capacity") {
  ModelParams params;
  params.mu = 0.1;
  params.sigma = 0.1;
  params.k_tilde = 10.0;
  params.capacity = LogarithmicCapacity{1.0};
  const auto path = generate_path(3, 0, 0.01, 500);
  const auto tr = simulate(params, ConstantPolicy{1.0}, path);
  CHECK((tr.k_values > 0.0).all());
  CHECK(tr.k_values[0] == 1.0);
}

TEST_CASE("ensemble: sigma -> 0 collapses the spread") {
  ModelParams params;
  params.mu = 0.5;
  params.sigma = 0.0;
  const auto stats = ensemble(params, ConstantPolicy{1.0}, 8, 99, 0.01, 50);
  // identical paths; the spread is zero up to summation roundoff
  CHECK((stats.stderr_k <= 1e-12).all());
  CHECK((stats.stderr_log_k <= 1e-12).all());
  CHECK(stats.n_paths == 8);
}

TEST_CASE("ensemble: identical output for any worker count") {
  ModelParams params;
  params.mu = 0.1;
  params.sigma = 0.1;
  params.k_tilde = 10.0;
  params.capacity = PowerLawCapacity{1.0};
  EnsembleOptions one;
  one.n_workers = 1;
  EnsembleOptions eight;
  eight.n_workers = 8;
  const auto a = ensemble(params, StationaryLinearPolicy{}, 300, 42, 0.01, 200, one);
  const auto b = ensemble(params, StationaryLinearPolicy{}, 300, 42, 0.01, 200, eight);
  CHECK((a.mean_k == b.mean_k).all());
  CHECK((a.stderr_k == b.stderr_k).all());
  CHECK((a.mean_log_k == b.mean_log_k).all());
  CHECK((a.stderr_log_k == b.stderr_log_k).all());
}

TEST_CASE("ensemble: GBM mean log slope matches rho mu - rho^2 sigma^2 / 2") {
  ModelParams params;
  params.mu = 1.0;
  params.sigma = 0.5;
  const double rho = 1.5;
  const auto n_steps = 500;
  const auto stats = ensemble(params, ConstantPolicy{rho}, 2000, 7, 0.002, n_steps);
  const double t_end = 0.002 * n_steps;
  const double slope = (stats.mean_log_k[n_steps] - stats.mean_log_k[0]) / t_end;
  const double expected = rho * params.mu - 0.5 * rho * rho * params.sigma * params.sigma;
  CHECK(std::abs(slope - expected) <= 3.0 * stats.stderr_log_k[n_steps] / t_end);
}

TEST_CASE("ensemble fails when more than 1% of paths error") {
  ModelParams params;
  params.mu = 0.0;
  params.sigma = 1.0;
  EnsembleOptions options;
  options.sim.scheme = StepScheme::direct;
  // rho sigma sqrt(dt) = 1: a large fraction of paths steps below zero
  CHECK_THROWS_AS(ensemble(params, ConstantPolicy{5.0}, 50, 1, 0.04, 50, options),
                  std::runtime_error);
}

TEST_CASE("ensemble input validation") {
  ModelParams params;
  CHECK_THROWS_AS(ensemble(params, ConstantPolicy{1.0}, 1, 1, 0.01, 10), std::invalid_argument);
  CHECK_THROWS_AS(ensemble(params, ConstantPolicy{1.0}, 10, 1, -0.01, 10), std::invalid_argument);
}
