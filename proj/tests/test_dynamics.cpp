#include <doctest.h>

#include <cmath>

#include "tsl/dynamics.hpp"
#include "tsl/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tsl;
using namespace tsl::dynamics;

namespace {

QuadraticPotential one_d(double a) {
  Matrix m(1, 1);
  m << a;
  return QuadraticPotential(m, Vector::Zero(1));
}

QuadraticPotential random_spd(int d, Rng& rng, double lam_lo, double lam_hi) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix q = qr.householderQ();
  Vector evals(d);
  for (int i = 0; i < d; ++i) {
    evals[i] = lam_lo + (lam_hi - lam_lo) * rng.uniform();
  }
  Matrix a = q * evals.asDiagonal() * q.transpose();
  Vector b(d);
  for (int i = 0; i < d; ++i) b[i] = rng.normal();
  return QuadraticPotential(0.5 * (a + a.transpose()), b);
}

}  // namespace

TEST_CASE("gradient flow: 1-d exponential decay to 1e-8") {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  const auto traj = simulate_gradient_flow(one_d(1.0), Vector::Ones(1), cfg);
  CHECK(traj.weights.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(traj.grad_sq.has_value());
  REQUIRE(traj.grad_sq_time_integral.has_value());
}

TEST_CASE("gradient flow: fixed point stays put") {
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 2.0;
  const auto traj = simulate_gradient_flow(one_d(1.0), Vector::Zero(1), cfg);
  for (const auto& w : traj.weights) CHECK(w[0] == 0.0);
}

TEST_CASE("gradient flow: 2-d per-mode decay") {
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 2.0;
  const QuadraticPotential pot(a, Vector::Zero(2));
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  const auto traj = simulate_gradient_flow(pot, Vector::Ones(2), cfg);
  CHECK(traj.weights.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  CHECK(traj.weights.back()[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("gradient flow: loss never increases") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform() * 6);
    const auto pot = random_spd(d, rng, 0.3, 4.0);
    Vector theta0(d);
    for (int i = 0; i < d; ++i) theta0[i] = 2.0 * rng.normal();
    IntegratorConfig cfg;
    cfg.dt = 1e-3 / pot.lambda_max();
    cfg.horizon = 2.0;
    const auto traj = simulate_gradient_flow(pot, theta0, cfg);
    for (std::size_t i = 1; i < traj.losses.size(); ++i) {
      CHECK(traj.losses[i] <= traj.losses[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("gradient flow: stability guard rejects dt * lambda_max >= 2") {
  IntegratorConfig cfg;
  cfg.dt = 0.5;
  cfg.horizon = 10.0;
  CHECK_THROWS_WITH_AS(simulate_gradient_flow(one_d(4.0), Vector::Ones(1), cfg),
                       doctest::Contains("lambda_max"), NumericError);
}

TEST_CASE("gradient flow: checkpoint thinning caps stored points") {
  IntegratorConfig cfg;
  cfg.dt = 1e-5;
  cfg.horizon = 1.0;  // 1e5 steps
  const auto traj = simulate_gradient_flow(one_d(1.0), Vector::Ones(1), cfg);
  CHECK(traj.checkpoints() <= 10002);
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  // full-resolution integral still matches the loss drop tightly
  const double drop = traj.losses.front() - traj.losses.back();
  CHECK(*traj.grad_sq_time_integral == doctest::Approx(drop).epsilon(1e-9));
}

TEST_CASE("langevin: beta_inv = 0 is redirected to gradient flow") {
  IntegratorConfig cfg;
  cfg.beta_inv = 0.0;
  const auto init = GaussianMeasure::isotropic(Vector::Zero(1), 1.0);
  CHECK_THROWS_WITH_AS(simulate_langevin(one_d(1.0), init, cfg),
                       doctest::Contains("simulate_gradient_flow"),
                       ValidationError);
}

TEST_CASE("langevin: stationary ensemble stays near stationary covariance") {
  // A = I (d=2), beta = 1: stationary covariance (beta A)^-1 = I.
  Matrix a = Matrix::Identity(2, 2);
  const QuadraticPotential pot(a, Vector::Zero(2));
  const auto init = GaussianMeasure::isotropic(Vector::Zero(2), 1.0);
  IntegratorConfig cfg;
  cfg.dt = 2e-3;
  cfg.horizon = 1.0;
  cfg.beta_inv = 1.0;
  cfg.n_realizations = 10000;
  cfg.seed = 7;
  cfg.max_checkpoints = 2;
  const auto ensemble = simulate_langevin(pot, init, cfg);
  REQUIRE(ensemble.size() == 10000);
  double var0 = 0.0, var1 = 0.0;
  for (const auto& traj : ensemble) {
    var0 += traj.weights.back()[0] * traj.weights.back()[0];
    var1 += traj.weights.back()[1] * traj.weights.back()[1];
  }
  var0 /= 10000.0;
  var1 /= 10000.0;
  CHECK(var0 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(var1 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("langevin: dirac start reaches OU variance 1 - e^{-2t}") {
  const auto init = GaussianMeasure::dirac(Vector::Zero(1));
  IntegratorConfig cfg;
  cfg.dt = 5e-4;
  cfg.horizon = 0.5 * std::log(2.0);  // variance 0.5 exactly
  cfg.beta_inv = 1.0;
  cfg.n_realizations = 10000;
  cfg.seed = 11;
  cfg.max_checkpoints = 2;
  const auto ensemble = simulate_langevin(one_d(1.0), init, cfg);
  double var = 0.0;
  for (const auto& traj : ensemble) {
    var += traj.weights.back()[0] * traj.weights.back()[0];
  }
  var /= 10000.0;
  // 3 standard errors of the variance estimate plus the O(dt) bias
  const double se = 0.5 * std::sqrt(2.0 / 10000.0);
  CHECK(std::abs(var - 0.5) <= 3.0 * se + 5e-4);

  // cross-check the exact law
  const auto law = propagate_gaussian_ou(one_d(1.0), init, 1.0, cfg.horizon);
  CHECK(law.covariance()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("langevin: vanishing noise reproduces gradient flow to O(dt)") {
  Matrix a(2, 2);
  a << 1.0, 0.2, 0.2, 2.0;
  const QuadraticPotential pot(a, Vector::Zero(2));
  Vector theta0(2);
  theta0 << 1.0, -1.0;
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  const auto gf = simulate_gradient_flow(pot, theta0, cfg);

  IntegratorConfig lcfg = cfg;
  lcfg.beta_inv = 1e-30;
  lcfg.n_realizations = 1;
  const auto em = simulate_langevin(pot, GaussianMeasure::dirac(theta0), lcfg);
  const double diff = (em[0].weights.back() - gf.weights.back()).norm();
  CHECK(diff <= 5.0 * cfg.dt);
}

TEST_CASE("langevin: Euler-Maruyama weak error halves with dt") {
  // 1-d OU from a point mass; exact variance 1 - e^{-2T}. The EM chain's
  // variance obeys v_{l+1} = (1-h)^2 v_l + 2h, which gives the discretization
  // error in closed form; the simulated ensemble must sit on that chain
  // (within Monte-Carlo error), and the chain's error must at least halve
  // when h halves.
  const auto init = GaussianMeasure::dirac(Vector::Zero(1));
  const double horizon = 1.0;
  const double exact = -std::expm1(-2.0 * horizon);
  auto chain_var = [&](double h, std::size_t steps) {
    double v = 0.0;
    for (std::size_t l = 0; l < steps; ++l) v = (1.0 - h) * (1.0 - h) * v + 2.0 * h;
    return v;
  };
  auto empirical_var = [&](double dt, std::uint64_t seed) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.horizon = horizon;
    cfg.beta_inv = 1.0;
    cfg.n_realizations = 60000;
    cfg.seed = seed;
    cfg.max_checkpoints = 2;
    const auto ensemble = simulate_langevin(one_d(1.0), init, cfg);
    double var = 0.0;
    for (const auto& traj : ensemble) {
      var += traj.weights.back()[0] * traj.weights.back()[0];
    }
    return var / static_cast<double>(cfg.n_realizations);
  };
  double errs[3];
  const double dts[3] = {0.2, 0.1, 0.05};
  for (int k = 0; k < 3; ++k) {
    const auto steps = static_cast<std::size_t>(std::lround(horizon / dts[k]));
    const double chained = chain_var(dts[k], steps);
    const double mc = empirical_var(dts[k], 100 + static_cast<std::uint64_t>(k));
    const double se = chained * std::sqrt(2.0 / 60000.0);
    CHECK(std::abs(mc - chained) <= 4.0 * se);  // simulator sits on the EM chain
    errs[k] = std::abs(chained - exact);
  }
  CHECK(errs[0] >= 2.0 * errs[1]);  // halving h at least halves the bias
  CHECK(errs[1] >= 2.0 * errs[2]);
}

TEST_CASE("langevin: identical (seed, cfg) gives bit-identical ensembles") {
  const auto pot = one_d(1.5);
  const auto init = GaussianMeasure::isotropic(Vector::Ones(1), 0.5);
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 0.5;
  cfg.beta_inv = 0.7;
  cfg.n_realizations = 16;
  cfg.seed = 1234;
  const auto first = simulate_langevin(pot, init, cfg);
#ifdef _OPENMP
  // concurrent execution must match a forced-sequential run exactly
  const int saved_threads = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  const auto second = simulate_langevin(pot, init, cfg);
#ifdef _OPENMP
  omp_set_num_threads(saved_threads);
#endif
  REQUIRE(first.size() == second.size());
  for (std::size_t r = 0; r < first.size(); ++r) {
    REQUIRE(first[r].checkpoints() == second[r].checkpoints());
    for (std::size_t i = 0; i < first[r].checkpoints(); ++i) {
      CHECK(first[r].weights[i][0] == second[r].weights[i][0]);
      CHECK(first[r].losses[i] == second[r].losses[i]);
    }
  }
}

TEST_CASE("propagate_gaussian_ou: stationary law is a fixed point") {
  // 1-d, A = 1, b = 0, beta = 1, Sigma0 = 1
  const auto init = GaussianMeasure::isotropic(Vector::Zero(1), 1.0);
  for (double t : {0.0, 0.3, 1.0, 10.0}) {
    const auto law = propagate_gaussian_ou(one_d(1.0), init, 1.0, t);
    CHECK(law.covariance()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(law.mean()[0] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("propagate_gaussian_ou: t = 0 returns the initial measure") {
  Rng rng(5);
  const auto pot = random_spd(4, rng, 0.5, 3.0);
  Matrix m(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = rng.normal();
  }
  Vector mean(4);
  for (int i = 0; i < 4; ++i) mean[i] = rng.normal();
  const auto init = validate_gaussian(mean, m * m.transpose());
  const auto law = propagate_gaussian_ou(pot, init, 0.8, 0.0);
  CHECK((law.mean() - init.mean()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((law.covariance() - init.covariance()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("propagate_gaussian_ou: matches the ensemble at finite time") {
  // non-commuting initial covariance, 2-d
  Matrix a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  Vector b(2);
  b << 0.3, -0.2;
  const QuadraticPotential pot(a, b);
  Matrix cov0(2, 2);
  cov0 << 0.5, 0.2, 0.2, 0.8;
  Vector mu0(2);
  mu0 << 1.0, -1.0;
  const auto init = validate_gaussian(mu0, cov0);

  const double t = 0.7;
  const auto law = propagate_gaussian_ou(pot, init, 0.5, t);

  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = t;
  cfg.beta_inv = 0.5;
  cfg.n_realizations = 40000;
  cfg.seed = 21;
  cfg.max_checkpoints = 2;
  const auto ensemble = simulate_langevin(pot, init, cfg);
  Vector mean = Vector::Zero(2);
  for (const auto& traj : ensemble) mean += traj.weights.back();
  mean /= 40000.0;
  Matrix cov = Matrix::Zero(2, 2);
  for (const auto& traj : ensemble) {
    Vector delta = traj.weights.back() - mean;
    cov += delta * delta.transpose();
  }
  cov /= 39999.0;
  CHECK((mean - law.mean()).cwiseAbs().maxCoeff() < 0.02);
  CHECK((cov - law.covariance()).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("propagate_gaussian_ou: singular A is rejected") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  const QuadraticPotential pot(a, Vector::Zero(2));
  const auto init = GaussianMeasure::isotropic(Vector::Zero(2), 1.0);
  CHECK_THROWS_AS(propagate_gaussian_ou(pot, init, 1.0, 1.0), NumericError);
}
