#include "tsl/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tsl/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsl::dynamics {

namespace {

struct StepPlan {
  std::size_t n_steps;
  double h;
  std::size_t stride;
};

StepPlan plan_steps(double horizon, double dt, std::size_t max_checkpoints) {
  StepPlan plan{};
  if (max_checkpoints < 2) max_checkpoints = 2;
  if (horizon <= 0.0) {
    plan.n_steps = 0;
    plan.h = dt;
    plan.stride = 1;
    return plan;
  }
  plan.n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  if (plan.n_steps == 0) plan.n_steps = 1;
  plan.h = horizon / static_cast<double>(plan.n_steps);
  plan.stride = (plan.n_steps + max_checkpoints - 1) / max_checkpoints;
  return plan;
}

void check_stability(const QuadraticPotential& pot, double h) {
  const double product = h * pot.lambda_max();
  if (!(product < 2.0)) {
    std::ostringstream msg;
    msg << "integrator stability guard violated: dt * lambda_max = " << product
        << " (must be < 2)";
    throw NumericError(msg.str());
  }
  if (product > 0.1) {
    std::fprintf(stderr,
                 "tsl: warning: dt * lambda_max = %.3g > 0.1; trajectory may "
                 "deviate from gradient flow\n",
                 product);
  }
}

void record(Trajectory& traj, double t, const Vector& theta,
            const QuadraticPotential& pot) {
  traj.times.push_back(t);
  traj.weights.push_back(theta);
  traj.losses.push_back(pot.loss(theta));
  traj.grad_sq->push_back(pot.gradient(theta).squaredNorm());
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ValidationError("IntegratorConfig: dt must be > 0");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ValidationError("IntegratorConfig: horizon must be >= 0");
  }
  if (n_realizations < 1) {
    throw ValidationError("IntegratorConfig: n_realizations must be >= 1");
  }
  if (!(beta_inv >= 0.0) || !std::isfinite(beta_inv)) {
    throw ValidationError("IntegratorConfig: beta_inv must be >= 0");
  }
}

Trajectory simulate_gradient_flow(const QuadraticPotential& pot,
                                  const Vector& theta0,
                                  const IntegratorConfig& cfg) {
  cfg.validate();
  if (cfg.beta_inv != 0.0) {
    throw ValidationError(
        "simulate_gradient_flow requires beta_inv == 0; use simulate_langevin");
  }
  if (theta0.size() != pot.dim()) {
    throw ValidationError("simulate_gradient_flow: theta0 dimension mismatch");
  }

  const StepPlan plan = plan_steps(cfg.horizon, cfg.dt, cfg.max_checkpoints);
  check_stability(pot, plan.h);

  Trajectory traj;
  traj.grad_sq.emplace();
  Vector theta = theta0;
  record(traj, 0.0, theta, pot);

  double grad_sq_prev = pot.gradient(theta).squaredNorm();
  double integral = 0.0;

  Vector k1, k2, k3, k4;
  for (std::size_t l = 1; l <= plan.n_steps; ++l) {
    const double h = plan.h;
    k1 = -pot.gradient(theta);
    k2 = -pot.gradient(theta + 0.5 * h * k1);
    k3 = -pot.gradient(theta + 0.5 * h * k2);
    k4 = -pot.gradient(theta + h * k3);
    theta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double grad_sq = pot.gradient(theta).squaredNorm();
    integral += 0.5 * (grad_sq_prev + grad_sq) * h;
    grad_sq_prev = grad_sq;

    if (l % plan.stride == 0 || l == plan.n_steps) {
      record(traj, static_cast<double>(l) * h, theta, pot);
    }
  }
  traj.grad_sq_time_integral = integral;
  traj.validate();
  return traj;
}

std::vector<Trajectory> simulate_langevin(const QuadraticPotential& pot,
                                          const GaussianMeasure& init,
                                          const IntegratorConfig& cfg) {
  cfg.validate();
  if (cfg.beta_inv <= 0.0) {
    throw ValidationError(
        "simulate_langevin requires beta_inv > 0; use simulate_gradient_flow");
  }
  if (init.dim() != pot.dim()) {
    throw ValidationError("simulate_langevin: init dimension mismatch");
  }

  const StepPlan plan = plan_steps(cfg.horizon, cfg.dt, cfg.max_checkpoints);
  check_stability(pot, plan.h);

  // Sigma^(1/2) of the initial measure, negative round-off clamped.
  Eigen::SelfAdjointEigenSolver<Matrix> es(init.covariance());
  if (es.info() != Eigen::Success) {
    throw NumericError("simulate_langevin: init covariance eigensolve failed");
  }
  const Matrix sqrt_cov =
      es.eigenvectors() *
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
      es.eigenvectors().transpose();

  const auto d = pot.dim();
  const double noise_scale = std::sqrt(2.0 * cfg.beta_inv * plan.h);

  std::vector<Trajectory> ensemble(static_cast<std::size_t>(cfg.n_realizations));

  auto run_one = [&](int r) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(r));
    Vector z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
    Vector theta = init.mean() + sqrt_cov * z;

    Trajectory traj;
    traj.grad_sq.emplace();
    record(traj, 0.0, theta, pot);
    double grad_sq_prev = pot.gradient(theta).squaredNorm();
    double integral = 0.0;

    for (std::size_t l = 1; l <= plan.n_steps; ++l) {
      Vector grad = pot.gradient(theta);
      for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
      theta += -grad * plan.h + noise_scale * z;

      const double grad_sq = pot.gradient(theta).squaredNorm();
      integral += 0.5 * (grad_sq_prev + grad_sq) * plan.h;
      grad_sq_prev = grad_sq;

      if (l % plan.stride == 0 || l == plan.n_steps) {
        record(traj, static_cast<double>(l) * plan.h, theta, pot);
      }
    }
    traj.grad_sq_time_integral = integral;
    ensemble[static_cast<std::size_t>(r)] = std::move(traj);
  };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.n_realizations; ++r) run_one(r);
#else
  for (int r = 0; r < cfg.n_realizations; ++r) run_one(r);
#endif
  return ensemble;
}

GaussianMeasure propagate_gaussian_ou(const QuadraticPotential& pot,
                                      const GaussianMeasure& init,
                                      double beta_inv, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ValidationError("propagate_gaussian_ou: t must be >= 0");
  }
  if (beta_inv < 0.0) {
    throw ValidationError("propagate_gaussian_ou: beta_inv must be >= 0");
  }
  if (init.dim() != pot.dim()) {
    throw ValidationError("propagate_gaussian_ou: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(pot.A());
  if (es.info() != Eigen::Success) {
    throw NumericError("propagate_gaussian_ou: eigensolve failed");
  }
  const Vector evals = es.eigenvalues();
  const Matrix& q = es.eigenvectors();
  const double lam_max = evals.maxCoeff();
  if (evals.minCoeff() <= 1e-12 * std::max(lam_max, 1e-300)) {
    throw NumericError(
        "propagate_gaussian_ou: A is singular; stationary covariance undefined");
  }

  // Work in the eigenbasis of A.
  const Vector b_t = q.transpose() * pot.b();
  const Vector mu0_t = q.transpose() * init.mean();
  const Matrix sig0_t = q.transpose() * init.covariance() * q;

  const Vector mu_inf = b_t.cwiseQuotient(evals);
  Vector decay(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) decay[i] = std::exp(-evals[i] * t);

  const Vector mu_t = mu_inf + decay.cwiseProduct(mu0_t - mu_inf);

  Matrix sig_t = decay.asDiagonal() * sig0_t * decay.asDiagonal();
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    // beta_inv/lambda * (1 - e^{-2 lambda t}), accurate for small t.
    sig_t(i, i) += beta_inv / evals[i] * (-std::expm1(-2.0 * evals[i] * t));
  }

  Vector mean = q * mu_t;
  Matrix cov = q * sig_t * q.transpose();
  return validate_gaussian(std::move(mean), std::move(cov));
}

}  // namespace tsl::dynamics
