#include "tsl/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsl/quadrature.hpp"

namespace tsl::thermo {

Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw NumericError("sqrt_psd: eigendecomposition failed");
  }
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

double w2_gaussian(const GaussianMeasure& p, const GaussianMeasure& q) {
  if (p.dim() != q.dim()) {
    throw ValidationError("w2_gaussian: dimension mismatch");
  }
  const Matrix sq = sqrt_psd(q.covariance());
  const Matrix cross = sqrt_psd(sq * p.covariance() * sq);
  const double mean_part = (p.mean() - q.mean()).squaredNorm();
  const double trace_part =
      p.covariance().trace() + q.covariance().trace() - 2.0 * cross.trace();
  // trace_part rounds off slightly negative when p ~ q
  return mean_part + std::max(trace_part, 0.0);
}

double w2_dirac(const Vector& theta0, const Vector& theta_t) {
  if (theta0.size() != theta_t.size()) {
    throw ValidationError("w2_dirac: dimension mismatch");
  }
  return (theta_t - theta0).squaredNorm();
}

double w2_empirical_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("w2_empirical_1d: empty sample set");
  }
  if (a.size() != b.size()) {
    throw ValidationError("w2_empirical_1d: sample counts differ");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

EntropyEstimate entropy_dynamic_gradient_flow(const Trajectory& traj) {
  traj.validate();
  if (!traj.grad_sq && !traj.grad_sq_time_integral) {
    throw ValidationError(
        "entropy_dynamic_gradient_flow: trajectory carries no grad_sq data");
  }
  double value = 0.0;
  if (traj.grad_sq_time_integral) {
    value = *traj.grad_sq_time_integral;
  } else {
    const auto& g = *traj.grad_sq;
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
      value += 0.5 * (g[i - 1] + g[i]) * (traj.times[i] - traj.times[i - 1]);
    }
  }
  return {value, EntropyMethod::dynamic_gradient_flow, traj.horizon()};
}

EntropyEstimate entropy_dynamic_gaussian(const QuadraticPotential& pot,
                                         const GaussianMeasure& init,
                                         double beta_inv, double horizon,
                                         std::size_t n_quad) {
  if (!(beta_inv > 0.0)) {
    throw ValidationError("entropy_dynamic_gaussian: beta_inv must be > 0");
  }
  if (!(horizon >= 0.0)) {
    throw ValidationError("entropy_dynamic_gaussian: horizon must be >= 0");
  }
  if (init.dim() != pot.dim()) {
    throw ValidationError("entropy_dynamic_gaussian: dimension mismatch");
  }
  if (horizon == 0.0) {
    return {0.0, EntropyMethod::dynamic_gaussian, 0.0};
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(pot.A());
  if (es.info() != Eigen::Success) {
    throw NumericError("entropy_dynamic_gaussian: eigensolve failed");
  }
  const Vector lam = es.eigenvalues();
  const Matrix& q = es.eigenvectors();
  if (lam.minCoeff() <= 1e-12 * std::max(lam.maxCoeff(), 1e-300)) {
    throw NumericError("entropy_dynamic_gaussian: A must be positive definite");
  }

  const Vector b_t = q.transpose() * pot.b();
  const Vector mu0_t = q.transpose() * init.mean();
  const Matrix sig0_t = q.transpose() * init.covariance() * q;
  const Vector mu_inf = b_t.cwiseQuotient(lam);
  const double trace_a = lam.sum();
  const auto d = lam.size();

  auto integrand = [&](double t) {
    Vector decay(d);
    for (Eigen::Index i = 0; i < d; ++i) decay[i] = std::exp(-lam[i] * t);
    const Vector mu_t = mu_inf + decay.cwiseProduct(mu0_t - mu_inf);
    Matrix sig = decay.asDiagonal() * sig0_t * decay.asDiagonal();
    for (Eigen::Index i = 0; i < d; ++i) {
      sig(i, i) += beta_inv / lam[i] * (-std::expm1(-2.0 * lam[i] * t));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> sig_es(sig);
    const double sig_min = sig_es.eigenvalues().minCoeff();
    if (!(sig_min > 0.0)) {
      std::ostringstream msg;
      msg << "entropy_dynamic_gaussian: Sigma(t) singular at t = " << t
          << "; use a larger initial covariance";
      throw NumericError(msg.str());
    }
    double tr_inv = 0.0;
    double grad_cov = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      tr_inv += 1.0 / sig_es.eigenvalues()[i];
      grad_cov += lam[i] * lam[i] * sig(i, i);
    }
    const double grad_mean = (lam.cwiseProduct(mu_t) - b_t).squaredNorm();
    return grad_mean + grad_cov - 2.0 * beta_inv * trace_a +
           beta_inv * beta_inv * tr_inv;
  };

  const quad::Scheme scheme =
      quad::steep_start_scheme(horizon, n_quad, lam.maxCoeff());
  const double value = scheme.apply(integrand);
  return {value, EntropyMethod::dynamic_gaussian, horizon};
}

EntropyEstimate entropy_equilibrium(double ln_z_final, double ln_z_init,
                                    double mean_initial_loss, double beta_inv) {
  if (!(beta_inv > 0.0)) {
    throw ValidationError("entropy_equilibrium: beta_inv must be > 0");
  }
  const double value =
      beta_inv * (ln_z_final - ln_z_init) + mean_initial_loss;
  return {value, EntropyMethod::equilibrium,
          std::numeric_limits<double>::infinity()};
}

EntropyEstimate entropy_ntk(double loss_initial, double loss_final) {
  const double drop = loss_initial - loss_final;
  if (drop < -1e-9) {
    std::ostringstream msg;
    msg << "entropy_ntk: loss increased by " << -drop
        << "; not a gradient-flow pair";
    throw ValidationError(msg.str());
  }
  return {drop, EntropyMethod::ntk_loss_drop, 0.0};
}

double speed_limit(double w2_sq, double entropy) {
  if (w2_sq < 0.0) {
    throw ValidationError("speed_limit: w2_sq must be >= 0");
  }
  if (w2_sq == 0.0) return 0.0;  // no transport, no time
  if (entropy <= 0.0) {
    throw NumericError(
        "speed_limit: entropy <= 0 with positive W2; no admissible bound");
  }
  return w2_sq / entropy;
}

double inefficiency(double horizon, double t_sl) {
  if (!(t_sl > 0.0)) {
    throw ValidationError("inefficiency: t_sl must be > 0");
  }
  return horizon / t_sl;
}

}  // namespace tsl::thermo
