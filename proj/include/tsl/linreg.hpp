#pragma once

#include <cstdint>
#include <functional>

#include "tsl/core.hpp"

namespace tsl::linreg {

/// Ridge-regularized Bayesian linear regression instance. X is d x n
/// (columns are samples), y the n targets; prior is N(0, (lambda d)^-1 I),
/// posterior N(mu_T, beta^-1 Sigma_T) with Sigma_T = (X X^T + c_n I)^-1,
/// c_n = (lambda/beta) d.
struct LinRegProblem {
  Matrix x;
  Vector y;
  double lambda = 1.0;
  double beta = 1.0;
  double alpha = 1.0;

  Eigen::Index d() const { return x.rows(); }
  Eigen::Index n() const { return x.cols(); }
  double c() const { return lambda / beta; }
  double c_n() const { return c() * static_cast<double>(d()); }

  void validate() const;
};

/// Limiting-ratio parameters for the Marchenko-Pastur asymptotics.
struct MPParams {
  double gamma = 1.0;  // d/n
  double lambda = 1.0;
  double beta = 1.0;
  double alpha = 1.0;

  void validate() const;
};

/// Support endpoints and atom weight of the MP law.
struct MPSupport {
  double gamma_minus = 0.0;
  double gamma_plus = 0.0;
  double atom_weight = 0.0;

  static MPSupport of(double gamma);
};

/// Teacher-student instance: X has i.i.d. standard-normal entries,
/// theta_star ~ N(0, alpha/d I), y = X^T theta_star (noiseless).
LinRegProblem generate_teacher_problem(Eigen::Index d, Eigen::Index n,
                                       double lambda, double beta, double alpha,
                                       std::uint64_t seed);

/// Posterior N(mu_T, beta^-1 Sigma_T) via symmetric eigendecomposition of XX^T.
GaussianMeasure posterior(const LinRegProblem& p);

/// lnZ_0 = (d/2) ln(2 pi / (lambda d)).
double log_partition_init(double lambda, Eigen::Index d);

/// lnZ_T = 1/2 (ln|Sigma_T| + d ln(2 pi / beta)) - beta/2 ||y||^2
///         + beta/2 y^T X^T Sigma_T X y.
double log_partition_final(const LinRegProblem& p);

/// (n beta)^-1 R = (n beta)^-1 (lnZ_T - lnZ_0) + (1/n) <L(theta_0)> with the
/// prior-averaged initial loss in closed form: 1/2 ||y||^2 + Tr(XX^T)/(2 lambda d).
double entropy_linreg(const LinRegProblem& p);

/// Squared W2 between prior and posterior (isotropic prior, so the
/// square roots commute):
///   ||mu_T||^2 + 1/lambda + Tr(Sigma_T)/beta - 2 (beta lambda)^-1/2 d^-1/2 Tr(Sigma_T^1/2).
double w2_linreg(const LinRegProblem& p);

/// w2_linreg / entropy_linreg packaged as a report (time units of the
/// eta = 1/n convention).
SpeedLimitReport tsl_finite(const LinRegProblem& p);

/// Continuous part of the MP density at x (the atom is reported separately).
double mp_density(double x, double gamma);

/// integral of f d rho: Gauss-Legendre with an arcsine substitution removing
/// the square-root endpoint behavior, plus (1 - 1/gamma) f(0) when gamma > 1.
double mp_integral(const std::function<double(double)>& f, double gamma,
                   std::size_t n_nodes = 2048);

/// Asymptotic speed limit T_SL(lambda, beta, gamma, alpha): MP limit of
/// tsl_finite. The denominator carries the data-fit entropy term
/// (alpha/2) * integral of s^2/(c gamma + s) d rho in addition to the
/// free-energy and initial-loss terms; without it the expression does not
/// match the finite-dimensional computation.
double tsl_asymptotic(const MPParams& mp, std::size_t n_nodes = 2048);

enum class TslLimit { beta_inf, beta_zero, n_inf, d_inf };

/// Closed-form limit values 2(1+alpha lambda)/int s drho, 0, 2 lambda alpha, 0.
double tsl_limits(const MPParams& mp, TslLimit which);

}  // namespace tsl::linreg
