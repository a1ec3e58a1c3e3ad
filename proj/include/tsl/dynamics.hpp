#pragma once

#include <cstdint>
#include <vector>

#include "tsl/core.hpp"

namespace tsl::dynamics {

/// Time-integration parameters. beta_inv = 0 selects deterministic gradient
/// flow; beta_inv > 0 selects Langevin (Euler-Maruyama) sampling.
struct IntegratorConfig {
  double dt = 1e-3;
  double horizon = 1.0;  // T
  std::uint64_t seed = 0;
  int n_realizations = 1;
  double beta_inv = 0.0;
  /// Checkpoint budget per trajectory (endpoints always kept; grad-squared
  /// accumulation stays at full step resolution regardless). Large ensembles
  /// can set this to 2 to keep only the endpoints.
  std::size_t max_checkpoints = 10000;

  void validate() const;
};

/// Deterministic gradient flow theta' = -grad V via classical 4th-order
/// one-step integration. Records weights, loss V(theta)-c and ||grad V||^2
/// at every stored checkpoint; accumulates the full-resolution trapezoidal
/// integral of ||grad V||^2 into grad_sq_time_integral.
/// Requires cfg.beta_inv == 0 and dt * lambda_max(A) < 2.
Trajectory simulate_gradient_flow(const QuadraticPotential& pot,
                                  const Vector& theta0,
                                  const IntegratorConfig& cfg);

/// Euler-Maruyama Langevin ensemble:
///   theta_{l+1} = theta_l - grad V(theta_l) dt + N(0, 2 beta_inv dt I).
/// One trajectory per realization; realization r draws from the stream
/// derived from (cfg.seed, r), so results are identical under any thread
/// schedule. Requires cfg.beta_inv > 0.
std::vector<Trajectory> simulate_langevin(const QuadraticPotential& pot,
                                          const GaussianMeasure& init,
                                          const IntegratorConfig& cfg);

/// Exact Gaussian law of the Ornstein-Uhlenbeck process at time t for a
/// positive-definite quadratic potential:
///   mu(t)    = A^-1 b + e^{-At} (mu0 - A^-1 b)
///   Sigma(t) = e^{-At} Sigma0 e^{-At} + beta_inv A^-1 (I - e^{-2At})
/// computed in the eigenbasis of A.
GaussianMeasure propagate_gaussian_ou(const QuadraticPotential& pot,
                                      const GaussianMeasure& init,
                                      double beta_inv, double t);

}  // namespace tsl::dynamics
