#pragma once

#include <cstddef>
#include <vector>

#include "tsl/core.hpp"

namespace tsl::thermo {

enum class EntropyMethod {
  dynamic_gradient_flow,
  dynamic_gaussian,
  equilibrium,
  ntk_loss_drop,
};

/// Entropy production reported in loss units (beta^-1 R).
struct EntropyEstimate {
  double value = 0.0;
  EntropyMethod method = EntropyMethod::dynamic_gradient_flow;
  double horizon_T = 0.0;
};

/// Squared Wasserstein-2 cost between Gaussian measures:
///   ||mu_p - mu_q||^2 + Tr(Sigma_p + Sigma_q - 2 (Sigma_q^1/2 Sigma_p Sigma_q^1/2)^1/2).
/// Matrix square roots use symmetric eigendecomposition with negative
/// round-off eigenvalues clamped to zero.
double w2_gaussian(const GaussianMeasure& p, const GaussianMeasure& q);

/// Squared L2 distance between two weight vectors (Dirac-Dirac transport).
double w2_dirac(const Vector& theta0, const Vector& theta_t);

/// Quantile-coupling estimate between equally sized 1-d sample sets:
/// sorts both and returns mean squared difference of order statistics.
double w2_empirical_1d(std::vector<double> a, std::vector<double> b);

/// beta^-1 R_T = integral of ||grad V||^2 dt along a gradient-flow
/// trajectory (trapezoidal). Prefers the full-resolution accumulator when
/// the trajectory carries one.
EntropyEstimate entropy_dynamic_gradient_flow(const Trajectory& traj);

/// beta^-1 R_T for Langevin dynamics on a PD quadratic potential with
/// Gaussian initial law, using the exact Ornstein-Uhlenbeck moments:
///   integral of <||grad V||^2> - 2 beta_inv <Lap V> + beta_inv^2 <||grad ln p||^2> dt
/// with <||grad V||^2> = ||A mu - b||^2 + Tr(A Sigma A), <Lap V> = Tr A,
/// <||grad ln p||^2> = Tr(Sigma^-1). Composite Simpson with n_quad panels and
/// a geometrically refined start section when the decay is steep.
EntropyEstimate entropy_dynamic_gaussian(const QuadraticPotential& pot,
                                         const GaussianMeasure& init,
                                         double beta_inv, double horizon,
                                         std::size_t n_quad = 4096);

/// Equilibrium (free-energy) form: beta_inv * (lnZ_T - lnZ_0) + <L(theta_0)>.
EntropyEstimate entropy_equilibrium(double ln_z_final, double ln_z_init,
                                    double mean_initial_loss, double beta_inv);

/// Gradient-flow form: entropy equals the train-loss drop.
EntropyEstimate entropy_ntk(double loss_initial, double loss_final);

/// T_SL = w2_sq / entropy; (0, 0) maps to 0 by convention.
double speed_limit(double w2_sq, double entropy);

/// T / T_SL.
double inefficiency(double horizon, double t_sl);

/// Symmetric PSD square root with round-off clamping (shared helper).
Matrix sqrt_psd(const Matrix& m);

}  // namespace tsl::thermo
