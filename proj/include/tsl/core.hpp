#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tsl/errors.hpp"

namespace tsl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Kernel eigenvalues and squared residue coefficients of a linearized model.
/// Immutable after construction; eigenvalues are strictly positive and sorted
/// non-increasing, residues_sq are non-negative and aligned with eigenvalues.
class SpectralModel {
 public:
  SpectralModel(std::vector<double> eigenvalues, std::vector<double> residues_sq);

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const std::vector<double>& residues_sq() const { return residues_sq_; }
  std::size_t size() const { return eigenvalues_.size(); }
  double lambda_max() const { return eigenvalues_.front(); }
  double lambda_min() const { return eigenvalues_.back(); }

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> residues_sq_;
};

/// Power-law spectrum parameters: lambda_k = scale * k^-alpha,
/// residue_sq_k = residue_scale * k^-delta for k in [k_star, n].
struct PowerLawSpec {
  double scale = 1.0;          // Lambda
  double alpha = 1.0;          // eigenvalue decay exponent
  double residue_scale = 1.0;  // Delta^2
  double delta = 0.0;          // residue decay exponent
  std::size_t k_star = 1;
  std::size_t n = 1;

  void validate() const;
};

SpectralModel build_power_law_spectrum(const PowerLawSpec& spec);

/// Gaussian measure with symmetric PSD covariance. Construct through
/// validate_gaussian (general case) or the dirac/isotropic helpers.
class GaussianMeasure {
 public:
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  Eigen::Index dim() const { return mean_.size(); }

  static GaussianMeasure dirac(Vector point);
  static GaussianMeasure isotropic(Vector mean, double variance);

  friend GaussianMeasure validate_gaussian(Vector mean, Matrix covariance);

 private:
  GaussianMeasure(Vector mean, Matrix covariance);

  Vector mean_;
  Matrix covariance_;
};

/// Symmetrizes the covariance to (C + C^T)/2 and verifies positive
/// semi-definiteness by eigendecomposition. Eigenvalues below
/// -1e-12 * lambda_max reject the measure.
GaussianMeasure validate_gaussian(Vector mean, Matrix covariance);

/// V(theta) = 1/2 theta^T A theta - b^T theta + c with A symmetric PSD.
class QuadraticPotential {
 public:
  QuadraticPotential(Matrix a, Vector b, double c = 0.0);

  const Matrix& A() const { return a_; }
  const Vector& b() const { return b_; }
  double c() const { return c_; }
  Eigen::Index dim() const { return b_.size(); }

  double value(const Vector& theta) const;
  /// value(theta) - c; what the trajectory records as "loss".
  double loss(const Vector& theta) const { return value(theta) - c_; }
  Vector gradient(const Vector& theta) const { return a_ * theta - b_; }
  double lambda_max() const { return lambda_max_; }

  static QuadraticPotential diagonal(const std::vector<double>& eigenvalues,
                                     const Vector& minimizer);

 private:
  Matrix a_;
  Vector b_;
  double c_ = 0.0;
  double lambda_max_ = 0.0;
};

/// Time-ordered training checkpoints. When produced by the integrators,
/// grad_sq holds ||grad V||^2 per checkpoint and grad_sq_time_integral the
/// trapezoidal accumulation of that quantity at full step resolution
/// (checkpoints may be thinned, the accumulator never is).
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> weights;
  std::vector<double> losses;
  std::optional<std::vector<double>> grad_sq;
  std::optional<double> grad_sq_time_integral;

  std::size_t checkpoints() const { return times.size(); }
  Eigen::Index dim() const { return weights.empty() ? 0 : weights.front().size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back() - times.front(); }

  void validate() const;
};

/// Principal output record: squared W2 cost, entropy in loss units, the
/// speed-limit bound and derived efficiency diagnostics. Fields that a
/// given producer cannot supply are left unset.
struct SpeedLimitReport {
  double horizon_T = 0.0;
  double w2_sq = 0.0;
  double entropy = 0.0;
  std::optional<double> t_sl;
  std::optional<double> inefficiency;
  std::optional<double> path_length;
  std::optional<double> geo_length;
  std::optional<double> length_ratio;
  bool entropy_error = false;       // loss did not decrease over the segment
  bool sub_unity_inefficiency = false;  // T < T_SL (possible for ingested paths)
};

}  // namespace tsl
