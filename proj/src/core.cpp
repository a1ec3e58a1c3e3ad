#include "tsl/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace tsl {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

SpectralModel::SpectralModel(std::vector<double> eigenvalues,
                             std::vector<double> residues_sq)
    : eigenvalues_(std::move(eigenvalues)), residues_sq_(std::move(residues_sq)) {
  if (eigenvalues_.empty()) {
    throw ValidationError("SpectralModel: empty spectrum");
  }
  if (eigenvalues_.size() != residues_sq_.size()) {
    throw ValidationError("SpectralModel: eigenvalues and residues_sq lengths differ");
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : eigenvalues_) {
    if (!finite(lam) || lam <= 0.0) {
      throw ValidationError("SpectralModel: eigenvalues must be finite and > 0");
    }
    if (lam > prev) {
      throw ValidationError("SpectralModel: eigenvalues must be sorted non-increasing");
    }
    prev = lam;
  }
  for (double r : residues_sq_) {
    if (!finite(r) || r < 0.0) {
      throw ValidationError("SpectralModel: residues_sq must be finite and >= 0");
    }
  }
}

void PowerLawSpec::validate() const {
  std::ostringstream bad;
  if (!finite(scale) || scale <= 0.0) bad << "scale must be > 0; ";
  if (!finite(alpha) || alpha <= 0.0) bad << "alpha must be > 0; ";
  if (!finite(residue_scale) || residue_scale < 0.0) bad << "residue_scale must be >= 0; ";
  if (!finite(delta) || delta < 0.0) bad << "delta must be >= 0; ";
  if (k_star < 1) bad << "k_star must be >= 1; ";
  if (n < k_star) bad << "n must be >= k_star; ";
  const std::string msg = bad.str();
  if (!msg.empty()) throw ValidationError("PowerLawSpec: " + msg);
}

SpectralModel build_power_law_spectrum(const PowerLawSpec& spec) {
  spec.validate();
  const std::size_t count = spec.n - spec.k_star + 1;
  std::vector<double> lam(count), res(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double k = static_cast<double>(spec.k_star + i);
    lam[i] = spec.scale * std::pow(k, -spec.alpha);
    res[i] = spec.residue_scale * std::pow(k, -spec.delta);
  }
  return SpectralModel(std::move(lam), std::move(res));
}

GaussianMeasure::GaussianMeasure(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {}

GaussianMeasure GaussianMeasure::dirac(Vector point) {
  Matrix zero = Matrix::Zero(point.size(), point.size());
  return GaussianMeasure(std::move(point), std::move(zero));
}

GaussianMeasure GaussianMeasure::isotropic(Vector mean, double variance) {
  if (!finite(variance) || variance < 0.0) {
    throw ValidationError("GaussianMeasure::isotropic: variance must be >= 0");
  }
  Matrix cov = variance * Matrix::Identity(mean.size(), mean.size());
  return GaussianMeasure(std::move(mean), std::move(cov));
}

GaussianMeasure validate_gaussian(Vector mean, Matrix covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw ValidationError("validate_gaussian: covariance must be square");
  }
  if (covariance.rows() != mean.size()) {
    throw ValidationError("validate_gaussian: mean/covariance dimension mismatch");
  }
  if (!mean.allFinite() || !covariance.allFinite()) {
    throw ValidationError("validate_gaussian: non-finite entries");
  }
  Matrix sym = 0.5 * (covariance + covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericError("validate_gaussian: eigendecomposition failed");
  }
  const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  const double floor = -1e-12 * std::max(lam_max, 1e-300);
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min < floor) {
    std::ostringstream msg;
    msg << "validate_gaussian: covariance is not PSD (eigenvalue " << lam_min
        << " below tolerance " << floor << ")";
    throw ValidationError(msg.str());
  }
  return GaussianMeasure(std::move(mean), std::move(sym));
}

QuadraticPotential::QuadraticPotential(Matrix a, Vector b, double c)
    : a_(std::move(a)), b_(std::move(b)), c_(c) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw ValidationError("QuadraticPotential: dimension mismatch");
  }
  if (!a_.allFinite() || !b_.allFinite() || !finite(c_)) {
    throw ValidationError("QuadraticPotential: non-finite entries");
  }
  const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(a_.cwiseAbs().maxCoeff(), 1e-300);
  if (asym > 1e-10 * scale) {
    throw ValidationError("QuadraticPotential: A must be symmetric");
  }
  a_ = 0.5 * (a_ + a_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a_, Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues().minCoeff();
  lambda_max_ = es.eigenvalues().maxCoeff();
  if (lam_min < -1e-12 * std::max(lambda_max_, 1e-300)) {
    throw ValidationError("QuadraticPotential: A must be positive semi-definite");
  }
}

double QuadraticPotential::value(const Vector& theta) const {
  return 0.5 * theta.dot(a_ * theta) - b_.dot(theta) + c_;
}

QuadraticPotential QuadraticPotential::diagonal(const std::vector<double>& eigenvalues,
                                                const Vector& minimizer) {
  const auto d = static_cast<Eigen::Index>(eigenvalues.size());
  if (minimizer.size() != d) {
    throw ValidationError("QuadraticPotential::diagonal: dimension mismatch");
  }
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) a(i, i) = eigenvalues[static_cast<std::size_t>(i)];
  Vector b = a * minimizer;
  return QuadraticPotential(std::move(a), std::move(b), 0.0);
}

void Trajectory::validate() const {
  if (times.size() != weights.size() || times.size() != losses.size()) {
    throw ValidationError("Trajectory: per-time sequences have different lengths");
  }
  if (grad_sq && grad_sq->size() != times.size()) {
    throw ValidationError("Trajectory: grad_sq length mismatch");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ValidationError("Trajectory: times must be strictly increasing");
    }
  }
  const Eigen::Index d = dim();
  for (const auto& w : weights) {
    if (w.size() != d) throw ValidationError("Trajectory: inconsistent weight dimension");
  }
  if (grad_sq) {
    for (double g : *grad_sq) {
      if (!finite(g) || g < 0.0) {
        throw ValidationError("Trajectory: grad_sq entries must be finite and >= 0");
      }
    }
  }
}

}  // namespace tsl
