#pragma once

#include <cstddef>
#include <vector>

#include "tsl/core.hpp"

namespace tsl::ntk {

enum class ScalingRegime { optimal, suboptimal, boundary, out_of_domain };

/// Large-T power-law predictions for a PowerLawSpec(alpha, delta) spectrum.
/// Writing e = (1 - delta) / alpha:
///   optimal      0 < e < 1 : W2 ~ T^{e+1}, entropy ~ T^e, T_SL ~ T
///   suboptimal  -1 < e < 0 : entropy ~ T^0, T_SL ~ T^{1+e}
///   boundary     e in {0, -1}
///   out_of_domain e >= 1 or e < -1 (power laws pick up log corrections)
/// Exponent fields always carry the formulaic values.
struct ScalingPrediction {
  ScalingRegime regime = ScalingRegime::boundary;
  double w2_exponent = 0.0;
  double entropy_exponent = 0.0;
  double tsl_exponent = 0.0;
  double length_exponent = 0.0;
};

/// Per-mode residues Delta_k(t) = e^{-lambda_k t} sqrt(residues_sq_k)
/// (positive sign convention).
std::vector<double> residue_at(const SpectralModel& model, double t);

/// Squared weight displacement sum_k residues_sq_k / lambda_k (1-e^{-lambda_k t})^2.
double displacement_sq(const SpectralModel& model, double t);

/// Train-loss drop 1/2 sum_k residues_sq_k (1 - e^{-2 lambda_k t}).
double loss_drop(const SpectralModel& model, double t);

/// T_SL(t)/t = displacement_sq / (t * loss_drop); always in (0, 1].
double inefficiency_ratio(const SpectralModel& model, double t);

/// Arc length traveled in weight space:
///   integral over [0,t] of sqrt(sum_k lambda_k residues_sq_k e^{-2 lambda_k s}) ds.
/// Composite Simpson with n_quad panels plus a geometrically refined start
/// section when lambda_max * t is large.
double path_length_gamma(const SpectralModel& model, double t,
                         std::size_t n_quad = 4096);

/// Straight-line length sqrt(displacement_sq).
double path_length_geo(const SpectralModel& model, double t);

ScalingPrediction predicted_exponents(double alpha, double delta);

/// Least-squares slope of ln(y) against ln(t); needs >= 3 strictly positive
/// points with increasing t.
double fit_loglog_slope(const std::vector<double>& ts,
                        const std::vector<double>& ys);

/// One sweep row of every NTK diagnostic at a given t.
struct SweepRow {
  double t = 0.0;
  double w2_sq = 0.0;
  double entropy = 0.0;
  double t_sl = 0.0;
  double inefficiency = 0.0;
  double l_gamma = 0.0;
  double l_geo = 0.0;
};

std::vector<SweepRow> evaluate_sweep(const SpectralModel& model,
                                     const std::vector<double>& ts,
                                     std::size_t n_quad = 4096);

/// Straight-loop single-threaded implementations kept as the reference the
/// blocked kernels are tested and benchmarked against.
namespace reference {
double displacement_sq(const SpectralModel& model, double t);
double loss_drop(const SpectralModel& model, double t);
double speed(const SpectralModel& model, double t);
}  // namespace reference

/// Blocked-kernel entry points with explicit parallelism control (identical
/// bits either way); the public API above uses parallel = true.
namespace detail {
double displacement_sq(const SpectralModel& model, double t, bool parallel);
double loss_drop(const SpectralModel& model, double t, bool parallel);
double path_length_gamma(const SpectralModel& model, double t,
                         std::size_t n_quad, bool parallel);
}  // namespace detail

}  // namespace tsl::ntk
