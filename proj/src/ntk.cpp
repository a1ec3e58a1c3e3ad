#include "tsl/ntk.hpp"

#include <cmath>
#include <numeric>

#include "tsl/kernels.hpp"
#include "tsl/quadrature.hpp"
#include "tsl/thermo.hpp"

namespace tsl::ntk {

namespace {

void require_nonneg_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ValidationError("ntk: t must be finite and >= 0");
  }
}

double total_residue_sq(const SpectralModel& model) {
  return std::accumulate(model.residues_sq().begin(), model.residues_sq().end(), 0.0);
}

}  // namespace

std::vector<double> residue_at(const SpectralModel& model, double t) {
  require_nonneg_time(t);
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  std::vector<double> out(model.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    out[k] = std::exp(-lam[k] * t) * std::sqrt(res[k]);
  }
  return out;
}

namespace detail {

double displacement_sq(const SpectralModel& model, double t, bool parallel) {
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  return kernels::sum_compensated(
      model.size(),
      [&](std::size_t k) {
        const double bracket = -std::expm1(-lam[k] * t);
        return res[k] / lam[k] * bracket * bracket;
      },
      parallel);
}

double loss_drop(const SpectralModel& model, double t, bool parallel) {
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  return 0.5 * kernels::sum_compensated(
                   model.size(),
                   [&](std::size_t k) {
                     return res[k] * (-std::expm1(-2.0 * lam[k] * t));
                   },
                   parallel);
}

double path_length_gamma(const SpectralModel& model, double t,
                         std::size_t n_quad, bool parallel) {
  if (t == 0.0) return 0.0;
  const quad::Scheme scheme =
      quad::steep_start_scheme(t, n_quad, model.lambda_max());
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  const std::size_t n_nodes = scheme.nodes.size();

  // Uniform tail section (composite Simpson) is evaluated with a per-mode
  // exponential recurrence; preceding nodes are evaluated directly.
  std::size_t uniform_from = n_nodes;
  double h = 0.0;
  if (n_nodes >= 3) {
    const double last_gap = scheme.nodes[n_nodes - 1] - scheme.nodes[n_nodes - 2];
    std::size_t i = n_nodes - 1;
    while (i >= 1 &&
           std::abs((scheme.nodes[i] - scheme.nodes[i - 1]) - last_gap) <=
               1e-9 * last_gap) {
      --i;
    }
    if (n_nodes - i >= 8) {
      uniform_from = i;
      h = last_gap;
    }
  }

  std::vector<double> speed_sq;
  kernels::sum_compensated_multi(
      model.size(), n_nodes,
      [&](std::size_t k, std::vector<kernels::Compensated>& acc) {
        const double amp = lam[k] * res[k];
        if (amp == 0.0) return;
        for (std::size_t j = 0; j < uniform_from; ++j) {
          acc[j].add(amp * std::exp(-2.0 * lam[k] * scheme.nodes[j]));
        }
        if (uniform_from < n_nodes) {
          const double step = std::exp(-2.0 * lam[k] * h);
          double value = amp * std::exp(-2.0 * lam[k] * scheme.nodes[uniform_from]);
          for (std::size_t j = uniform_from; j < n_nodes; ++j) {
            acc[j].add(value);
            value *= step;
          }
        }
      },
      speed_sq, parallel);

  kernels::Compensated total;
  for (std::size_t j = 0; j < n_nodes; ++j) {
    total.add(scheme.weights[j] * std::sqrt(std::max(speed_sq[j], 0.0)));
  }
  return total.value();
}

}  // namespace detail

double displacement_sq(const SpectralModel& model, double t) {
  require_nonneg_time(t);
  return detail::displacement_sq(model, t, true);
}

double loss_drop(const SpectralModel& model, double t) {
  require_nonneg_time(t);
  return detail::loss_drop(model, t, true);
}

double inefficiency_ratio(const SpectralModel& model, double t) {
  if (!(t > 0.0)) {
    throw ValidationError("inefficiency_ratio: t must be > 0");
  }
  if (total_residue_sq(model) == 0.0) {
    throw ValidationError("inefficiency_ratio: all residues are zero");
  }
  const double drop = loss_drop(model, t);
  return displacement_sq(model, t) / (t * drop);
}

double path_length_gamma(const SpectralModel& model, double t,
                         std::size_t n_quad) {
  require_nonneg_time(t);
  return detail::path_length_gamma(model, t, n_quad, true);
}

double path_length_geo(const SpectralModel& model, double t) {
  require_nonneg_time(t);
  return std::sqrt(displacement_sq(model, t));
}

ScalingPrediction predicted_exponents(double alpha, double delta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("predicted_exponents: alpha must be > 0");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ValidationError("predicted_exponents: delta must be >= 0");
  }
  const double e = (1.0 - delta) / alpha;
  ScalingPrediction pred;
  pred.w2_exponent = e + 1.0;
  pred.entropy_exponent = (e > 0.0) ? e : 0.0;
  pred.tsl_exponent = (e > 0.0) ? 1.0 : 1.0 + e;
  pred.length_exponent = 0.5 * (e + 1.0);
  if (e == 0.0 || e == -1.0) {
    pred.regime = ScalingRegime::boundary;
  } else if (e > 0.0 && e < 1.0) {
    pred.regime = ScalingRegime::optimal;
  } else if (e > -1.0 && e < 0.0) {
    pred.regime = ScalingRegime::suboptimal;
  } else {
    // e >= 1 (W2 amplitude log-diverges) or e < -1 (length exponent <= 0)
    pred.regime = ScalingRegime::out_of_domain;
  }
  return pred;
}

double fit_loglog_slope(const std::vector<double>& ts,
                        const std::vector<double>& ys) {
  if (ts.size() != ys.size()) {
    throw ValidationError("fit_loglog_slope: length mismatch");
  }
  if (ts.size() < 3) {
    throw ValidationError("fit_loglog_slope: need at least 3 points");
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0) || !(ys[i] > 0.0)) {
      throw ValidationError("fit_loglog_slope: inputs must be strictly positive");
    }
    if (i > 0 && !(ts[i] > ts[i - 1])) {
      throw ValidationError("fit_loglog_slope: ts must be strictly increasing");
    }
  }
  const double n = static_cast<double>(ts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double x = std::log(ts[i]);
    const double y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<SweepRow> evaluate_sweep(const SpectralModel& model,
                                     const std::vector<double>& ts,
                                     std::size_t n_quad) {
  std::vector<SweepRow> rows;
  rows.reserve(ts.size());
  for (double t : ts) {
    SweepRow row;
    row.t = t;
    row.w2_sq = displacement_sq(model, t);
    row.entropy = loss_drop(model, t);
    row.t_sl = thermo::speed_limit(row.w2_sq, row.entropy);
    row.inefficiency = row.t_sl > 0.0 ? t / row.t_sl : 0.0;
    row.l_gamma = path_length_gamma(model, t, n_quad);
    row.l_geo = path_length_geo(model, t);
    rows.push_back(row);
  }
  return rows;
}

namespace reference {

double displacement_sq(const SpectralModel& model, double t) {
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  double acc = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double bracket = 1.0 - std::exp(-lam[k] * t);
    acc += res[k] / lam[k] * bracket * bracket;
  }
  return acc;
}

double loss_drop(const SpectralModel& model, double t) {
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  double acc = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    acc += res[k] * (1.0 - std::exp(-2.0 * lam[k] * t));
  }
  return 0.5 * acc;
}

double speed(const SpectralModel& model, double t) {
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  double acc = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    acc += lam[k] * res[k] * std::exp(-2.0 * lam[k] * t);
  }
  return std::sqrt(acc);
}

}  // namespace reference

}  // namespace tsl::ntk
