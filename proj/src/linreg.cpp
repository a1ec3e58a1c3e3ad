#include "tsl/linreg.hpp"

#include <cmath>
#include <sstream>

#include "tsl/quadrature.hpp"
#include "tsl/rng.hpp"

namespace tsl::linreg {

namespace {

/// Eigendecomposition of XX^T plus the eigenbasis projection of Xy;
/// everything downstream (posterior, partition function, entropy, W2) is a
/// function of these.
struct RidgeSpectrum {
  Vector evals;      // eigenvalues of XX^T, ascending, >= 0
  Matrix vectors;    // eigenvectors of XX^T
  Vector proj;       // vectors^T * (X y)
  double y_sq = 0.0;
  double trace_xxt = 0.0;
};

RidgeSpectrum ridge_spectrum(const LinRegProblem& p) {
  p.validate();
  RidgeSpectrum rs;
  const Matrix k = p.x * p.x.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  if (es.info() != Eigen::Success) {
    throw NumericError("linreg: eigendecomposition of XX^T failed");
  }
  rs.evals = es.eigenvalues().cwiseMax(0.0);
  rs.vectors = es.eigenvectors();
  rs.proj = rs.vectors.transpose() * (p.x * p.y);
  rs.y_sq = p.y.squaredNorm();
  rs.trace_xxt = rs.evals.sum();
  return rs;
}

double log_partition_final_impl(const LinRegProblem& p, const RidgeSpectrum& rs) {
  const double cn = p.c_n();
  const auto d = p.d();
  double logdet_sigma = 0.0;
  double quad_form = 0.0;  // y^T X^T Sigma_T X y
  for (Eigen::Index i = 0; i < d; ++i) {
    logdet_sigma -= std::log(rs.evals[i] + cn);
    quad_form += rs.proj[i] * rs.proj[i] / (rs.evals[i] + cn);
  }
  return 0.5 * (logdet_sigma +
                static_cast<double>(d) * std::log(2.0 * M_PI / p.beta)) -
         0.5 * p.beta * rs.y_sq + 0.5 * p.beta * quad_form;
}

double entropy_impl(const LinRegProblem& p, const RidgeSpectrum& rs) {
  const double ln_zt = log_partition_final_impl(p, rs);
  const double ln_z0 = log_partition_init(p.lambda, p.d());
  const double mean_initial_loss =
      0.5 * rs.y_sq +
      rs.trace_xxt / (2.0 * p.lambda * static_cast<double>(p.d()));
  const double n = static_cast<double>(p.n());
  return (ln_zt - ln_z0) / (n * p.beta) + mean_initial_loss / n;
}

double w2_impl(const LinRegProblem& p, const RidgeSpectrum& rs) {
  const double cn = p.c_n();
  const auto d = p.d();
  double mu_sq = 0.0, tr_sigma = 0.0, tr_sqrt_sigma = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double prec = rs.evals[i] + cn;
    mu_sq += rs.proj[i] * rs.proj[i] / (prec * prec);
    tr_sigma += 1.0 / prec;
    tr_sqrt_sigma += 1.0 / std::sqrt(prec);
  }
  return mu_sq + 1.0 / p.lambda + tr_sigma / p.beta -
         2.0 / std::sqrt(p.beta * p.lambda * static_cast<double>(d)) *
             tr_sqrt_sigma;
}

}  // namespace

void LinRegProblem::validate() const {
  if (d() < 1 || n() < 1) {
    throw ValidationError("LinRegProblem: d and n must be >= 1");
  }
  if (y.size() != n()) {
    throw ValidationError("LinRegProblem: y length must equal n");
  }
  if (!(lambda > 0.0) || !(beta > 0.0) || !(alpha > 0.0)) {
    throw ValidationError("LinRegProblem: lambda, beta, alpha must be > 0");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw ValidationError("LinRegProblem: non-finite entries");
  }
}

void MPParams::validate() const {
  if (!(gamma > 0.0) || !(lambda > 0.0) || !(beta > 0.0) || !(alpha > 0.0)) {
    throw ValidationError("MPParams: all parameters must be > 0");
  }
}

MPSupport MPSupport::of(double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("MPSupport: gamma must be > 0");
  MPSupport s;
  const double root = std::sqrt(gamma);
  s.gamma_minus = (1.0 - root) * (1.0 - root);
  s.gamma_plus = (1.0 + root) * (1.0 + root);
  s.atom_weight = std::max(0.0, 1.0 - 1.0 / gamma);
  return s;
}

LinRegProblem generate_teacher_problem(Eigen::Index d, Eigen::Index n,
                                       double lambda, double beta, double alpha,
                                       std::uint64_t seed) {
  if (d < 1 || n < 1) {
    throw ValidationError("generate_teacher_problem: d and n must be >= 1");
  }
  LinRegProblem p;
  p.lambda = lambda;
  p.beta = beta;
  p.alpha = alpha;
  Rng rng_x = Rng::stream(seed, 0);
  Rng rng_theta = Rng::stream(seed, 1);
  p.x.resize(d, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) p.x(i, j) = rng_x.normal();
  }
  Vector theta_star(d);
  const double scale = std::sqrt(alpha / static_cast<double>(d));
  for (Eigen::Index i = 0; i < d; ++i) theta_star[i] = scale * rng_theta.normal();
  p.y = p.x.transpose() * theta_star;
  p.validate();
  return p;
}

GaussianMeasure posterior(const LinRegProblem& p) {
  const RidgeSpectrum rs = ridge_spectrum(p);
  const double cn = p.c_n();
  const Vector inv_prec = (rs.evals.array() + cn).inverse().matrix();
  Vector mean = rs.vectors * inv_prec.cwiseProduct(rs.proj);
  Matrix cov = rs.vectors * (inv_prec / p.beta).asDiagonal() *
               rs.vectors.transpose();
  return validate_gaussian(std::move(mean), std::move(cov));
}

double log_partition_init(double lambda, Eigen::Index d) {
  if (!(lambda > 0.0) || d < 1) {
    throw ValidationError("log_partition_init: lambda > 0 and d >= 1 required");
  }
  return 0.5 * static_cast<double>(d) *
         std::log(2.0 * M_PI / (lambda * static_cast<double>(d)));
}

double log_partition_final(const LinRegProblem& p) {
  return log_partition_final_impl(p, ridge_spectrum(p));
}

double entropy_linreg(const LinRegProblem& p) {
  return entropy_impl(p, ridge_spectrum(p));
}

double w2_linreg(const LinRegProblem& p) {
  return w2_impl(p, ridge_spectrum(p));
}

SpeedLimitReport tsl_finite(const LinRegProblem& p) {
  const RidgeSpectrum rs = ridge_spectrum(p);
  SpeedLimitReport report;
  report.w2_sq = w2_impl(p, rs);
  report.entropy = entropy_impl(p, rs);
  if (!(report.entropy > 0.0)) {
    throw NumericError("tsl_finite: entropy production is not positive");
  }
  report.t_sl = report.w2_sq / report.entropy;
  report.geo_length = std::sqrt(std::max(report.w2_sq, 0.0));
  return report;
}

double mp_density(double x, double gamma) {
  const MPSupport s = MPSupport::of(gamma);
  if (!(x > s.gamma_minus) || !(x < s.gamma_plus)) return 0.0;
  return std::sqrt((s.gamma_plus - x) * (x - s.gamma_minus)) /
         (2.0 * M_PI * gamma * x);
}

double mp_integral(const std::function<double(double)>& f, double gamma,
                   std::size_t n_nodes) {
  const MPSupport s = MPSupport::of(gamma);
  std::vector<double> u, w;
  quad::gauss_legendre(n_nodes, u, w);

  // s(t) = mid + half sin(pi t / 2) turns the square-root edge factors into
  // cos^2, so Gauss-Legendre converges spectrally.
  const double mid = 0.5 * (s.gamma_plus + s.gamma_minus);
  const double half = 0.5 * (s.gamma_plus - s.gamma_minus);
  double acc = 0.0, carry = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double angle = 0.5 * M_PI * u[i];
    const double si = mid + half * std::sin(angle);
    const double cosw = std::cos(angle);
    const double fv = f(si);
    if (!std::isfinite(fv)) {
      std::ostringstream msg;
      msg << "mp_integral: integrand non-finite at s = " << si;
      throw NumericError(msg.str());
    }
    const double v = fv * half * half * cosw * cosw / (2.0 * M_PI * gamma * si) *
                     (0.5 * M_PI * w[i]);
    const double t = acc + v;
    carry += (std::abs(acc) >= std::abs(v)) ? (acc - t) + v : (v - t) + acc;
    acc = t;
  }
  double total = acc + carry;
  if (s.atom_weight > 0.0) {
    const double f0 = f(0.0);
    if (!std::isfinite(f0)) {
      throw NumericError("mp_integral: integrand non-finite at the atom s = 0");
    }
    total += s.atom_weight * f0;
  }
  return total;
}

namespace {

// u - ln(1 + u), evaluated without cancellation for small u.
double u_minus_log1p(double u) {
  if (u < 1e-4) {
    return u * u * (0.5 - u / 3.0 + u * u / 4.0 - u * u * u / 5.0);
  }
  return u - std::log1p(u);
}

}  // namespace

double tsl_asymptotic(const MPParams& mp, std::size_t n_nodes) {
  mp.validate();
  const double g = mp.gamma;
  const double c = mp.lambda / mp.beta;
  auto integral = [&](auto f) { return mp_integral(f, g, n_nodes); };

  // The W2 numerator lambda^-1 + beta^-1 tr + sqrt-cross terms combine, with
  // u = s / (c gamma), into lambda^-1 (sqrt(1+u) - 1)^2 / (1+u): exact
  // algebra that stays positive where the raw terms cancel to O(beta^2).
  const double i_transport = integral([&](double s) {
    const double u = s / (c * g);
    const double root_m1 = u / (std::sqrt(1.0 + u) + 1.0);  // sqrt(1+u) - 1
    return root_m1 * root_m1 / (1.0 + u);
  });
  const double i_mu = integral([&](double s) {
    const double r = s / (c * g + s);
    return r * r;
  });

  // Likewise the free-energy and initial-loss terms combine into
  // (gamma / 2 beta) (u - ln(1+u)) >= 0 plus the data-fit term.
  const double i_entropy =
      integral([&](double s) { return u_minus_log1p(s / (c * g)); });
  const double i_fit =
      integral([&](double s) { return s == 0.0 ? 0.0 : s * s / (c * g + s); });

  const double numerator =
      i_transport / mp.lambda + mp.alpha * i_mu;
  const double denominator =
      g / (2.0 * mp.beta) * i_entropy + 0.5 * mp.alpha * i_fit;
  if (!(denominator > 0.0)) {
    std::ostringstream msg;
    msg << "tsl_asymptotic: entropy denominator " << denominator
        << " not positive (free-energy/initial-loss part "
        << g / (2.0 * mp.beta) * i_entropy << ", data-fit part "
        << 0.5 * mp.alpha * i_fit << ")";
    throw NumericError(msg.str());
  }
  return numerator / denominator;
}

double tsl_limits(const MPParams& mp, TslLimit which) {
  mp.validate();
  switch (which) {
    case TslLimit::beta_inf: {
      const double mean = mp_integral([](double s) { return s; }, mp.gamma);
      return 2.0 * (1.0 + mp.alpha * mp.lambda) / mean;
    }
    case TslLimit::beta_zero:
      return 0.0;
    case TslLimit::n_inf:
      return 2.0 * mp.lambda * mp.alpha;
    case TslLimit::d_inf:
      return 0.0;
  }
  throw ValidationError("tsl_limits: unknown limit selector");
}

}  // namespace tsl::linreg
