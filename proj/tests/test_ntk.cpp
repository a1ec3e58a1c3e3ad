#include <doctest.h>

#include <cmath>

#include "tsl/dynamics.hpp"
#include "tsl/ntk.hpp"
#include "tsl/rng.hpp"

using namespace tsl;
using namespace tsl::ntk;

namespace {

SpectralModel single_mode(double lam, double res_sq) {
  return SpectralModel({lam}, {res_sq});
}

SpectralModel power_law(double alpha, double delta, std::size_t n,
                        double scale = 1.0, double res_scale = 1.0) {
  PowerLawSpec spec;
  spec.alpha = alpha;
  spec.delta = delta;
  spec.scale = scale;
  spec.residue_scale = res_scale;
  spec.n = n;
  return build_power_law_spectrum(spec);
}

std::vector<double> log_grid(double lo, double hi, int pts) {
  std::vector<double> out(pts);
  for (int i = 0; i < pts; ++i) {
    out[i] = std::exp(std::log(lo) +
                      (std::log(hi) - std::log(lo)) * i / double(pts - 1));
  }
  return out;
}

}  // namespace

TEST_CASE("residue_at: decay per mode") {
  const auto model = SpectralModel({2.0, 1.0}, {1.0, 1.0});
  const auto at0 = residue_at(model, 0.0);
  CHECK(at0[0] == 1.0);
  CHECK(at0[1] == 1.0);
  const auto at1 = residue_at(model, 1.0);
  CHECK(at1[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(at1[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const auto half = residue_at(single_mode(1.0, 1.0), std::log(2.0));
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("displacement_sq: hand values") {
  const auto one = single_mode(1.0, 1.0);
  CHECK(displacement_sq(one, 0.0) == 0.0);
  CHECK(displacement_sq(one, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
  // lambda=2, residue_sq=3, e^{-lambda t} = 1/2
  const auto two = single_mode(2.0, 3.0);
  const double t = 0.5 * std::log(2.0);
  CHECK(displacement_sq(two, t) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(path_length_geo(two, t) == doctest::Approx(std::sqrt(0.375)).epsilon(1e-12));
}

TEST_CASE("loss_drop: hand values under the half convention") {
  const auto one = single_mode(1.0, 1.0);
  CHECK(loss_drop(one, 0.0) == 0.0);
  CHECK(loss_drop(one, 60.0) == doctest::Approx(0.5).epsilon(1e-12));
  const auto pair = SpectralModel({1.0, 1.0}, {1.0, 3.0});
  CHECK(loss_drop(pair, 60.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("inefficiency_ratio: limits and degeneracy") {
  const auto one = single_mode(1.0, 1.0);
  CHECK(inefficiency_ratio(one, 1e-6) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(inefficiency_ratio(one, 0.01) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(inefficiency_ratio(one, 100.0) == doctest::Approx(0.02).epsilon(1e-10));
  // two equal modes collapse to the single-mode value
  const auto twin = SpectralModel({1.0, 1.0}, {0.7, 0.7});
  for (double t : {0.1, 1.0, 10.0}) {
    CHECK(inefficiency_ratio(twin, t) ==
          doctest::Approx(inefficiency_ratio(one, t)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(inefficiency_ratio(SpectralModel({1.0}, {0.0}), 1.0),
                  ValidationError);
  // always a valid bound: ratio in (0, 1]
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    PowerLawSpec spec;
    spec.alpha = 0.2 + 3.0 * rng.uniform();
    spec.delta = 3.0 * rng.uniform();
    spec.n = 1 + static_cast<std::size_t>(rng.uniform() * 200);
    const auto model = build_power_law_spectrum(spec);
    const double t = std::pow(10.0, -2.0 + 5.0 * rng.uniform());
    const double ratio = inefficiency_ratio(model, t);
    CHECK(ratio > 0.0);
    CHECK(ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("path_length_gamma: single-mode closed form to 1e-8") {
  // closed form: residue * lambda^{-1/2} (1 - e^{-lambda t})
  for (double lam : {0.5, 1.0, 3.0}) {
    const auto model = single_mode(lam, 1.0);
    for (double t : {0.0, 0.1, 1.0, 5.0, 40.0, 200.0}) {
      const double exact = (1.0 - std::exp(-lam * t)) / std::sqrt(lam);
      CHECK(std::abs(path_length_gamma(model, t) - exact) <= 1e-8);
      CHECK(std::abs(path_length_gamma(model, t) - path_length_geo(model, t)) <=
            1e-8);
    }
  }
}

TEST_CASE("path_length_gamma: matches a brute-force integration") {
  // independent oracle: dense log-spaced trapezoid on the straight-loop
  // speed, 200k panels
  const auto model = power_law(1.5, 0.4, 100);
  const double t = 300.0;
  const int panels = 200000;
  const double lo = t * 1e-12;
  double brute = 0.5 * (reference::speed(model, 0.0) + reference::speed(model, lo)) * lo;
  double prev_s = lo;
  double prev_v = reference::speed(model, lo);
  const double ratio = std::pow(t / lo, 1.0 / panels);
  for (int i = 1; i <= panels; ++i) {
    const double s = (i == panels) ? t : lo * std::pow(ratio, i);
    const double v = reference::speed(model, s);
    brute += 0.5 * (prev_v + v) * (s - prev_s);
    prev_s = s;
    prev_v = v;
  }
  CHECK(path_length_gamma(model, t) == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("path_length_gamma: never shorter than the straight line") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    PowerLawSpec spec;
    spec.alpha = 0.3 + 2.0 * rng.uniform();
    spec.delta = 2.0 * rng.uniform();
    spec.n = 2 + static_cast<std::size_t>(rng.uniform() * 100);
    const auto model = build_power_law_spectrum(spec);
    const double t = std::pow(10.0, -1.0 + 4.0 * rng.uniform());
    CHECK(path_length_geo(model, t) <= path_length_gamma(model, t) + 1e-9);
  }
}

TEST_CASE("analytic sums match simulated gradient flow to 1e-6") {
  // diagonal potential A = diag(lambda), minimizer theta*, start offset
  // theta0_k - theta*_k = residue_k / sqrt(lambda_k)
  const std::size_t n = 40;
  const auto model = power_law(1.0, 0.5, n);
  const auto& lam = model.eigenvalues();
  const auto& res = model.residues_sq();
  Vector theta_star = Vector::Zero(n);
  Vector theta0(n);
  for (std::size_t k = 0; k < n; ++k) {
    theta0[k] = theta_star[k] + std::sqrt(res[k] / lam[k]);
  }
  const auto pot = QuadraticPotential::diagonal(lam, theta_star);
  dynamics::IntegratorConfig cfg;
  cfg.dt = 1e-3 / model.lambda_max();
  cfg.horizon = 3.0;
  const auto traj = dynamics::simulate_gradient_flow(pot, theta0, cfg);

  const double sim_disp = (traj.weights.back() - traj.weights.front()).squaredNorm();
  const double sim_drop = traj.losses.front() - traj.losses.back();
  CHECK(displacement_sq(model, cfg.horizon) ==
        doctest::Approx(sim_disp).epsilon(1e-6));
  CHECK(loss_drop(model, cfg.horizon) == doctest::Approx(sim_drop).epsilon(1e-6));
}

TEST_CASE("predicted_exponents: regimes and fields") {
  // interior optimal point
  const auto opt = predicted_exponents(2.0, 0.0);
  CHECK(opt.regime == ScalingRegime::optimal);
  CHECK(opt.w2_exponent == doctest::Approx(1.5));
  CHECK(opt.entropy_exponent == doctest::Approx(0.5));
  CHECK(opt.tsl_exponent == doctest::Approx(1.0));
  CHECK(opt.length_exponent == doctest::Approx(0.75));

  // suboptimal
  const auto sub = predicted_exponents(1.0, 1.5);
  CHECK(sub.regime == ScalingRegime::suboptimal);
  CHECK(sub.w2_exponent == doctest::Approx(0.5));
  CHECK(sub.entropy_exponent == doctest::Approx(0.0));
  CHECK(sub.tsl_exponent == doctest::Approx(0.5));
  CHECK(sub.length_exponent == doctest::Approx(0.25));

  // threshold delta = 1
  CHECK(predicted_exponents(1.0, 1.0).regime == ScalingRegime::boundary);

  // e = 1: validity edge of the power laws (log corrections); the formulaic
  // exponents are still reported
  const auto edge = predicted_exponents(1.0, 0.0);
  CHECK(edge.regime == ScalingRegime::out_of_domain);
  CHECK(edge.w2_exponent == doctest::Approx(2.0));
  CHECK(edge.entropy_exponent == doctest::Approx(1.0));
  CHECK(edge.tsl_exponent == doctest::Approx(1.0));
  CHECK(edge.length_exponent == doctest::Approx(1.0));

  CHECK(predicted_exponents(0.5, 3.0).regime == ScalingRegime::out_of_domain);
  CHECK_THROWS_AS(predicted_exponents(-1.0, 0.0), ValidationError);
}

TEST_CASE("fit_loglog_slope: exact, constant, and noisy power laws") {
  CHECK(fit_loglog_slope({1.0, 2.0, 4.0, 8.0}, {1.0, 4.0, 16.0, 64.0}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit_loglog_slope({1.0, 2.0, 3.0}, {5.0, 5.0, 5.0}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  Rng rng(41);
  std::vector<double> ts, ys;
  for (int i = 0; i < 40; ++i) {
    const double t = std::pow(10.0, i / 10.0);
    ts.push_back(t);
    ys.push_back(3.0 * std::sqrt(t) * (1.0 + 0.01 * rng.normal()));
  }
  CHECK(fit_loglog_slope(ts, ys) == doctest::Approx(0.5).epsilon(0.04));
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}),
                  ValidationError);
}

TEST_CASE("scaling sweep: interior optimal regime matches predictions") {
  const auto model = power_law(2.0, 0.0, 20000);
  const auto ts = log_grid(1e2, 1e4, 16);
  const auto rows = evaluate_sweep(model, ts, 2048);
  std::vector<double> w2s, ents, tsls, lgams, lgeos;
  for (const auto& row : rows) {
    w2s.push_back(row.w2_sq);
    ents.push_back(row.entropy);
    tsls.push_back(row.t_sl);
    lgams.push_back(row.l_gamma);
    lgeos.push_back(row.l_geo);
  }
  const auto pred = predicted_exponents(2.0, 0.0);
  CHECK(std::abs(fit_loglog_slope(ts, w2s) - pred.w2_exponent) <= 0.05);
  CHECK(std::abs(fit_loglog_slope(ts, ents) - pred.entropy_exponent) <= 0.05);
  CHECK(std::abs(fit_loglog_slope(ts, tsls) - pred.tsl_exponent) <= 0.05);
  const double s_gam = fit_loglog_slope(ts, lgams);
  const double s_geo = fit_loglog_slope(ts, lgeos);
  CHECK(std::abs(s_gam - s_geo) <= 0.03);
  CHECK(std::abs(s_gam - pred.length_exponent) <= 0.05);
  CHECK(std::abs(s_geo - pred.length_exponent) <= 0.05);
}

TEST_CASE("scaling sweep: suboptimal regime matches predictions") {
  const auto model = power_law(1.0, 1.5, 100000);
  const auto ts = log_grid(1e2, 1e4, 16);
  std::vector<double> ents, tsls;
  for (double t : ts) {
    const double w2 = displacement_sq(model, t);
    const double drop = loss_drop(model, t);
    ents.push_back(drop);
    tsls.push_back(w2 / drop);
  }
  const auto pred = predicted_exponents(1.0, 1.5);
  CHECK(std::abs(fit_loglog_slope(ts, ents) - pred.entropy_exponent) <= 0.1);
  CHECK(std::abs(fit_loglog_slope(ts, tsls) - pred.tsl_exponent) <= 0.1);
}

TEST_CASE("blocked kernels agree with the straight-loop reference") {
  const auto model = power_law(1.0, 0.5, 50000);
  for (double t : {0.5, 50.0, 5000.0}) {
    CHECK(displacement_sq(model, t) ==
          doctest::Approx(reference::displacement_sq(model, t)).epsilon(1e-12));
    CHECK(loss_drop(model, t) ==
          doctest::Approx(reference::loss_drop(model, t)).epsilon(1e-12));
  }
}
