#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tsl/errors.hpp"

namespace tsl::quad {

/// Node/weight list; the integral is sum_i weights[i] * f(nodes[i]).
struct Scheme {
  std::vector<double> nodes;
  std::vector<double> weights;

  void append(const Scheme& other) {
    nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  }

  template <class F>
  double apply(F f) const {
    double acc = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double v = weights[i] * f(nodes[i]);
      const double t = acc + v;
      carry += (std::abs(acc) >= std::abs(v)) ? (acc - t) + v : (v - t) + acc;
      acc = t;
    }
    return acc + carry;
  }
};

/// Composite Simpson with n panels (n forced even) on [a, b].
inline Scheme composite_simpson(double a, double b, std::size_t n) {
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  Scheme s;
  const double h = (b - a) / static_cast<double>(n);
  s.nodes.resize(n + 1);
  s.weights.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    s.nodes[i] = a + static_cast<double>(i) * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s.weights[i] = w * h / 3.0;
  }
  s.nodes.back() = b;
  return s;
}

/// 16-point Gauss-Legendre on [a, b].
inline void append_gl16(Scheme& s, double a, double b) {
  static const double kX[8] = {
      0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
      0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
      0.94457502307323258, 0.98940093499164993};
  static const double kW[8] = {
      0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
      0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
      0.06225352393864789, 0.02715245941175409};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 7; i >= 0; --i) {
    s.nodes.push_back(mid - half * kX[i]);
    s.weights.push_back(half * kW[i]);
  }
  for (int i = 0; i < 8; ++i) {
    s.nodes.push_back(mid + half * kX[i]);
    s.weights.push_back(half * kW[i]);
  }
}

/// Integration scheme for integrands on [0, T] that decay on time scales as
/// short as 1/rate_max. When the uniform grid resolves the fastest scale a
/// single composite Simpson is used; otherwise a geometrically refined
/// Gauss-Legendre start section covers [0, T/10] below a Simpson remainder.
inline Scheme steep_start_scheme(double horizon, std::size_t n_quad,
                                 double rate_max) {
  Scheme s;
  if (!(horizon > 0.0)) return s;
  if (!(rate_max * horizon > 50.0)) {
    return composite_simpson(0.0, horizon, n_quad);
  }
  const double split = horizon / 10.0;
  const double lo = split * 1e-9;
  // trapezoid head over [0, lo]
  s.nodes = {0.0, lo};
  s.weights = {0.5 * lo, 0.5 * lo};
  // 32 geometric segments of 16-point Gauss-Legendre over [lo, split]
  const int segments = 32;
  const double ratio = std::pow(split / lo, 1.0 / segments);
  double left = lo;
  for (int seg = 0; seg < segments; ++seg) {
    const double right = (seg == segments - 1) ? split : left * ratio;
    append_gl16(s, left, right);
    left = right;
  }
  s.append(composite_simpson(split, horizon, n_quad));
  return s;
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(std::size_t n, std::vector<double>& x,
                           std::vector<double>& w) {
  if (n == 0) throw ValidationError("gauss_legendre: n must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root.
    double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace tsl::quad
