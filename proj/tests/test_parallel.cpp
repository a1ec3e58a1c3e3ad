#include <doctest.h>

#include <cmath>

#include "tsl/core.hpp"
#include "tsl/kernels.hpp"
#include "tsl/ntk.hpp"
#include "tsl/rng.hpp"

using namespace tsl;

TEST_CASE("sum_compensated: serial and parallel produce identical bits") {
  Rng rng(2024);
  std::vector<double> terms(300000);
  for (auto& v : terms) v = std::exp(20.0 * (rng.uniform() - 0.5)) * rng.normal();
  auto term = [&](std::size_t i) { return terms[i]; };
  const double serial = kernels::sum_compensated(terms.size(), term, false);
  const double parallel = kernels::sum_compensated(terms.size(), term, true);
  CHECK(serial == parallel);  // exact bit equality
}

TEST_CASE("sum_compensated: compensation beats the straight loop") {
  // large head cancelled by a long tail of tiny opposite-sign terms
  const std::size_t n = 1000001;
  auto term = [&](std::size_t i) {
    if (i == 0) return 1e16;
    if (i == 1) return -1e16;
    return 1e-3;
  };
  const double exact = 1e-3 * static_cast<double>(n - 2);
  const double compensated = kernels::sum_compensated(n, term, true);
  CHECK(compensated == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("sum_compensated_multi: deterministic across thread modes") {
  const std::size_t n = 50000, width = 37;
  auto term = [&](std::size_t i, std::vector<kernels::Compensated>& acc) {
    for (std::size_t j = 0; j < width; ++j) {
      acc[j].add(std::sin(0.001 * static_cast<double>(i * (j + 1))));
    }
  };
  std::vector<double> serial, parallel;
  kernels::sum_compensated_multi(n, width, term, serial, false);
  kernels::sum_compensated_multi(n, width, term, parallel, true);
  REQUIRE(serial.size() == width);
  for (std::size_t j = 0; j < width; ++j) CHECK(serial[j] == parallel[j]);
}

TEST_CASE("ntk kernels: serial/parallel bit equality on a large spectrum") {
  PowerLawSpec spec;
  spec.alpha = 1.0;
  spec.delta = 0.5;
  spec.n = 200000;
  const auto model = build_power_law_spectrum(spec);
  for (double t : {1.0, 100.0, 5000.0}) {
    CHECK(ntk::detail::displacement_sq(model, t, false) ==
          ntk::detail::displacement_sq(model, t, true));
    CHECK(ntk::detail::loss_drop(model, t, false) ==
          ntk::detail::loss_drop(model, t, true));
  }
  CHECK(ntk::detail::path_length_gamma(model, 500.0, 1024, false) ==
        ntk::detail::path_length_gamma(model, 500.0, 1024, true));
}
