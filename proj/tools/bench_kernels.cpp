// Benchmark comparing the straight-loop reference kernels against the
// blocked deterministic kernels, serial and OpenMP-parallel.

#include <chrono>
#include <cstdio>

#include "tsl/core.hpp"
#include "tsl/kernels.hpp"
#include "tsl/ntk.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F f, int repeats, double* result) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    *result = f();
    const auto stop = Clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", tsl::kernels::max_threads());

  tsl::PowerLawSpec spec;
  spec.alpha = 1.0;
  spec.delta = 0.5;
  spec.n = 1000000;
  const auto model = tsl::build_power_law_spectrum(spec);
  const double t = 1e3;

  double ref = 0.0, serial = 0.0, parallel = 0.0;
  double ms;

  std::printf("\ndisplacement_sq, %zu modes:\n", model.size());
  ms = time_ms([&] { return tsl::ntk::reference::displacement_sq(model, t); }, 3, &ref);
  std::printf("  reference (straight loop)  %8.2f ms  -> %.12e\n", ms, ref);
  ms = time_ms([&] { return tsl::ntk::detail::displacement_sq(model, t, false); }, 3,
               &serial);
  std::printf("  blocked serial             %8.2f ms  -> %.12e\n", ms, serial);
  ms = time_ms([&] { return tsl::ntk::detail::displacement_sq(model, t, true); }, 3,
               &parallel);
  std::printf("  blocked parallel           %8.2f ms  -> %.12e\n", ms, parallel);
  std::printf("  serial == parallel bits: %s\n",
              serial == parallel ? "yes" : "NO (bug)");

  std::printf("\npath_length_gamma, %zu modes, t = %.0f:\n", model.size(), t);
  ms = time_ms([&] { return tsl::ntk::detail::path_length_gamma(model, t, 4096, false); },
               2, &serial);
  std::printf("  blocked serial             %8.2f ms  -> %.12e\n", ms, serial);
  ms = time_ms([&] { return tsl::ntk::detail::path_length_gamma(model, t, 4096, true); },
               2, &parallel);
  std::printf("  blocked parallel           %8.2f ms  -> %.12e\n", ms, parallel);
  std::printf("  serial == parallel bits: %s\n",
              serial == parallel ? "yes" : "NO (bug)");
  return 0;
}
