#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsl::kernels {

/// Fixed block length for reductions. Summation is always performed as
/// per-block Neumaier-compensated partial sums combined in block order, so
/// the result is bit-identical for any thread count (including serial).
inline constexpr std::size_t kBlock = 4096;

/// Neumaier-compensated accumulator.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + carry; }
};

/// Straight uncompensated loop; kept as the reference implementation the
/// parallel kernels are tested against.
template <class Term>
double sum_serial_reference(std::size_t n, Term term) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += term(i);
  return acc;
}

/// Blocked compensated sum of term(0..n-1).
///
/// `parallel` only distributes whole blocks across OpenMP threads; the block
/// decomposition and the final combine order never change, so serial and
/// parallel execution produce the same bits.
template <class Term>
double sum_compensated(std::size_t n, Term term, bool parallel = true) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks);

  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    Compensated acc;
    for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
    partial[b] = acc.value();
  };

#ifdef _OPENMP
  if (parallel && nblocks > 1) {
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
      run_block(static_cast<std::size_t>(b));
    }
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  }
#else
  (void)parallel;
  for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
#endif

  Compensated total;
  for (double p : partial) total.add(p);
  return total.value();
}

/// Blocked compensated accumulation of a vector-valued term into `out`
/// (out[j] = sum_i term(i, j)). Used by the quadrature kernels that need one
/// accumulator per node. Deterministic under the same block rules.
template <class Term>
void sum_compensated_multi(std::size_t n, std::size_t width, Term term,
                           std::vector<double>& out, bool parallel = true) {
  out.assign(width, 0.0);
  if (n == 0 || width == 0) return;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partial(nblocks);

  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    std::vector<Compensated> acc(width);
    for (std::size_t i = lo; i < hi; ++i) term(i, acc);
    auto& slot = partial[b];
    slot.resize(width);
    for (std::size_t j = 0; j < width; ++j) slot[j] = acc[j].value();
  };

#ifdef _OPENMP
  if (parallel && nblocks > 1) {
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
      run_block(static_cast<std::size_t>(b));
    }
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  }
#else
  (void)parallel;
  for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
#endif

  std::vector<Compensated> total(width);
  for (const auto& slot : partial) {
    for (std::size_t j = 0; j < width; ++j) total[j].add(slot[j]);
  }
  for (std::size_t j = 0; j < width; ++j) out[j] = total[j].value();
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace tsl::kernels
