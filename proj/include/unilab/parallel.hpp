#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace unilab {

/// Process-wide worker count used by the grid and Monte Carlo drivers.
/// Results never depend on it: work is split into chunks whose layout is a
/// function of the problem size only.
int worker_count() noexcept;
void set_worker_count(int n) noexcept;

/// Runs body(chunk_index) for chunk_index in [0, n_chunks) on up to
/// worker_count() threads. Exceptions from any chunk are rethrown
/// (lowest chunk index wins).
void parallel_chunks(std::int64_t n_chunks,
                     const std::function<void(std::int64_t)>& body);

/// Fixed-order pairwise (tree) summation. The reduction tree depends only on
/// values.size(), so the result is bit-identical however the values were
/// produced.
double pairwise_sum(std::span<const double> values);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);

}  // namespace unilab
