#include "unilab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace unilab {

namespace {

std::atomic<int> g_workers{1};

template <typename T>
T pairwise(std::span<const T> v) {
  constexpr std::size_t kLeaf = 16;
  if (v.size() <= kLeaf) {
    T acc{};
    for (const T& x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

}  // namespace

int worker_count() noexcept { return g_workers.load(); }

void set_worker_count(int n) noexcept { g_workers.store(std::max(1, n)); }

void parallel_chunks(std::int64_t n_chunks,
                     const std::function<void(std::int64_t)>& body) {
  if (n_chunks <= 0) return;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(worker_count(), n_chunks));
  if (workers <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) body(c);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::mutex err_mutex;
  std::int64_t err_chunk = n_chunks;
  std::exception_ptr err;

  auto run = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        body(c);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (c < err_chunk) {
          err_chunk = c;
          err = std::current_exception();
        }
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (err) std::rethrow_exception(err);
}

double pairwise_sum(std::span<const double> values) {
  return pairwise<double>(values);
}

std::complex<double> pairwise_sum(
    std::span<const std::complex<double>> values) {
  return pairwise<std::complex<double>>(values);
}

}  // namespace unilab
