#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace raker {

// OpenMP loop over [0, n) that rethrows the first exception on the calling
// thread. Runs serially when the estimated work is below the threshold.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t work, std::size_t threshold, Fn&& fn) {
  if (n < 2 || work < threshold) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace raker
