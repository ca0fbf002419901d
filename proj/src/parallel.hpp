#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include "agaf/common.hpp"

namespace agaf::detail {

// Runs f(i) for i in [0, n). Each index owns its output slot, so the caller's
// reduction over slots is deterministic whatever the thread count.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace agaf::detail
