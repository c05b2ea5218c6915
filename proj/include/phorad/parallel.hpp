// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 phorad contributors

#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace phorad {

// Worker cap: PHORAD_THREADS if set, else hardware concurrency.
inline unsigned thread_cap() {
  if (const char* env = std::getenv("PHORAD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1)
      return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Static block partition of [0, n); fn(i) must be independent per index.
// Results are written by index by the caller, so the schedule cannot affect
// the output.
template <typename F>
inline void parallel_for(std::size_t n, F&& fn) {
  const unsigned workers = std::min<std::size_t>(thread_cap(), n ? n : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, w, &fn, &errors] {
      try {
        for (std::size_t i = lo; i < hi; ++i)
          fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool)
    t.join();
  for (const std::exception_ptr& e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace phorad
