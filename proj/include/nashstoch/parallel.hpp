// Copyright 2026 The NashStoch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NASHSTOCH_PARALLEL_HPP_
#define NASHSTOCH_PARALLEL_HPP_

// Index-parallel loops. Work item i always writes its own output slot, so
// results are identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nashstoch/errors.hpp"

namespace nashstoch {

// Worker count from NASHSTOCH_THREADS, else the hardware concurrency.
inline int DefaultThreads() {
  if (const char* env = std::getenv("NASHSTOCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ValidationError("NASHSTOCH_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls f(i) for i in [0, count) on up to `threads` workers. If any call
// throws, the exception from the lowest failing index is rethrown.
template <typename F>
void ParallelFor(std::int64_t count, int threads, F&& f) {
  if (count <= 0) return;
  threads = static_cast<int>(std::min<std::int64_t>(std::max(threads, 1), count));
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex mu;
  std::int64_t failed_index = count;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nashstoch

#endif  // NASHSTOCH_PARALLEL_HPP_
