//
// Copyright 2026 The gazedp Authors
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
//

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gazedp {

// Degree of parallelism for per-pixel and per-trial loops. Zero means one
// worker per hardware thread. Results never depend on this value.
struct Parallelism {
  unsigned threads = 1;

  unsigned Resolve() const {
    if (threads != 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

namespace detail {

// Calls body(begin, end) over disjoint chunks of [0, count). Loops shorter
// than min_parallel run inline. The first exception thrown by any worker is
// rethrown on the calling thread.
template <typename Body>
void ParallelFor(std::size_t count, Parallelism par, Body&& body,
                 std::size_t min_parallel = 1024) {
  const std::size_t workers =
      std::min<std::size_t>(par.Resolve(), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < min_parallel) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail
}  // namespace gazedp
