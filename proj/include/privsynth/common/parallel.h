// Copyright 2026 The Privsynth Authors
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

#ifndef PRIVSYNTH_COMMON_PARALLEL_H_
#define PRIVSYNTH_COMMON_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

#include "absl/status/status.h"

namespace privsynth {

// Runs fn(i) for i in [0, n) on up to `max_workers` threads. Returns the
// error of the lowest failing index so the outcome does not depend on
// scheduling.
inline absl::Status ParallelFor(size_t n, int max_workers,
                                const std::function<absl::Status(size_t)>& fn) {
  std::vector<absl::Status> results(n);
  const size_t workers = std::min<size_t>(
      n, static_cast<size_t>(std::max(1, max_workers)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) {
      results[i] = fn(i);
      if (!results[i].ok()) return results[i];
    }
    return absl::OkStatus();
  }
  std::atomic<size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < n; i = next++) results[i] = fn(i);
      });
    }
  }
  for (auto& status : results) {
    if (!status.ok()) return status;
  }
  return absl::OkStatus();
}

inline int DefaultParallelism() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace privsynth

#endif  // PRIVSYNTH_COMMON_PARALLEL_H_
