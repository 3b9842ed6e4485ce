// Copyright (c) 2026 The S2AP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace s2ap {

/// Runs fn(begin, end) over [0, n) split into at most `workers` contiguous
/// blocks. Each index is visited by exactly one block, so any per-index
/// output is independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  const std::size_t blocks =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (blocks == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  // Exceptions are carried out of the workers and rethrown lowest block first.
  std::vector<std::exception_ptr> errors(blocks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(blocks - 1);
    const std::size_t chunk = (n + blocks - 1) / blocks;
    auto run = [&fn, &errors](std::size_t b, std::size_t begin, std::size_t end) {
      try {
        fn(begin, end);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    };
    for (std::size_t b = 1; b < blocks; ++b) {
      const std::size_t begin = b * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run, b, begin, end);
    }
    run(0, 0, std::min(n, chunk));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace s2ap
