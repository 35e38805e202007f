// Copyright 2026 The densestereo Authors.
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

#ifndef DENSESTEREO_PARALLEL_H_
#define DENSESTEREO_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace densestereo {

// Splits [begin, end) into contiguous chunks, one per worker. Callers write
// to disjoint outputs only, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(int begin, int end, int threads, Fn&& fn) {
  int n = end - begin;
  if (n <= 0) return;
  int workers = std::clamp(threads, 1, n);
  if (workers == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    int lo = begin + static_cast<int>(static_cast<long>(n) * w / workers);
    int hi = begin + static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Process-wide worker count used by the library's data-parallel loops.
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{1};
  return threads;
}
inline void set_num_threads(int threads) {
  thread_setting() = std::max(1, threads);
}
inline int num_threads() { return thread_setting(); }

template <typename Fn>
void parallel_for(int begin, int end, Fn&& fn) {
  parallel_for(begin, end, num_threads(), std::forward<Fn>(fn));
}

}  // namespace densestereo

#endif  // DENSESTEREO_PARALLEL_H_
