// ldadnn/parallel.h

// Copyright 2026  The ldadnn Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LDADNN_PARALLEL_H_
#define LDADNN_PARALLEL_H_

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace ldadnn {

// Splits [0, n) into `threads` contiguous chunks and runs
// fn(chunk_index, begin, end) for each, on its own thread when threads > 1.
// Chunk boundaries depend only on n and threads, so callers that reduce
// per-chunk results in chunk order get the same answer on every run with the
// same thread count.  The first exception thrown by any chunk is rethrown.
template <typename Fn>
void ParallelChunks(size_t n, int threads, Fn &&fn) {
  const size_t chunks = std::max<size_t>(
      1, std::min<size_t>(static_cast<size_t>(std::max(threads, 1)), n));
  auto bounds = [&](size_t c) { return n * c / chunks; };
  if (chunks == 1) {
    fn(size_t{0}, size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (size_t c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c]() {
      try {
        fn(c, bounds(c), bounds(c + 1));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

inline size_t NumChunks(size_t n, int threads) {
  return std::max<size_t>(
      1, std::min<size_t>(static_cast<size_t>(std::max(threads, 1)), n));
}

}  // namespace ldadnn

#endif  // LDADNN_PARALLEL_H_
