/*
 * Copyright 2026 The ctxkgc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CTXKGC_PARALLEL_H_
#define CTXKGC_PARALLEL_H_

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace ctxkgc {

inline std::size_t ResolveWorkerCount(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Calls produce(i) for i in [0, count) on `workers` threads and consume(i, v)
// on the calling thread in strictly increasing i. At most `window` results
// are buffered. If produce throws at index i, every index below i is still
// consumed before the exception is rethrown; nothing at or after i is.
template <typename T, typename Produce, typename Consume>
void OrderedParallelFor(std::size_t count, std::size_t workers,
                        Produce&& produce, Consume&& consume,
                        std::size_t window = 1024) {
  workers = std::min(ResolveWorkerCount(workers), std::max<std::size_t>(count, 1));
  window = std::max(window, workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) consume(i, produce(i));
    return;
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::optional<T>> ring(window);
  std::size_t next = 0;
  std::size_t consumed = 0;
  std::size_t failed_at = kNone;
  std::exception_ptr failure;
  bool stop = false;

  auto work = [&] {
    for (;;) {
      std::size_t i;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stop || next >= count || next < consumed + window; });
        if (stop || next >= count) return;
        i = next++;
      }
      try {
        T value = produce(i);
        std::lock_guard lock(mu);
        ring[i % window].emplace(std::move(value));
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
        stop = true;
      }
      cv.notify_all();
    }
  };

  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);

  std::exception_ptr consume_failure;
  while (consumed < count) {
    std::optional<T> value;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] {
        return ring[consumed % window].has_value() || failed_at <= consumed;
      });
      if (failed_at <= consumed) break;
      value = std::move(ring[consumed % window]);
      ring[consumed % window].reset();
    }
    try {
      consume(consumed, std::move(*value));
    } catch (...) {
      consume_failure = std::current_exception();
      std::lock_guard lock(mu);
      stop = true;
    }
    {
      std::lock_guard lock(mu);
      ++consumed;
    }
    cv.notify_all();
    if (consume_failure) break;
  }
  {
    std::lock_guard lock(mu);
    stop = true;
  }
  cv.notify_all();
  threads.clear();
  if (consume_failure) std::rethrow_exception(consume_failure);
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ctxkgc

#endif  // CTXKGC_PARALLEL_H_
