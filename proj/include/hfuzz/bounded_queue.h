// Copyright 2026 The hfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HFUZZ_BOUNDED_QUEUE_H_
#define HFUZZ_BOUNDED_QUEUE_H_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>

namespace hfuzz {

// Fixed-capacity FIFO shared between worker threads. TryPush/TryPop never
// block; Push waits for space and Pop waits for an item, both returning early
// once the queue is closed.
template <typename T>
class BoundedQueue {
 public:
  struct Counters {
    uint64_t pushed = 0;
    uint64_t popped = 0;
    uint64_t rejected = 0;  // TryPush on a full or closed queue
  };

  explicit BoundedQueue(size_t capacity) : capacity_(capacity) {}

  BoundedQueue(const BoundedQueue&) = delete;
  BoundedQueue& operator=(const BoundedQueue&) = delete;

  bool TryPush(T item) {
    {
      std::lock_guard lock(mu_);
      if (closed_ || items_.size() >= capacity_) {
        ++counters_.rejected;
        return false;
      }
      items_.push_back(std::move(item));
      ++counters_.pushed;
    }
    not_empty_.notify_one();
    return true;
  }

  // False if the queue was closed before space became available.
  bool Push(T item) {
    {
      std::unique_lock lock(mu_);
      not_full_.wait(lock,
                     [this] { return closed_ || items_.size() < capacity_; });
      if (closed_) {
        ++counters_.rejected;
        return false;
      }
      items_.push_back(std::move(item));
      ++counters_.pushed;
    }
    not_empty_.notify_one();
    return true;
  }

  std::optional<T> TryPop() {
    std::lock_guard lock(mu_);
    return PopLocked();
  }

  // nullopt once the queue is closed and drained.
  std::optional<T> Pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [this] { return closed_ || !items_.empty(); });
    return PopLocked();
  }

  // nullopt on timeout as well.
  template <typename Rep, typename Period>
  std::optional<T> PopFor(std::chrono::duration<Rep, Period> timeout) {
    std::unique_lock lock(mu_);
    not_empty_.wait_for(lock, timeout,
                        [this] { return closed_ || !items_.empty(); });
    return PopLocked();
  }

  void Close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }
  size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }
  size_t capacity() const { return capacity_; }
  Counters counters() const {
    std::lock_guard lock(mu_);
    return counters_;
  }

 private:
  std::optional<T> PopLocked() {
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    ++counters_.popped;
    not_full_.notify_one();
    return item;
  }

  const size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
  Counters counters_;
};

}  // namespace hfuzz

#endif  // HFUZZ_BOUNDED_QUEUE_H_
