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

#include "hfuzz/bounded_queue.h"

#include <chrono>
#include <thread>
#include <vector>

#include "gtest/gtest.h"

namespace hfuzz {
namespace {

TEST(BoundedQueueTest, TryPushRejectsWhenFull) {
  BoundedQueue<int> q(2);
  EXPECT_TRUE(q.TryPush(1));
  EXPECT_TRUE(q.TryPush(2));
  EXPECT_FALSE(q.TryPush(3));
  EXPECT_EQ(q.counters().rejected, 1u);
  EXPECT_EQ(q.TryPop(), 1);
  EXPECT_EQ(q.TryPop(), 2);
  EXPECT_EQ(q.TryPop(), std::nullopt);
}

TEST(BoundedQueueTest, PopForTimesOut) {
  BoundedQueue<int> q(1);
  EXPECT_EQ(q.PopFor(std::chrono::milliseconds(5)), std::nullopt);
}

TEST(BoundedQueueTest, CloseWakesWaitersAndDrainsLeftovers) {
  BoundedQueue<int> q(1);
  ASSERT_TRUE(q.TryPush(7));
  std::thread pusher([&] { EXPECT_FALSE(q.Push(8)); });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  q.Close();
  pusher.join();
  EXPECT_EQ(q.Pop(), 7);
  EXPECT_EQ(q.Pop(), std::nullopt);
  EXPECT_FALSE(q.TryPush(9));
}

TEST(BoundedQueueTest, ProducerConsumerKeepsOrder) {
  BoundedQueue<int> q(3);
  constexpr int kN = 5000;
  std::thread producer([&] {
    for (int i = 0; i < kN; ++i) ASSERT_TRUE(q.Push(i));
    q.Close();
  });
  std::vector<int> got;
  while (auto v = q.Pop()) got.push_back(*v);
  producer.join();
  ASSERT_EQ(got.size(), static_cast<size_t>(kN));
  for (int i = 0; i < kN; ++i) EXPECT_EQ(got[i], i);
  EXPECT_EQ(q.counters().pushed, q.counters().popped);
}

}  // namespace
}  // namespace hfuzz
