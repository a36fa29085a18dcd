#include <map>

#include <gtest/gtest.h>

#include "llpt/rewire_queue.hpp"
#include "llpt/state_space.hpp"

using namespace llpt;

TEST(KeyLess, SecondComponentBreaksTies) { EXPECT_TRUE(key_less({3, 1}, {3, 2})); }
TEST(KeyLess, FirstComponentDominates) { EXPECT_TRUE(key_less({2, 9}, {3, 0})); }
TEST(KeyLess, Irreflexive) { EXPECT_FALSE(key_less({4, 4}, {4, 4})); }
TEST(KeyLess, InfinityOrdering) {
  EXPECT_TRUE(key_less({5, 5}, {kInfinity, kInfinity}));
  EXPECT_FALSE(key_less({kInfinity, kInfinity}, {kInfinity, kInfinity}));
}

TEST(RewireQueue, InsertPopOrder) {
  RewireQueue q;
  q.update(3, {5, 1});
  q.update(1, {2, 2});
  q.update(7, {2, 1});
  EXPECT_EQ(q.size(), 3u);
  EXPECT_EQ(q.top(), 7u);
  EXPECT_EQ(q.pop().first, 7u);
  EXPECT_EQ(q.pop().first, 1u);
  EXPECT_EQ(q.pop().first, 3u);
  EXPECT_TRUE(q.empty());
}

TEST(RewireQueue, ReprioritizeAndRemove) {
  RewireQueue q;
  q.update(0, {1, 0});
  q.update(1, {2, 0});
  q.update(2, {3, 0});
  q.update(0, {10, 0});
  EXPECT_EQ(q.top(), 1u);
  EXPECT_EQ(q.key_of(0), (Key{10, 0}));
  q.update(2, {0.5, 0});
  EXPECT_EQ(q.top(), 2u);
  q.remove(2);
  EXPECT_FALSE(q.contains(2));
  EXPECT_EQ(q.top(), 1u);
  q.remove(42);
  EXPECT_EQ(q.size(), 2u);
}

TEST(RewireQueue, RandomOperationsMatchShadowMap) {
  Rng rng(11);
  RewireQueue q;
  std::map<VertexId, Key> shadow;
  for (int step = 0; step < 20000; ++step) {
    const auto op = rng.next_u64() % 4;
    const auto v = static_cast<VertexId>(rng.next_u64() % 64);
    if (op <= 1) {
      const Key k{static_cast<double>(rng.next_u64() % 20), static_cast<double>(rng.next_u64() % 5)};
      q.update(v, k);
      shadow[v] = k;
    } else if (op == 2) {
      q.remove(v);
      shadow.erase(v);
    } else if (!shadow.empty()) {
      const Key top = q.top_key();
      for (const auto& [id, k] : shadow) EXPECT_FALSE(key_less(k, top));
      const auto [id, k] = q.pop();
      EXPECT_EQ(shadow.at(id), k);
      shadow.erase(id);
    }
    ASSERT_EQ(q.size(), shadow.size());
    for (VertexId x = 0; x < 64; ++x) {
      ASSERT_EQ(q.contains(x), shadow.count(x) == 1);
      if (q.contains(x)) {
        ASSERT_EQ(q.key_of(x), shadow.at(x));
      }
    }
  }
}
