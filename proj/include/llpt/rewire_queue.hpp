#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "llpt/lazy_graph.hpp"

namespace llpt {

/// Two-component queue priority, compared lexicographically.
struct Key {
  double k1 = kInfinity;
  double k2 = kInfinity;
  friend bool operator==(const Key&, const Key&) = default;
};

inline bool key_less(const Key& a, const Key& b) noexcept {
  return a.k1 < b.k1 || (a.k1 == b.k1 && a.k2 < b.k2);
}

/// Indexed binary min-heap over vertex ids with insert-or-reprioritize.
class RewireQueue {
 public:
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }

  bool contains(VertexId v) const noexcept { return v < pos_.size() && pos_[v] != kAbsent; }

  /// Inserts v with `key`, or moves it to `key` if already present.
  void update(VertexId v, Key key) {
    if (v >= pos_.size()) pos_.resize(static_cast<std::size_t>(v) + 1, kAbsent);
    if (pos_[v] == kAbsent) {
      heap_.push_back({v, key});
      pos_[v] = heap_.size() - 1;
      sift_up(pos_[v]);
      return;
    }
    const std::size_t i = pos_[v];
    const Key old = heap_[i].key;
    heap_[i].key = key;
    if (key_less(key, old)) {
      sift_up(i);
    } else {
      sift_down(i);
    }
  }

  const Key& top_key() const { return heap_.front().key; }
  VertexId top() const { return heap_.front().vertex; }

  std::pair<VertexId, Key> pop() {
    const Entry e = heap_.front();
    remove_at(0);
    return {e.vertex, e.key};
  }

  void remove(VertexId v) {
    if (contains(v)) remove_at(pos_[v]);
  }

  /// Key currently stored for v. Requires contains(v).
  const Key& key_of(VertexId v) const { return heap_[pos_[v]].key; }

  void clear() {
    heap_.clear();
    pos_.clear();
  }

 private:
  struct Entry {
    VertexId vertex;
    Key key;
  };
  static constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

  void remove_at(std::size_t i) {
    pos_[heap_[i].vertex] = kAbsent;
    const std::size_t last = heap_.size() - 1;
    if (i != last) {
      heap_[i] = heap_[last];
      pos_[heap_[i].vertex] = i;
      heap_.pop_back();
      const VertexId moved = heap_[i].vertex;
      sift_up(i);
      sift_down(pos_[moved]);
    } else {
      heap_.pop_back();
    }
  }

  void swap_entries(std::size_t a, std::size_t b) {
    std::swap(heap_[a], heap_[b]);
    pos_[heap_[a].vertex] = a;
    pos_[heap_[b].vertex] = b;
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!key_less(heap_[i].key, heap_[parent].key)) break;
      swap_entries(i, parent);
      i = parent;
    }
  }

  void sift_down(std::size_t i) {
    const std::size_t n = heap_.size();
    while (true) {
      std::size_t best = i;
      const std::size_t l = 2 * i + 1;
      const std::size_t r = l + 1;
      if (l < n && key_less(heap_[l].key, heap_[best].key)) best = l;
      if (r < n && key_less(heap_[r].key, heap_[best].key)) best = r;
      if (best == i) return;
      swap_entries(i, best);
      i = best;
    }
  }

  std::vector<Entry> heap_;
  std::vector<std::size_t> pos_;
};

}  // namespace llpt
