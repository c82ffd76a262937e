#pragma once

// Reusable min-heap and generation-stamped distance array. Both avoid
// reallocation across searches so query scratch space can be recycled.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "chtnr/types.hpp"

namespace chtnr {

template <typename Key, typename Value>
class MinHeap {
  public:
    using Entry = std::pair<Key, Value>;

    bool empty() const { return heap_.empty(); }
    void clear() { heap_.clear(); }
    const Entry& top() const { return heap_.front(); }

    void push(Key k, Value v) {
        heap_.emplace_back(k, v);
        std::push_heap(heap_.begin(), heap_.end(), std::greater<Entry>{});
    }

    Entry pop() {
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<Entry>{});
        Entry e = heap_.back();
        heap_.pop_back();
        return e;
    }

  private:
    std::vector<Entry> heap_;
};

// Distance array that resets in O(1) by bumping a generation counter.
class StampedWeights {
  public:
    void resize(size_t n) {
        val_.assign(n, INF_WEIGHT);
        stamp_.assign(n, 0);
        gen_ = 1;
    }

    void reset() {
        if (++gen_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0u);
            gen_ = 1;
        }
    }

    size_t size() const { return val_.size(); }
    bool has(NodeId v) const { return stamp_[v] == gen_; }
    Weight get(NodeId v) const { return has(v) ? val_[v] : INF_WEIGHT; }

    void set(NodeId v, Weight w) {
        val_[v] = w;
        stamp_[v] = gen_;
    }

  private:
    std::vector<Weight> val_;
    std::vector<uint32_t> stamp_;
    uint32_t gen_ = 0;
};

} // namespace chtnr
