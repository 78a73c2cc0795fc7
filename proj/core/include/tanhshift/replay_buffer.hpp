#pragma once

#include <cstddef>
#include <vector>

#include "tanhshift/random.hpp"

namespace tanhshift {

struct Transition {
    std::vector<double> s;
    std::vector<double> a;
    double r = 0.0;
    std::vector<double> s_next;
    bool done = false;
};

/// Fixed-capacity FIFO store with uniform random sampling. Once full, each
/// push evicts the oldest transition.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return size_; }

    void push(Transition t);

    // i-th stored transition in age order: at(0) is the oldest.
    const Transition& at(std::size_t i) const;

    std::size_t sample_index(Rng& rng) const;
    const Transition& sample(Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::size_t next_ = 0;  // slot the next push writes
    std::vector<Transition> slots_;
};

}  // namespace tanhshift
