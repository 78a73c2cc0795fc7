#include "tanhshift/replay_buffer.hpp"

#include <stdexcept>
#include <utility>

namespace tanhshift {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay buffer: capacity must be > 0");
    slots_.resize(capacity_);
}

void ReplayBuffer::push(Transition t) {
    slots_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("replay buffer: index out of range");
    const std::size_t oldest = (next_ + capacity_ - size_) % capacity_;
    return slots_[(oldest + i) % capacity_];
}

std::size_t ReplayBuffer::sample_index(Rng& rng) const {
    if (size_ == 0) throw std::logic_error("replay buffer: cannot sample from empty buffer");
    return rng.index(size_);
}

const Transition& ReplayBuffer::sample(Rng& rng) const { return at(sample_index(rng)); }

}  // namespace tanhshift
