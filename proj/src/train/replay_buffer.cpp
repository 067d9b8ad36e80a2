#include "tow/train/replay_buffer.hpp"

#include <stdexcept>

namespace tow::train {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(TransitionRecord record) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(record));
    return;
  }
  data_[head_] = std::move(record);
  head_ = (head_ + 1) % capacity_;
}

const TransitionRecord& ReplayBuffer::at(std::size_t i) const {
  if (i >= data_.size()) throw std::out_of_range("ReplayBuffer::at");
  return data_[(head_ + i) % data_.size()];
}

std::vector<TransitionRecord> ReplayBuffer::sample(std::size_t n, game::SplitMix64& rng) const {
  if (data_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  std::vector<TransitionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(data_[rng.next() % data_.size()]);
  return out;
}

std::vector<TransitionRecord> ReplayBuffer::contents() const {
  std::vector<TransitionRecord> out;
  out.reserve(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) out.push_back(at(i));
  return out;
}

}  // namespace tow::train
