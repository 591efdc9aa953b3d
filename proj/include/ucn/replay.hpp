// Experience replay: fixed-capacity ring with FIFO eviction and uniform
// without-replacement mini-batch sampling.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ucn/rng.hpp"

namespace ucn {

struct Experience {
  Eigen::VectorXd s;
  int a = 0;
  Eigen::VectorXd s_next;
  double r = 0.0;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0)
      throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
    data_.reserve(capacity_);
  }

  void push(Experience e) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(e));
    } else {
      data_[head_] = std::move(e);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Logical index: 0 = oldest surviving experience.
  const Experience& operator[](std::size_t i) const {
    return data_[(head_ + i) % data_.size()];
  }

  void clear() {
    data_.clear();
    head_ = 0;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next eviction slot once full
  std::vector<Experience> data_;
};

// Uniform sample of batch_size distinct experiences.
inline std::vector<const Experience*> sample_batch(const ReplayBuffer& buf,
                                                   int batch_size, Rng& rng) {
  if (static_cast<std::size_t>(batch_size) > buf.size())
    throw std::invalid_argument("sample_batch: batch larger than buffer");
  const auto idx =
      rng.sample_indices(static_cast<int>(buf.size()), batch_size);
  std::vector<const Experience*> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(&buf[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace ucn
