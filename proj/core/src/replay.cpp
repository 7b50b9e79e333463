#include "irsrl/replay.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "irsrl/error.hpp"

namespace irsrl::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0) throw DomainError("ReplayBuffer: capacity must be >= 1");
  if (state_dim < 1 || action_dim < 1) throw DomainError("ReplayBuffer: dimensions must be >= 1");
}

void ReplayBuffer::push(const Transition& t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
      t.action.size() != action_dim_) {
    throw DimensionError(fmt::format("ReplayBuffer::push: expected state {} / action {}, got {} / {}",
                                     state_dim_, action_dim_, t.state.size(), t.action.size()));
  }
  const auto sd = static_cast<std::size_t>(state_dim_);
  const auto ad = static_cast<std::size_t>(action_dim_);
  if (size_ < capacity_ && head_ == size_) {
    states_.insert(states_.end(), t.state.data(), t.state.data() + sd);
    actions_.insert(actions_.end(), t.action.data(), t.action.data() + ad);
    rewards_.push_back(t.reward);
    next_states_.insert(next_states_.end(), t.next_state.data(), t.next_state.data() + sd);
  } else {
    std::copy_n(t.state.data(), sd, states_.begin() + static_cast<long>(head_ * sd));
    std::copy_n(t.action.data(), ad, actions_.begin() + static_cast<long>(head_ * ad));
    rewards_[head_] = t.reward;
    std::copy_n(t.next_state.data(), sd, next_states_.begin() + static_cast<long>(head_ * sd));
  }
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  ++pushed_;
}

std::size_t ReplayBuffer::physical(std::size_t logical) const {
  // Before wrapping, head_ == size_ and the oldest entry is slot 0.
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return (oldest + logical) % capacity_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw DomainError(fmt::format("ReplayBuffer::at: index {} >= size {}", i, size_));
  const std::size_t p = physical(i);
  const auto sd = static_cast<std::size_t>(state_dim_);
  const auto ad = static_cast<std::size_t>(action_dim_);
  Transition t;
  t.state = Eigen::Map<const Eigen::VectorXf>(states_.data() + p * sd, state_dim_);
  t.action = Eigen::Map<const Eigen::VectorXf>(actions_.data() + p * ad, action_dim_);
  t.reward = rewards_[p];
  t.next_state = Eigen::Map<const Eigen::VectorXf>(next_states_.data() + p * sd, state_dim_);
  return t;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (n == 0 || size_ < n) {
    throw DomainError(fmt::format("ReplayBuffer::sample: requested {} from {} stored", n, size_));
  }
  const auto sd = static_cast<std::size_t>(state_dim_);
  const auto ad = static_cast<std::size_t>(action_dim_);
  const auto cols = static_cast<Eigen::Index>(n);
  Batch b{Eigen::MatrixXf(state_dim_, cols), Eigen::MatrixXf(action_dim_, cols),
          Eigen::RowVectorXf(cols), Eigen::MatrixXf(state_dim_, cols)};
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const std::size_t p = pick(rng);
    b.states.col(c) = Eigen::Map<const Eigen::VectorXf>(states_.data() + p * sd, state_dim_);
    b.actions.col(c) = Eigen::Map<const Eigen::VectorXf>(actions_.data() + p * ad, action_dim_);
    b.rewards[c] = rewards_[p];
    b.next_states.col(c) = Eigen::Map<const Eigen::VectorXf>(next_states_.data() + p * sd, state_dim_);
  }
  return b;
}

double ReplayBuffer::mean_reward() const {
  if (size_ == 0) return 0.0;
  double sum = 0.0;
  for (float r : rewards_) sum += r;
  return sum / static_cast<double>(rewards_.size());
}

}  // namespace irsrl::agent
