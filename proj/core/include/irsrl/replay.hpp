#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "irsrl/rng.hpp"

namespace irsrl::agent {

struct Transition {
  Eigen::VectorXf state;
  Eigen::VectorXf action;
  float reward = 0.0f;
  Eigen::VectorXf next_state;
};

/// Column-major batch: one transition per column.
struct Batch {
  Eigen::MatrixXf states;
  Eigen::MatrixXf actions;
  Eigen::RowVectorXf rewards;
  Eigen::MatrixXf next_states;

  Eigen::Index size() const { return rewards.size(); }
};

/// Fixed-capacity FIFO of transitions. Storage grows on demand up to the
/// capacity, then the oldest entry is overwritten.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  void push(const Transition& t);

  /// Uniform with replacement. Throws DomainError if fewer than n entries are stored.
  Batch sample(std::size_t n, Rng& rng) const;

  /// Logical index: 0 is the oldest stored transition.
  Transition at(std::size_t i) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t total_pushed() const { return pushed_; }
  double mean_reward() const;

 private:
  std::size_t physical(std::size_t logical) const;

  std::size_t capacity_;
  int state_dim_;
  int action_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next write slot
  std::size_t pushed_ = 0;
  std::vector<float> states_;
  std::vector<float> actions_;
  std::vector<float> rewards_;
  std::vector<float> next_states_;
};

}  // namespace irsrl::agent
