#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "risjam/rng.hpp"

namespace risjam {

/// One experience tuple (s, a, r, s', terminal).
struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

/// Column-per-sample minibatch.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd not_terminal;  // 1 keeps the bootstrap term, 0 drops it
  std::vector<std::size_t> indices;

  Eigen::Index size() const { return rewards.size(); }
};

Batch make_batch(const std::vector<Transition>& transitions);

/// Fixed-capacity ring; the oldest transition is evicted first.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  /// i = 0 is the oldest stored transition.
  Transition at(std::size_t i) const;
  /// Uniform sampling with replacement. Throws if size() < n.
  Batch sample(std::size_t n, RandomStream& rng) const;

 private:
  std::size_t slot(std::size_t i) const { return (head_ + capacity_ - size_ + i) % capacity_; }
  void gather(std::size_t column, Batch& batch, Eigen::Index dst) const;

  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next write position
  Eigen::MatrixXd states_;
  Eigen::MatrixXd actions_;
  Eigen::MatrixXd next_states_;
  Eigen::VectorXd rewards_;
  std::vector<bool> terminal_;
};

}  // namespace risjam
