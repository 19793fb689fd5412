#include "risjam/replay_buffer.hpp"

#include <stdexcept>
#include <string>

namespace risjam {

Batch make_batch(const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw std::invalid_argument("make_batch: empty transition list");
  const auto n = static_cast<Eigen::Index>(transitions.size());
  const auto& first = transitions.front();
  Batch b;
  b.states.resize(first.state.size(), n);
  b.actions.resize(first.action.size(), n);
  b.next_states.resize(first.next_state.size(), n);
  b.rewards.resize(n);
  b.not_terminal.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = transitions[static_cast<std::size_t>(i)];
    b.states.col(i) = t.state;
    b.actions.col(i) = t.action;
    b.next_states.col(i) = t.next_state;
    b.rewards[i] = t.reward;
    b.not_terminal[i] = t.terminal ? 0.0 : 1.0;
    b.indices.push_back(static_cast<std::size_t>(i));
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity),
      states_(state_dim, static_cast<Eigen::Index>(capacity)),
      actions_(action_dim, static_cast<Eigen::Index>(capacity)),
      next_states_(state_dim, static_cast<Eigen::Index>(capacity)),
      rewards_(static_cast<Eigen::Index>(capacity)),
      terminal_(capacity, false) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (t.state.size() != states_.rows() || t.next_state.size() != states_.rows() ||
      t.action.size() != actions_.rows()) {
    throw std::invalid_argument("ReplayBuffer::push: transition dimensions do not match the buffer");
  }
  const auto col = static_cast<Eigen::Index>(head_);
  states_.col(col) = t.state;
  actions_.col(col) = t.action;
  next_states_.col(col) = t.next_state;
  rewards_[col] = t.reward;
  terminal_[head_] = t.terminal;
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at: index " + std::to_string(i));
  const auto col = static_cast<Eigen::Index>(slot(i));
  return Transition{states_.col(col), actions_.col(col), rewards_[col], next_states_.col(col),
                    terminal_[static_cast<std::size_t>(col)]};
}

void ReplayBuffer::gather(std::size_t column, Batch& batch, Eigen::Index dst) const {
  const auto col = static_cast<Eigen::Index>(column);
  batch.states.col(dst) = states_.col(col);
  batch.actions.col(dst) = actions_.col(col);
  batch.next_states.col(dst) = next_states_.col(col);
  batch.rewards[dst] = rewards_[col];
  batch.not_terminal[dst] = terminal_[column] ? 0.0 : 1.0;
}

Batch ReplayBuffer::sample(std::size_t n, RandomStream& rng) const {
  if (n == 0 || size_ < n) {
    throw std::invalid_argument("ReplayBuffer::sample: requested " + std::to_string(n) + " from " +
                                std::to_string(size_) + " stored transitions");
  }
  const auto m = static_cast<Eigen::Index>(n);
  Batch b;
  b.states.resize(states_.rows(), m);
  b.actions.resize(actions_.rows(), m);
  b.next_states.resize(next_states_.rows(), m);
  b.rewards.resize(m);
  b.not_terminal.resize(m);
  b.indices.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform_index(size_));
    b.indices[k] = i;
    gather(slot(i), b, static_cast<Eigen::Index>(k));
  }
  return b;
}

}  // namespace risjam
