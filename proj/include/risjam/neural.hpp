#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "risjam/rng.hpp"

namespace risjam {

/// A gradient or loss that is NaN/Inf; the update that produced it is refused.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { relu, tanh, identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

class Mlp;

/// Activations saved by a forward pass; only valid for the network (and
/// parameter revision) that produced it.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;   // input of each layer
  std::vector<Eigen::MatrixXd> outputs;  // post-activation output of each layer
  const Mlp* owner = nullptr;
  std::uint64_t revision = 0;
};

struct Gradients {
  std::vector<DenseLayer> layers;
  Eigen::MatrixXd input;
};

/// Fully-connected network. Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> dims, Activation hidden, Activation output);

  /// Uniform fan-in initialisation, U(-1/sqrt(fan_in), 1/sqrt(fan_in)). A
  /// positive `output_scale` instead draws the last layer from
  /// U(-output_scale, output_scale).
  void initialize(RandomStream& rng, double output_scale = 0.0);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, ForwardCache& cache) const;

  /// Backpropagates d(sum_ij G_ij * out_ij) for output gradient G. With
  /// `parameter_grads` false only the input gradient is produced.
  Gradients backward(const ForwardCache& cache, const Eigen::MatrixXd& output_grad,
                     bool parameter_grads = true) const;

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }
  std::size_t layer_count() const { return layers_.size(); }
  const DenseLayer& layer(std::size_t i) const { return layers_[i]; }
  DenseLayer& mutable_layer(std::size_t i);
  std::size_t parameter_count() const;
  bool same_shape(const Mlp& other) const;
  bool all_finite() const;

 private:
  std::vector<int> dims_;
  Activation hidden_ = Activation::relu;
  Activation output_ = Activation::identity;
  std::vector<DenseLayer> layers_;
  std::uint64_t revision_ = 0;
};

enum class OptimizerKind { adam, sgd };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<DenseLayer> first_moment;
  std::vector<DenseLayer> second_moment;

  static OptimizerState for_network(const Mlp& net, double learning_rate,
                                    OptimizerKind kind = OptimizerKind::adam);
};

/// One descent step. Throws NonFiniteError (leaving everything untouched)
/// if any gradient entry is not finite.
void apply_update(Mlp& net, const Gradients& grads, OptimizerState& opt);

/// target <- tau * online + (1 - tau) * target.
void soft_update(Mlp& target, const Mlp& online, double tau);

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OptimizerState& opt);
OptimizerState optimizer_from_json(const nlohmann::json& j);

}  // namespace risjam
