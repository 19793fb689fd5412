#include "risjam/neural.hpp"

#include <cmath>

namespace risjam {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

namespace {

void activate(Eigen::MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::tanh: z = z.array().tanh(); break;
    case Activation::identity: break;
  }
}

// Gradient through the activation, expressed with the activation output.
Eigen::MatrixXd activation_grad(const Eigen::MatrixXd& out, const Eigen::MatrixXd& grad, Activation a) {
  switch (a) {
    case Activation::relu: return (out.array() > 0.0).select(grad, 0.0);
    case Activation::tanh: return grad.array() * (1.0 - out.array().square());
    case Activation::identity: return grad;
  }
  return grad;
}

}  // namespace

Mlp::Mlp(std::vector<int> dims, Activation hidden, Activation output)
    : dims_(std::move(dims)), hidden_(hidden), output_(output) {
  if (dims_.size() < 2) throw std::invalid_argument("Mlp needs at least an input and an output dimension");
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("Mlp layer dimensions must be positive");
  }
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]), Eigen::VectorXd::Zero(dims_[l + 1])});
  }
}

void Mlp::initialize(RandomStream& rng, double output_scale) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const bool last = l + 1 == layers_.size();
    const double bound = (last && output_scale > 0.0) ? output_scale : 1.0 / std::sqrt(double(dims_[l]));
    auto& layer = layers_[l];
    // Row-major draw order so the result does not depend on storage order.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = rng.uniform(-bound, bound);
  }
  ++revision_;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  if (input.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    activate(z, l + 1 == layers_.size() ? output_ : hidden_);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, ForwardCache& cache) const {
  if (input.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  cache.inputs.resize(layers_.size());
  cache.outputs.resize(layers_.size());
  cache.owner = this;
  cache.revision = revision_;
  const Eigen::MatrixXd* a = &input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    cache.inputs[l] = *a;
    Eigen::MatrixXd& z = cache.outputs[l];
    z.noalias() = layers_[l].weight * *a;
    z.colwise() += layers_[l].bias;
    activate(z, l + 1 == layers_.size() ? output_ : hidden_);
    a = &z;
  }
  return cache.outputs.back();
}

Gradients Mlp::backward(const ForwardCache& cache, const Eigen::MatrixXd& output_grad,
                        bool parameter_grads) const {
  if (cache.owner != this || cache.revision != revision_ || cache.outputs.size() != layers_.size()) {
    throw std::logic_error("Mlp::backward: stale or foreign forward cache");
  }
  if (output_grad.rows() != output_dim() || output_grad.cols() != cache.outputs.back().cols()) {
    throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");
  }
  Gradients g;
  if (parameter_grads) g.layers.resize(layers_.size());
  Eigen::MatrixXd upstream = output_grad;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Activation act = l + 1 == layers_.size() ? output_ : hidden_;
    const Eigen::MatrixXd delta = activation_grad(cache.outputs[l], upstream, act);
    if (parameter_grads) {
      g.layers[l].weight.noalias() = delta * cache.inputs[l].transpose();
      g.layers[l].bias = delta.rowwise().sum();
    }
    upstream.noalias() = layers_[l].weight.transpose() * delta;
  }
  g.input = std::move(upstream);
  return g;
}

DenseLayer& Mlp::mutable_layer(std::size_t i) {
  ++revision_;
  return layers_.at(i);
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

bool Mlp::same_shape(const Mlp& other) const { return dims_ == other.dims_; }

bool Mlp::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

OptimizerState OptimizerState::for_network(const Mlp& net, double learning_rate, OptimizerKind kind) {
  OptimizerState opt;
  opt.kind = kind;
  opt.learning_rate = learning_rate;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto& layer = net.layer(l);
    DenseLayer zero{Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                    Eigen::VectorXd::Zero(layer.bias.size())};
    opt.first_moment.push_back(zero);
    opt.second_moment.push_back(zero);
  }
  return opt;
}

void apply_update(Mlp& net, const Gradients& grads, OptimizerState& opt) {
  if (grads.layers.size() != net.layer_count()) {
    throw std::invalid_argument("apply_update: gradient/network layer count mismatch");
  }
  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    const auto& g = grads.layers[l];
    const auto& p = net.layer(l);
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() || g.bias.size() != p.bias.size()) {
      throw std::invalid_argument("apply_update: gradient shape mismatch in layer " + std::to_string(l));
    }
    if (!g.weight.allFinite() || !g.bias.allFinite()) {
      throw NonFiniteError("apply_update: non-finite gradient in layer " + std::to_string(l) + "; update refused");
    }
  }

  ++opt.step;
  if (opt.kind == OptimizerKind::sgd) {
    for (std::size_t l = 0; l < grads.layers.size(); ++l) {
      auto& p = net.mutable_layer(l);
      p.weight -= opt.learning_rate * grads.layers[l].weight;
      p.bias -= opt.learning_rate * grads.layers[l].bias;
    }
    return;
  }

  const double t = static_cast<double>(opt.step);
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  const double step = opt.learning_rate * std::sqrt(c2) / c1;
  // Bias-corrected step folded into the learning rate; epsilon is applied
  // to the corrected second moment.
  const double eps = opt.epsilon * std::sqrt(c2);
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = opt.beta1 * m + (1.0 - opt.beta1) * grad;
    v = opt.beta2 * v + (1.0 - opt.beta2) * grad.cwiseProduct(grad);
    param.array() -= step * m.array() / (v.array().sqrt() + eps);
  };
  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    auto& p = net.mutable_layer(l);
    update(p.weight, grads.layers[l].weight, opt.first_moment[l].weight, opt.second_moment[l].weight);
    update(p.bias, grads.layers[l].bias, opt.first_moment[l].bias, opt.second_moment[l].bias);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: network shapes differ");
  for (std::size_t l = 0; l < online.layer_count(); ++l) {
    auto& t = target.mutable_layer(l);
    const auto& o = online.layer(l);
    t.weight = tau * o.weight + (1.0 - tau) * t.weight;
    t.bias = tau * o.bias + (1.0 - tau) * t.bias;
  }
}

namespace {

nlohmann::json layers_to_json(const std::vector<DenseLayer>& layers) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& layer : layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(layer.weight.size()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) w.push_back(layer.weight(r, c));
    }
    std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
    out.push_back({{"rows", layer.weight.rows()}, {"cols", layer.weight.cols()}, {"weight", w}, {"bias", b}});
  }
  return out;
}

std::vector<DenseLayer> layers_from_json(const nlohmann::json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& item : j) {
    const auto rows = item.at("rows").get<Eigen::Index>();
    const auto cols = item.at("cols").get<Eigen::Index>();
    const auto w = item.at("weight").get<std::vector<double>>();
    const auto b = item.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
      throw std::runtime_error("checkpoint layer has inconsistent sizes");
    }
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      layer.bias[r] = b[static_cast<std::size_t>(r)];
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

}  // namespace

nlohmann::json to_json(const Mlp& net) {
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l < net.layer_count(); ++l) layers.push_back(net.layer(l));
  return {{"dims", net.dims()},
          {"hidden_activation", to_string(net.hidden_activation())},
          {"output_activation", to_string(net.output_activation())},
          {"layers", layers_to_json(layers)}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp net(j.at("dims").get<std::vector<int>>(), activation_from_string(j.at("hidden_activation")),
          activation_from_string(j.at("output_activation")));
  auto layers = layers_from_json(j.at("layers"));
  if (layers.size() != net.layer_count()) throw std::runtime_error("checkpoint layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& dst = net.mutable_layer(l);
    if (dst.weight.rows() != layers[l].weight.rows() || dst.weight.cols() != layers[l].weight.cols()) {
      throw std::runtime_error("checkpoint layer shape does not match dims");
    }
    dst = std::move(layers[l]);
  }
  return net;
}

nlohmann::json to_json(const OptimizerState& opt) {
  return {{"kind", opt.kind == OptimizerKind::adam ? "adam" : "sgd"},
          {"learning_rate", opt.learning_rate},
          {"beta1", opt.beta1},
          {"beta2", opt.beta2},
          {"epsilon", opt.epsilon},
          {"step", opt.step},
          {"first_moment", layers_to_json(opt.first_moment)},
          {"second_moment", layers_to_json(opt.second_moment)}};
}

OptimizerState optimizer_from_json(const nlohmann::json& j) {
  OptimizerState opt;
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "adam" && kind != "sgd") throw std::runtime_error("unknown optimizer kind '" + kind + "'");
  opt.kind = kind == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
  opt.learning_rate = j.at("learning_rate");
  opt.beta1 = j.at("beta1");
  opt.beta2 = j.at("beta2");
  opt.epsilon = j.at("epsilon");
  opt.step = j.at("step");
  opt.first_moment = layers_from_json(j.at("first_moment"));
  opt.second_moment = layers_from_json(j.at("second_moment"));
  return opt;
}

}  // namespace risjam
