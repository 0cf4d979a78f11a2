#include "coi/nn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace coi {

namespace {

constexpr int kCheckpointVersion = 1;

const char* activation_name(Activation a) {
  return a == Activation::kRectifier ? "rectifier" : "linear";
}

Activation activation_from_name(const std::string& name) {
  if (name == "rectifier") return Activation::kRectifier;
  if (name == "linear") return Activation::kLinear;
  throw NnError("unknown activation: " + name);
}

}  // namespace

void Gradients::add(const Gradients& other) {
  if (layers.size() != other.layers.size()) throw NnError("gradient shape mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& mine = layers[l];
    const auto& theirs = other.layers[l];
    if (mine.weights.size() != theirs.weights.size() || mine.biases.size() != theirs.biases.size())
      throw NnError("gradient shape mismatch");
    for (std::size_t i = 0; i < mine.weights.size(); ++i) mine.weights[i] += theirs.weights[i];
    for (std::size_t i = 0; i < mine.biases.size(); ++i) mine.biases[i] += theirs.biases[i];
  }
}

void Gradients::scale(double factor) {
  for (auto& layer : layers) {
    for (double& w : layer.weights) w *= factor;
    for (double& b : layer.biases) b *= factor;
  }
}

Network Network::make(std::size_t input_dim, const std::vector<LayerSpec>& specs, Rng& rng) {
  if (input_dim == 0 || specs.empty()) throw NnError("network needs input dim and >= 1 layer");
  Network net;
  net.input_dim_ = input_dim;
  std::size_t in_dim = input_dim;
  for (const LayerSpec& spec : specs) {
    if (spec.out_dim == 0) throw NnError("layer width must be >= 1");
    Layer layer;
    layer.in_dim = in_dim;
    layer.out_dim = spec.out_dim;
    layer.activation = spec.activation;
    const double fan_in = static_cast<double>(in_dim);
    const double fan_out = static_cast<double>(spec.out_dim);
    const double limit = spec.activation == Activation::kRectifier
                             ? std::sqrt(6.0 / fan_in)
                             : std::sqrt(6.0 / (fan_in + fan_out));
    layer.weights.resize(in_dim * spec.out_dim);
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    layer.biases.assign(spec.out_dim, 0.0);
    net.layers_.push_back(std::move(layer));
    in_dim = spec.out_dim;
  }
  return net;
}

std::vector<double> Network::forward(std::span<const double> input) const {
  if (input.size() != input_dim_) throw NnError("forward: input dimension mismatch");
  std::vector<double> activation(input.begin(), input.end());
  std::vector<double> next;
  for (const Layer& layer : layers_) {
    next.assign(layer.out_dim, 0.0);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      const double* row = layer.weights.data() + o * layer.in_dim;
      double z = layer.biases[o];
      for (std::size_t i = 0; i < layer.in_dim; ++i) z += row[i] * activation[i];
      next[o] = layer.activation == Activation::kRectifier ? std::max(0.0, z) : z;
    }
    activation.swap(next);
  }
  return activation;
}

Gradients Network::backward(std::span<const double> input,
                            std::span<const double> output_gradient) const {
  if (input.size() != input_dim_) throw NnError("backward: input dimension mismatch");
  if (output_gradient.size() != output_dim()) throw NnError("backward: gradient dimension mismatch");

  // Forward pass keeping each layer's input and pre-activation.
  std::vector<std::vector<double>> inputs;   // inputs[l] feeds layer l
  std::vector<std::vector<double>> pre_act;  // pre_act[l] = W x + b of layer l
  inputs.reserve(layers_.size());
  pre_act.reserve(layers_.size());
  std::vector<double> activation(input.begin(), input.end());
  for (const Layer& layer : layers_) {
    inputs.push_back(activation);
    std::vector<double> z(layer.out_dim, 0.0);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      const double* row = layer.weights.data() + o * layer.in_dim;
      double sum = layer.biases[o];
      for (std::size_t i = 0; i < layer.in_dim; ++i) sum += row[i] * activation[i];
      z[o] = sum;
    }
    pre_act.push_back(z);
    activation.resize(layer.out_dim);
    for (std::size_t o = 0; o < layer.out_dim; ++o)
      activation[o] = layer.activation == Activation::kRectifier ? std::max(0.0, z[o]) : z[o];
  }

  Gradients grads = zero_gradients();
  std::vector<double> delta(output_gradient.begin(), output_gradient.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    if (layer.activation == Activation::kRectifier) {
      for (std::size_t o = 0; o < layer.out_dim; ++o)
        if (pre_act[l][o] <= 0.0) delta[o] = 0.0;
    }
    LayerGrad& g = grads.layers[l];
    const std::vector<double>& x = inputs[l];
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      const double d = delta[o];
      g.biases[o] = d;
      double* grow = g.weights.data() + o * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) grow[i] = d * x[i];
    }
    if (l > 0) {
      std::vector<double> prev_delta(layer.in_dim, 0.0);
      for (std::size_t o = 0; o < layer.out_dim; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* row = layer.weights.data() + o * layer.in_dim;
        for (std::size_t i = 0; i < layer.in_dim; ++i) prev_delta[i] += d * row[i];
      }
      delta.swap(prev_delta);
    }
  }
  return grads;
}

Gradients Network::zero_gradients() const {
  Gradients grads;
  grads.layers.reserve(layers_.size());
  for (const Layer& layer : layers_) {
    LayerGrad g;
    g.weights.assign(layer.weights.size(), 0.0);
    g.biases.assign(layer.biases.size(), 0.0);
    grads.layers.push_back(std::move(g));
  }
  return grads;
}

std::size_t Network::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& layer : layers_) count += layer.weights.size() + layer.biases.size();
  return count;
}

void Network::save(std::ostream& out) const {
  nlohmann::json doc;
  doc["format_version"] = kCheckpointVersion;
  doc["input_dim"] = input_dim_;
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& layer : layers_) {
    layers.push_back({{"in_dim", layer.in_dim},
                      {"out_dim", layer.out_dim},
                      {"activation", activation_name(layer.activation)},
                      {"weights", layer.weights},
                      {"biases", layer.biases}});
  }
  doc["layers"] = std::move(layers);
  out << doc.dump(2) << '\n';
}

Network Network::load(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw NnError(std::string("checkpoint parse failure: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kCheckpointVersion)
      throw NnError("unsupported checkpoint format version");
    Network net;
    net.input_dim_ = doc.at("input_dim").get<std::size_t>();
    std::size_t expect_in = net.input_dim_;
    for (const auto& layer_doc : doc.at("layers")) {
      Layer layer;
      layer.in_dim = layer_doc.at("in_dim").get<std::size_t>();
      layer.out_dim = layer_doc.at("out_dim").get<std::size_t>();
      layer.activation = activation_from_name(layer_doc.at("activation").get<std::string>());
      layer.weights = layer_doc.at("weights").get<std::vector<double>>();
      layer.biases = layer_doc.at("biases").get<std::vector<double>>();
      if (layer.in_dim != expect_in || layer.weights.size() != layer.in_dim * layer.out_dim ||
          layer.biases.size() != layer.out_dim)
        throw NnError("checkpoint layer shape mismatch");
      expect_in = layer.out_dim;
      net.layers_.push_back(std::move(layer));
    }
    if (net.layers_.empty()) throw NnError("checkpoint has no layers");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw NnError(std::string("checkpoint schema violation: ") + e.what());
  }
}

Optimizer::Optimizer(OptimMethod method, double learning_rate)
    : method_(method), learning_rate_(learning_rate) {
  if (!(learning_rate > 0.0)) throw NnError("learning rate must be positive");
}

void Optimizer::step(Network& net, const Gradients& grads) {
  auto& layers = net.layers();
  if (grads.layers.size() != layers.size()) throw NnError("optimizer: gradient shape mismatch");

  if (method_ == OptimMethod::kSgd) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (std::size_t i = 0; i < layers[l].weights.size(); ++i)
        layers[l].weights[i] -= learning_rate_ * grads.layers[l].weights[i];
      for (std::size_t i = 0; i < layers[l].biases.size(); ++i)
        layers[l].biases[i] -= learning_rate_ * grads.layers[l].biases[i];
    }
    ++step_count_;
    return;
  }

  if (first_moment_.empty()) {
    for (const Layer& layer : layers) {
      LayerGrad zero;
      zero.weights.assign(layer.weights.size(), 0.0);
      zero.biases.assign(layer.biases.size(), 0.0);
      first_moment_.push_back(zero);
      second_moment_.push_back(std::move(zero));
    }
  }

  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double correction1 = 1.0 - std::pow(beta1_, t);
  const double correction2 = 1.0 - std::pow(beta2_, t);
  auto update = [&](double& param, double grad, double& m, double& v) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad * grad;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    param -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& g = grads.layers[l];
    if (g.weights.size() != layers[l].weights.size() || g.biases.size() != layers[l].biases.size())
      throw NnError("optimizer: gradient shape mismatch");
    for (std::size_t i = 0; i < layers[l].weights.size(); ++i)
      update(layers[l].weights[i], g.weights[i], first_moment_[l].weights[i],
             second_moment_[l].weights[i]);
    for (std::size_t i = 0; i < layers[l].biases.size(); ++i)
      update(layers[l].biases[i], g.biases[i], first_moment_[l].biases[i],
             second_moment_[l].biases[i]);
  }
}

void blend_parameters(Network& target, const Network& source, double mix) {
  auto& dst = target.layers();
  const auto& src = source.layers();
  if (dst.size() != src.size()) throw NnError("blend: network shape mismatch");
  for (std::size_t l = 0; l < dst.size(); ++l) {
    if (dst[l].weights.size() != src[l].weights.size()) throw NnError("blend: layer shape mismatch");
    for (std::size_t i = 0; i < dst[l].weights.size(); ++i)
      dst[l].weights[i] = mix * src[l].weights[i] + (1.0 - mix) * dst[l].weights[i];
    for (std::size_t i = 0; i < dst[l].biases.size(); ++i)
      dst[l].biases[i] = mix * src[l].biases[i] + (1.0 - mix) * dst[l].biases[i];
  }
}

double gradient_check(const Network& net,
                      const std::function<double(std::span<const double>)>& loss,
                      const std::function<std::vector<double>(std::span<const double>)>& loss_grad,
                      std::span<const double> input) {
  const std::vector<double> output = net.forward(input);
  const std::vector<double> output_gradient = loss_grad(output);
  const Gradients analytic = net.backward(input, output_gradient);

  Network probe = net;  // mutated one parameter at a time
  constexpr double kStep = 1e-5;
  double max_rel_error = 0.0;
  auto check_param = [&](double& param, double analytic_grad) {
    const double saved = param;
    param = saved + kStep;
    const double plus = loss(probe.forward(input));
    param = saved - kStep;
    const double minus = loss(probe.forward(input));
    param = saved;
    const double numeric = (plus - minus) / (2.0 * kStep);
    const double denom = std::max({std::abs(analytic_grad), std::abs(numeric), 1e-8});
    max_rel_error = std::max(max_rel_error, std::abs(analytic_grad - numeric) / denom);
  };
  for (std::size_t l = 0; l < probe.layers().size(); ++l) {
    Layer& layer = probe.layers()[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      check_param(layer.weights[i], analytic.layers[l].weights[i]);
    for (std::size_t i = 0; i < layer.biases.size(); ++i)
      check_param(layer.biases[i], analytic.layers[l].biases[i]);
  }
  return max_rel_error;
}

}  // namespace coi
