#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coi/rng.hpp"

namespace coi {

class NnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { kRectifier, kLinear };

struct LayerSpec {
  std::size_t out_dim = 0;
  Activation activation = Activation::kRectifier;
};

struct Layer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;  // row-major, [out][in]
  std::vector<double> biases;   // [out]
  Activation activation = Activation::kLinear;
};

struct LayerGrad {
  std::vector<double> weights;
  std::vector<double> biases;
};

struct Gradients {
  std::vector<LayerGrad> layers;

  void add(const Gradients& other);
  void scale(double factor);
};

// Dense feed-forward function approximator in double precision.
class Network {
 public:
  Network() = default;

  // He-uniform init for rectifier layers, Xavier-uniform for linear ones.
  static Network make(std::size_t input_dim, const std::vector<LayerSpec>& specs, Rng& rng);

  std::vector<double> forward(std::span<const double> input) const;

  // Reverse-mode gradients of dot(output, output_gradient) w.r.t. every
  // parameter. Rectifier subgradient at exactly zero is taken as zero.
  Gradients backward(std::span<const double> input,
                     std::span<const double> output_gradient) const;

  Gradients zero_gradients() const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return layers_.empty() ? input_dim_ : layers_.back().out_dim; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  std::size_t parameter_count() const;

  void save(std::ostream& out) const;  // versioned JSON checkpoint
  static Network load(std::istream& in);

 private:
  std::size_t input_dim_ = 0;
  std::vector<Layer> layers_;
};

enum class OptimMethod { kAdam, kSgd };

// First-order parameter updates. Adam keeps per-parameter moment estimates
// shaped exactly like the network.
class Optimizer {
 public:
  Optimizer(OptimMethod method, double learning_rate);

  void step(Network& net, const Gradients& grads);

  OptimMethod method() const { return method_; }
  double learning_rate() const { return learning_rate_; }
  std::size_t step_count() const { return step_count_; }

 private:
  OptimMethod method_;
  double learning_rate_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  std::size_t step_count_ = 0;
  std::vector<LayerGrad> first_moment_;
  std::vector<LayerGrad> second_moment_;
};

// Soft-mixes source parameters into target: target <- mix * source + (1 - mix) * target.
void blend_parameters(Network& target, const Network& source, double mix);

// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8),
// where numeric uses central differences with step 1e-5. The loss and its
// gradient w.r.t. the network output are supplied by the caller.
double gradient_check(const Network& net,
                      const std::function<double(std::span<const double>)>& loss,
                      const std::function<std::vector<double>(std::span<const double>)>& loss_grad,
                      std::span<const double> input);

}  // namespace coi
