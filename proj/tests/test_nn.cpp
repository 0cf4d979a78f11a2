#include <doctest.h>

#include <cmath>
#include <sstream>

#include "coi/nn.hpp"
#include "coi/rng.hpp"

using namespace coi;

namespace {

// Squared distance to a fixed target, plus its gradient w.r.t. the output.
struct SquaredLoss {
  std::vector<double> target;

  double operator()(std::span<const double> output) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i)
      sum += (output[i] - target[i]) * (output[i] - target[i]);
    return sum;
  }
  std::vector<double> grad(std::span<const double> output) const {
    std::vector<double> g(output.size());
    for (std::size_t i = 0; i < output.size(); ++i) g[i] = 2.0 * (output[i] - target[i]);
    return g;
  }
};

// True when any rectifier pre-activation sits too close to its kink for
// finite differences to be trustworthy.
bool near_kink(const Network& net, std::span<const double> input, double margin = 1e-3) {
  std::vector<double> activation(input.begin(), input.end());
  for (const Layer& layer : net.layers()) {
    std::vector<double> next(layer.out_dim, 0.0);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      double z = layer.biases[o];
      for (std::size_t i = 0; i < layer.in_dim; ++i)
        z += layer.weights[o * layer.in_dim + i] * activation[i];
      if (layer.activation == Activation::kRectifier && std::abs(z) < margin) return true;
      next[o] = layer.activation == Activation::kRectifier ? std::max(0.0, z) : z;
    }
    activation.swap(next);
  }
  return false;
}

Network random_net(Rng& rng, std::size_t input_dim, std::vector<std::size_t> widths) {
  std::vector<LayerSpec> specs;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const bool last = i + 1 == widths.size();
    specs.push_back({widths[i], last ? Activation::kLinear : Activation::kRectifier});
  }
  return Network::make(input_dim, specs, rng);
}

}  // namespace

TEST_CASE("an all-zero network outputs zeros") {
  Rng rng(1);
  Network net = random_net(rng, 3, {4, 2});
  for (Layer& layer : net.layers()) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  }
  const std::vector<double> input = {1.0, -2.0, 3.0};
  for (double y : net.forward(input)) CHECK(y == 0.0);
}

TEST_CASE("a single identity layer passes the input through") {
  Rng rng(1);
  Network net = random_net(rng, 3, {3});
  Layer& layer = net.layers()[0];
  std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
  for (std::size_t i = 0; i < 3; ++i) layer.weights[i * 3 + i] = 1.0;
  std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  const std::vector<double> input = {0.5, -1.5, 2.0};
  CHECK(net.forward(input) == input);
}

TEST_CASE("forward is bitwise deterministic") {
  Rng rng(9);
  const Network net = random_net(rng, 6, {16, 8, 3});
  std::vector<double> input;
  for (int i = 0; i < 6; ++i) input.push_back(rng.uniform(-1.0, 1.0));
  CHECK(net.forward(input) == net.forward(input));
}

TEST_CASE("forward rejects dimension mismatches") {
  Rng rng(3);
  const Network net = random_net(rng, 4, {2});
  const std::vector<double> wrong = {1.0, 2.0};
  CHECK_THROWS_AS(net.forward(wrong), NnError);
}

TEST_CASE("zero output gradient yields zero parameter gradients") {
  Rng rng(4);
  const Network net = random_net(rng, 5, {8, 3});
  std::vector<double> input;
  for (int i = 0; i < 5; ++i) input.push_back(rng.uniform(-1.0, 1.0));
  const Gradients grads = net.backward(input, std::vector<double>(3, 0.0));
  for (const LayerGrad& g : grads.layers) {
    for (double w : g.weights) CHECK(w == 0.0);
    for (double b : g.biases) CHECK(b == 0.0);
  }
}

TEST_CASE("scalar linear layer gradient is the input") {
  Rng rng(5);
  Network net = random_net(rng, 3, {1});
  const std::vector<double> input = {1.5, -2.0, 0.25};
  const Gradients grads = net.backward(input, std::vector<double>{1.0});
  REQUIRE(grads.layers.size() == 1);
  CHECK(grads.layers[0].weights == input);
  CHECK(grads.layers[0].biases[0] == 1.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(2024);
  int checked = 0;
  while (checked < 12) {
    Network net = random_net(rng, 4, {10, 6, 2});
    std::vector<double> input;
    for (int i = 0; i < 4; ++i) input.push_back(rng.uniform(-1.0, 1.0));
    if (near_kink(net, input)) continue;
    SquaredLoss loss;
    for (int i = 0; i < 2; ++i) loss.target.push_back(rng.uniform(-1.0, 1.0));
    const double err = gradient_check(
        net, [&](std::span<const double> y) { return loss(y); },
        [&](std::span<const double> y) { return loss.grad(y); }, input);
    CHECK(err < 1e-4);
    ++checked;
  }
}

TEST_CASE("gradient check on a linear network is near exact") {
  Rng rng(77);
  Network net = random_net(rng, 5, {3});  // single linear layer, quadratic loss
  std::vector<double> input;
  for (int i = 0; i < 5; ++i) input.push_back(rng.uniform(-1.0, 1.0));
  SquaredLoss loss;
  for (int i = 0; i < 3; ++i) loss.target.push_back(rng.uniform(-1.0, 1.0));
  const double err = gradient_check(
      net, [&](std::span<const double> y) { return loss(y); },
      [&](std::span<const double> y) { return loss.grad(y); }, input);
  CHECK(err < 1e-7);
}

TEST_CASE("gradient check of a zero network at zero input reports zero error") {
  Rng rng(6);
  Network net = random_net(rng, 2, {2});
  for (Layer& layer : net.layers()) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  }
  SquaredLoss loss;
  loss.target = {0.0, 0.0};
  const std::vector<double> input = {0.0, 0.0};
  const double err = gradient_check(
      net, [&](std::span<const double> y) { return loss(y); },
      [&](std::span<const double> y) { return loss.grad(y); }, input);
  CHECK(err == 0.0);
}

TEST_CASE("rectifier layers never emit negatives") {
  Rng rng(13);
  for (int round = 0; round < 20; ++round) {
    Network net = random_net(rng, 4, {8, 8});
    net.layers().back().activation = Activation::kRectifier;
    std::vector<double> input;
    for (int i = 0; i < 4; ++i) input.push_back(rng.uniform(-3.0, 3.0));
    for (double y : net.forward(input)) CHECK(y >= 0.0);
  }
}

TEST_CASE("scaling the linear output layer scales the output") {
  Rng rng(14);
  Network net = random_net(rng, 4, {8, 3});
  std::vector<double> input;
  for (int i = 0; i < 4; ++i) input.push_back(rng.uniform(-1.0, 1.0));
  const std::vector<double> base = net.forward(input);
  Layer& out = net.layers().back();
  for (double& w : out.weights) w *= 2.5;
  for (double& b : out.biases) b *= 2.5;
  const std::vector<double> scaled = net.forward(input);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(scaled[i] == doctest::Approx(2.5 * base[i]).epsilon(1e-12));
}

TEST_CASE("optimizers leave parameters alone under zero gradients") {
  Rng rng(15);
  for (OptimMethod method : {OptimMethod::kAdam, OptimMethod::kSgd}) {
    Network net = random_net(rng, 3, {4, 2});
    const Network before = net;
    Optimizer opt(method, 0.1);
    opt.step(net, net.zero_gradients());
    for (std::size_t l = 0; l < net.layers().size(); ++l)
      CHECK(net.layers()[l].weights == before.layers()[l].weights);
  }
}

TEST_CASE("the first Adam step moves every parameter by the learning rate") {
  Rng rng(16);
  Network net = random_net(rng, 2, {3, 2});
  const Network before = net;
  Gradients grads = net.zero_gradients();
  Rng grad_rng(17);
  for (LayerGrad& g : grads.layers) {
    for (double& w : g.weights) w = grad_rng.uniform(0.5, 2.0) * (grad_rng.uniform() < 0.5 ? -1 : 1);
    for (double& b : g.biases) b = grad_rng.uniform(0.5, 2.0);
  }
  const double lr = 1e-3;
  Optimizer opt(OptimMethod::kAdam, lr);
  opt.step(net, grads);
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    for (std::size_t i = 0; i < net.layers()[l].weights.size(); ++i) {
      const double moved = std::abs(net.layers()[l].weights[i] - before.layers()[l].weights[i]);
      CHECK(moved == doctest::Approx(lr).epsilon(1e-6));
    }
  }
}

TEST_CASE("SGD applies lr times gradient") {
  Rng rng(18);
  Network net = random_net(rng, 1, {1});
  net.layers()[0].weights[0] = 1.0;
  net.layers()[0].biases[0] = 0.0;
  Gradients grads = net.zero_gradients();
  grads.layers[0].weights[0] = 2.0;
  Optimizer opt(OptimMethod::kSgd, 0.5);
  opt.step(net, grads);
  CHECK(net.layers()[0].weights[0] == 0.0);
}

TEST_CASE("Adam minimizes a one-parameter convex quadratic") {
  // loss(w) = (w - 3)^2 on a 1x1 linear net with input 1.
  Rng rng(19);
  Network net = random_net(rng, 1, {1});
  net.layers()[0].weights[0] = -2.0;
  net.layers()[0].biases[0] = 0.0;
  Optimizer opt(OptimMethod::kAdam, 1e-2);
  const std::vector<double> input = {1.0};
  for (int step = 0; step < 10000; ++step) {
    const double y = net.forward(input)[0];
    Gradients grads = net.backward(input, std::vector<double>{2.0 * (y - 3.0)});
    grads.layers[0].biases[0] = 0.0;  // keep it one-parameter
    opt.step(net, grads);
    if (std::abs(net.layers()[0].weights[0] - 3.0) < 1e-3) break;
  }
  CHECK(std::abs(net.layers()[0].weights[0] - 3.0) < 1e-3);
}

TEST_CASE("checkpoints round-trip bitwise") {
  Rng rng(20);
  const Network net = random_net(rng, 7, {12, 5});
  std::ostringstream out;
  net.save(out);
  std::istringstream in(out.str());
  const Network back = Network::load(in);
  REQUIRE(back.layers().size() == net.layers().size());
  CHECK(back.input_dim() == net.input_dim());
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    CHECK(back.layers()[l].weights == net.layers()[l].weights);
    CHECK(back.layers()[l].biases == net.layers()[l].biases);
    CHECK(back.layers()[l].activation == net.layers()[l].activation);
  }
  // Serializing the loaded copy reproduces the original bytes.
  std::ostringstream again;
  back.save(again);
  CHECK(again.str() == out.str());
}

TEST_CASE("blend_parameters mixes toward the source") {
  Rng rng(21);
  Network a = random_net(rng, 2, {3});
  Network b = random_net(rng, 2, {3});
  const double w_a = a.layers()[0].weights[0];
  const double w_b = b.layers()[0].weights[0];
  blend_parameters(a, b, 0.5);
  CHECK(a.layers()[0].weights[0] == doctest::Approx(0.5 * w_a + 0.5 * w_b));
}
