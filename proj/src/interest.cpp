#include "coi/interest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "coi/io_util.hpp"

namespace coi {

namespace {

void check_samples(const std::vector<FeatureSample>& samples) {
  if (samples.empty()) throw NnError("dataset is empty");
  const std::size_t dim = samples.front().features.size();
  if (dim == 0) throw NnError("feature dimension must be >= 1");
  for (const FeatureSample& s : samples) {
    if (s.features.size() != dim) throw NnError("inconsistent feature dimensions in dataset");
    if (!(s.label >= 1.0 && s.label <= 5.0)) throw NnError("label out of range [1,5]");
  }
}

}  // namespace

Dataset make_dataset(std::vector<FeatureSample> samples, double train_fraction,
                     std::uint64_t seed) {
  check_samples(samples);
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw NnError("train fraction must be in (0, 1]");
  Dataset data;
  data.samples = std::move(samples);
  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.index(i)]);
  const auto train_count = static_cast<std::size_t>(
      std::round(train_fraction * static_cast<double>(order.size())));
  data.train_indices.assign(order.begin(), order.begin() + train_count);
  data.test_indices.assign(order.begin() + train_count, order.end());
  if (data.train_indices.empty()) throw NnError("empty train split");
  return data;
}

RegressorResult train_regressor(const Dataset& data, const RegressorConfig& config) {
  check_samples(data.samples);
  if (data.train_indices.empty()) throw NnError("empty train split");
  if (config.batch_size == 0 || config.epochs == 0)
    throw NnError("batch size and epochs must be >= 1");
  const std::size_t feature_dim = data.samples.front().features.size();

  Rng rng(config.seed);
  std::vector<LayerSpec> specs;
  for (std::size_t width : config.hidden_dims) specs.push_back({width, Activation::kRectifier});
  specs.push_back({1, Activation::kLinear});

  RegressorResult result;
  result.model = Network::make(feature_dim, specs, rng);
  Optimizer optimizer(OptimMethod::kAdam, config.learning_rate);

  std::vector<std::size_t> order = data.train_indices;
  auto train_mse = [&]() {
    double sum = 0.0;
    for (std::size_t idx : data.train_indices) {
      const FeatureSample& s = data.samples[idx];
      const double prediction = result.model.forward(s.features)[0];
      const double err = prediction - s.label;
      sum += err * err;
    }
    return sum / static_cast<double>(data.train_indices.size());
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.index(i)]);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      const auto n = static_cast<double>(end - start);
      Gradients grads = result.model.zero_gradients();
      for (std::size_t i = start; i < end; ++i) {
        const FeatureSample& s = data.samples[order[i]];
        const double prediction = result.model.forward(s.features)[0];
        // d/dy of (1/n) sum (y - label)^2
        const double output_grad = 2.0 * (prediction - s.label) / n;
        grads.add(result.model.backward(s.features, std::vector<double>{output_grad}));
      }
      optimizer.step(result.model, grads);
    }
    result.loss_history.push_back(train_mse());
  }
  return result;
}

double predict_interestingness(const Network& model, std::span<const double> features) {
  const double raw = model.forward(features)[0];
  return std::clamp(raw, 1.0, 5.0);
}

double mean_squared_error(const Network& model, const Dataset& data,
                          std::span<const std::size_t> indices) {
  if (indices.empty()) throw NnError("empty index set");
  double sum = 0.0;
  for (std::size_t idx : indices) {
    const FeatureSample& s = data.samples[idx];
    const double err = predict_interestingness(model, s.features) - s.label;
    sum += err * err;
  }
  return sum / static_cast<double>(indices.size());
}

double mean_error(const Network& model, const Dataset& data,
                  std::span<const std::size_t> indices) {
  if (indices.empty()) throw NnError("empty index set");
  double sum = 0.0;
  for (std::size_t idx : indices) {
    const FeatureSample& s = data.samples[idx];
    sum += predict_interestingness(model, s.features) - s.label;
  }
  return sum / static_cast<double>(indices.size());
}

double mean_abs_error(const Network& model, const Dataset& data,
                      std::span<const std::size_t> indices) {
  if (indices.empty()) throw NnError("empty index set");
  double sum = 0.0;
  for (std::size_t idx : indices) {
    const FeatureSample& s = data.samples[idx];
    sum += std::abs(predict_interestingness(model, s.features) - s.label);
  }
  return sum / static_cast<double>(indices.size());
}

std::vector<FeatureSample> generate_planted_samples(const PlantedConfig& config,
                                                    std::uint64_t seed) {
  if (config.num_samples == 0 || config.feature_dim == 0)
    throw NnError("planted generator needs samples and feature dim >= 1");
  Rng rng(seed);
  // Fixed direction with |a . x| spread ~ N(0, 4) so labels cover the range.
  std::vector<double> direction(config.feature_dim);
  const double scale = 2.0 / std::sqrt(static_cast<double>(config.feature_dim));
  for (double& d : direction) d = rng.gaussian() * scale;

  std::vector<FeatureSample> samples;
  samples.reserve(config.num_samples);
  for (std::size_t i = 0; i < config.num_samples; ++i) {
    FeatureSample s;
    s.features.resize(config.feature_dim);
    double dot = 0.0;
    for (std::size_t j = 0; j < config.feature_dim; ++j) {
      s.features[j] = rng.gaussian();
      dot += direction[j] * s.features[j];
    }
    double label = 1.0 + 4.0 / (1.0 + std::exp(-dot));
    if (config.label_noise_sigma > 0.0) label += config.label_noise_sigma * rng.gaussian();
    s.label = std::clamp(label, 1.0, 5.0);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<FeatureSample> load_feature_csv(std::istream& in) {
  std::vector<FeatureSample> samples;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_csv_line(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (first_content_line && !parse_double(fields[0]).has_value()) {
      first_content_line = false;
      continue;
    }
    first_content_line = false;
    if (fields.size() < 3)
      throw NnError("feature file line " + std::to_string(line_no) +
                    ": expected chunk_id,label,features...");
    auto label = parse_double(fields[1]);
    if (!label.has_value())
      throw NnError("feature file line " + std::to_string(line_no) + ": bad label");
    FeatureSample s;
    s.label = *label;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      auto value = parse_double(fields[i]);
      if (!value.has_value())
        throw NnError("feature file line " + std::to_string(line_no) + ": bad feature value");
      s.features.push_back(*value);
    }
    samples.push_back(std::move(s));
  }
  check_samples(samples);
  return samples;
}

void serialize_feature_csv(std::span<const FeatureSample> samples, std::ostream& out) {
  out << "chunk_id,label,features\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << i << ',' << format_double(samples[i].label);
    for (double f : samples[i].features) out << ',' << format_double(f);
    out << '\n';
  }
}

}  // namespace coi
