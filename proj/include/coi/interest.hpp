#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "coi/nn.hpp"

namespace coi {

struct FeatureSample {
  std::vector<double> features;
  double label = 1.0;  // interestingness ground truth in [1, 5]
};

// Samples plus a seeded train/test split (disjoint, covering all indices).
struct Dataset {
  std::vector<FeatureSample> samples;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

Dataset make_dataset(std::vector<FeatureSample> samples, double train_fraction,
                     std::uint64_t seed);

struct RegressorConfig {
  std::vector<std::size_t> hidden_dims = {256, 128};
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct RegressorResult {
  Network model;
  std::vector<double> loss_history;  // train MSE after each epoch
};

// Mini-batch Adam on squared error over the train split. The output head is
// a single linear node; clamping to [1, 5] happens at inference only.
RegressorResult train_regressor(const Dataset& data, const RegressorConfig& config);

double predict_interestingness(const Network& model, std::span<const double> features);

// Mean of (label - clamped prediction)^2 over the given indices.
double mean_squared_error(const Network& model, const Dataset& data,
                          std::span<const std::size_t> indices);
double mean_error(const Network& model, const Dataset& data,
                  std::span<const std::size_t> indices);  // signed bias
double mean_abs_error(const Network& model, const Dataset& data,
                      std::span<const std::size_t> indices);

struct PlantedConfig {
  std::size_t num_samples = 5000;
  std::size_t feature_dim = 32;
  double label_noise_sigma = 0.0;
};

// Synthetic ground truth: features ~ N(0, I) and label =
// clamp(1 + 4 * sigmoid(a . x), 1, 5) for a fixed seeded direction a, plus
// optional Gaussian label noise (clamped back into range).
std::vector<FeatureSample> generate_planted_samples(const PlantedConfig& config,
                                                    std::uint64_t seed);

// CSV rows "chunk_id,label,f0,f1,...". A non-numeric first field on the
// first line is treated as a header.
std::vector<FeatureSample> load_feature_csv(std::istream& in);
void serialize_feature_csv(std::span<const FeatureSample> samples, std::ostream& out);

}  // namespace coi
