#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coi/nn.hpp"
#include "coi/sim.hpp"

namespace coi {

class AgentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Buffer-based selection: lowest rung below the reservoir, highest above
// reservoir + cushion, a linear map quantized down to the ladder in between.
double bba_select(double buffer_s, std::span<const double> bitrates_kbps,
                  double reservoir_s = 5.0, double cushion_s = 20.0);

// Largest ladder entry not exceeding the predicted bandwidth; the lowest
// rung when even that is out of reach.
double rba_select(double predicted_kbps, std::span<const double> bitrates_kbps);

struct MpcModel {
  const VideoManifest* manifest = nullptr;
  RewardParams params;  // alpha/beta and quality map; interest weight is not used
  double buffer_cap_s = 60.0;
  std::size_t horizon = 3;
};

// Exhaustive search over all bitrate sequences of length `horizon`,
// simulating buffer evolution under the error-discounted throughput
// estimate and maximizing the summed unweighted QoE. Ties go to the lower
// first bitrate. The horizon truncates at end of video.
double mpc_select(const StateObservation& obs, std::size_t next_chunk, const MpcModel& model,
                  std::span<const double> recent_relative_errors);

// Scales a physical observation into the Q-network's input range.
struct Normalization {
  double throughput_kbps = 3000.0;
  double buffer_s = 60.0;
  double bitrate_kbps = 3000.0;
  double chunk_size_kbit = 12000.0;
};

std::vector<double> normalized_state(const StateObservation& obs, const Normalization& norm);
std::size_t state_dimension(const SimConfig& config, std::size_t num_bitrates);

// Epsilon-greedy action over Q-values; greedy ties break toward the lowest
// index. epsilon == 0 never touches the rng.
std::size_t dqn_select_action(const Network& net, std::span<const double> state, double epsilon,
                              Rng& rng);

struct Transition {
  std::vector<double> state;  // normalized
  std::size_t action = 0;     // bitrate index
  double reward = 0.0;        // in training units
  std::vector<double> next_state;
  bool terminal = false;
};

// Bounded FIFO of transitions; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000);

  void push(Transition transition);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  // i-th oldest entry, i in [0, size).
  const Transition& at(std::size_t i) const;
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot holding the oldest entry once full
  std::vector<Transition> entries_;
};

enum class WeightMode { kCoi, kConstant };

std::string_view weight_mode_name(WeightMode mode);
WeightMode weight_mode_from_name(std::string_view name);

struct DqnConfig {
  double epsilon = 0.2;                         // exploration probability during training
  double gamma = 0.8;                           // discount factor
  std::size_t batch_size = 256;                 // transitions per sampled batch
  std::size_t batches_per_update = 50;          // batches per training instance
  double target_mix = 0.5;                      // soft-update coefficient for the target net
  std::size_t replay_capacity = 10000;
  std::size_t sessions = 100;                   // training sessions
  std::vector<std::size_t> hidden_dims = {256, 512};
  double learning_rate = 1e-3;
  double reward_scale = 1.0 / 3000.0;           // conditions Q targets; reporting stays physical
  double constant_weight = 2.0;                 // weight substituted in kConstant mode
  std::uint64_t seed = 0;
};

void validate_dqn_config(const DqnConfig& config);

using EnvFactory = std::function<Environment(std::size_t session_index)>;

struct DqnTrainResult {
  Network net;
  std::vector<double> reward_history;  // per-session cumulative reward, physical units
  Normalization normalization;
  SimConfig sim_config;
  std::vector<double> bitrates_kbps;
  WeightMode weight_mode = WeightMode::kCoi;
};

// One training instance (sampling + gradient steps + target soft-update)
// runs after every chunk once the replay buffer holds a full batch.
DqnTrainResult dqn_train(const EnvFactory& factory, const DqnConfig& config, WeightMode mode);

// Checkpoint = nn model file + sidecar JSON (normalization constants,
// horizons, ladder, weight mode, pointer to the model file).
void save_agent_checkpoint(const DqnTrainResult& result, const std::string& model_path,
                           const std::string& sidecar_path);

// ---------------------------------------------------------------------------
// Session-facing policy interface used by the evaluation harness.

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual void begin_session(const VideoManifest& manifest, const SimConfig& config) {}
  virtual double select_bitrate(const StateObservation& obs, std::size_t next_chunk) = 0;
  virtual void observe_outcome(const StepOutcome& outcome) {}
};

class BbaPolicy final : public Policy {
 public:
  BbaPolicy(double reservoir_s = 5.0, double cushion_s = 20.0)
      : reservoir_s_(reservoir_s), cushion_s_(cushion_s) {}
  std::string_view name() const override { return "bba"; }
  void begin_session(const VideoManifest& manifest, const SimConfig&) override;
  double select_bitrate(const StateObservation& obs, std::size_t) override;

 private:
  double reservoir_s_;
  double cushion_s_;
  std::vector<double> bitrates_;
};

class RbaPolicy final : public Policy {
 public:
  std::string_view name() const override { return "rba"; }
  void begin_session(const VideoManifest& manifest, const SimConfig&) override;
  double select_bitrate(const StateObservation& obs, std::size_t) override;

 private:
  std::vector<double> bitrates_;
};

class MpcPolicy final : public Policy {
 public:
  MpcPolicy(RewardParams params, std::size_t horizon = 3, std::size_t error_window = 5);
  std::string_view name() const override { return "mpc"; }
  void begin_session(const VideoManifest& manifest, const SimConfig& config) override;
  double select_bitrate(const StateObservation& obs, std::size_t next_chunk) override;
  void observe_outcome(const StepOutcome& outcome) override;

 private:
  RewardParams params_;
  std::size_t horizon_;
  std::size_t error_window_;
  const VideoManifest* manifest_ = nullptr;
  double buffer_cap_s_ = 60.0;
  double last_prediction_kbps_ = 0.0;
  std::vector<double> relative_errors_;
};

// Greedy rollout of a trained Q-network.
class DqnPolicy final : public Policy {
 public:
  DqnPolicy(std::string name, Network net, Normalization norm, std::vector<double> bitrates);
  static DqnPolicy from_checkpoint(const std::string& sidecar_path, std::string name = {});

  std::string_view name() const override { return name_; }
  double select_bitrate(const StateObservation& obs, std::size_t) override;
  const Network& net() const { return net_; }
  WeightMode weight_mode() const { return weight_mode_; }

 private:
  std::string name_;
  Network net_;
  Normalization norm_;
  std::vector<double> bitrates_;
  WeightMode weight_mode_ = WeightMode::kCoi;
};

}  // namespace coi
