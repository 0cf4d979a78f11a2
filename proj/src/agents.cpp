#include "coi/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "coi/io_util.hpp"

namespace coi {

double bba_select(double buffer_s, std::span<const double> bitrates_kbps, double reservoir_s,
                  double cushion_s) {
  if (bitrates_kbps.empty()) throw AgentError("empty bitrate ladder");
  if (!(buffer_s >= 0.0)) throw AgentError("buffer must be >= 0");
  const double lowest = bitrates_kbps.front();
  const double highest = bitrates_kbps.back();
  if (buffer_s <= reservoir_s) return lowest;
  if (buffer_s >= reservoir_s + cushion_s) return highest;
  const double target =
      lowest + (buffer_s - reservoir_s) / cushion_s * (highest - lowest);
  double chosen = lowest;
  for (double b : bitrates_kbps)
    if (b <= target) chosen = b;
  return chosen;
}

double rba_select(double predicted_kbps, std::span<const double> bitrates_kbps) {
  if (bitrates_kbps.empty()) throw AgentError("empty bitrate ladder");
  if (!(predicted_kbps > 0.0)) throw AgentError("predicted bandwidth must be positive");
  // The floor is inclusive at equality; the relative slack absorbs the
  // round-off a measured size/time ratio picks up at exact ladder rates.
  const double limit = predicted_kbps * (1.0 + 1e-9);
  double chosen = bitrates_kbps.front();
  for (double b : bitrates_kbps)
    if (b <= limit) chosen = b;
  return chosen;
}

double mpc_select(const StateObservation& obs, std::size_t next_chunk, const MpcModel& model,
                  std::span<const double> recent_relative_errors) {
  if (model.manifest == nullptr) throw AgentError("mpc model has no manifest");
  if (model.horizon == 0) throw AgentError("mpc horizon must be >= 1");
  const VideoManifest& manifest = *model.manifest;
  if (next_chunk >= manifest.num_chunks()) throw AgentError("mpc called past end of video");

  double max_error = 0.0;
  for (double e : recent_relative_errors) max_error = std::max(max_error, e);
  const double robust_kbps = obs.predicted_throughput_kbps.front() / (1.0 + max_error);

  const auto& bitrates = manifest.bitrates_kbps;
  const std::size_t num_bitrates = bitrates.size();
  const std::size_t steps = std::min(model.horizon, manifest.num_chunks() - next_chunk);
  std::size_t total = 1;
  for (std::size_t i = 0; i < steps; ++i) total *= num_bitrates;

  const auto& q = model.params.quality_map;
  double best_reward = -std::numeric_limits<double>::infinity();
  double best_first = bitrates.front();
  for (std::size_t seq = 0; seq < total; ++seq) {
    double buffer = obs.buffer_s;
    double prev_quality = q(obs.last_bitrate_kbps);
    double reward = 0.0;
    std::size_t code = seq;
    std::size_t divisor = total / num_bitrates;
    double first = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      const std::size_t choice = (code / divisor) % num_bitrates;
      if (divisor > 1) divisor /= num_bitrates;
      const double bitrate = bitrates[choice];
      if (i == 0) first = bitrate;
      const double size_kbit = manifest.chunks[next_chunk + i].sizes_kbit[choice];
      const double download_s = size_kbit / robust_kbps;
      const BufferUpdate update =
          apply_download(buffer, download_s, manifest.chunk_duration_s, model.buffer_cap_s);
      buffer = update.buffer_s;
      const double quality = q(bitrate);
      reward += quality - model.params.alpha * update.rebuffer_s -
                model.params.beta * std::abs(quality - prev_quality);
      prev_quality = quality;
    }
    // Sequences enumerate with the first chunk most significant and rungs
    // ascending, so strict improvement keeps the lowest first bitrate on ties.
    if (reward > best_reward) {
      best_reward = reward;
      best_first = first;
    }
  }
  return best_first;
}

std::vector<double> normalized_state(const StateObservation& obs, const Normalization& norm) {
  std::vector<double> state;
  state.reserve(obs.predicted_throughput_kbps.size() + 2 + obs.interest_window.size() +
                obs.next_chunk_sizes_kbit.size());
  for (double v : obs.predicted_throughput_kbps) state.push_back(v / norm.throughput_kbps);
  state.push_back(obs.buffer_s / norm.buffer_s);
  state.push_back(obs.last_bitrate_kbps / norm.bitrate_kbps);
  for (double w : obs.interest_window) state.push_back(w);
  for (double s : obs.next_chunk_sizes_kbit) state.push_back(s / norm.chunk_size_kbit);
  return state;
}

std::size_t state_dimension(const SimConfig& config, std::size_t num_bitrates) {
  return config.bandwidth_horizon_k + 2 + config.interest_horizon_h + num_bitrates;
}

std::size_t dqn_select_action(const Network& net, std::span<const double> state, double epsilon,
                              Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw AgentError("epsilon must be in [0,1]");
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.index(net.output_dim());
  const std::vector<double> q = net.forward(state);
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw AgentError("replay capacity must be >= 1");
  entries_.reserve(std::min<std::size_t>(capacity, 16384));
}

void ReplayBuffer::push(Transition transition) {
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(transition));
    return;
  }
  entries_[head_] = std::move(transition);  // overwrite the oldest
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= entries_.size()) throw AgentError("replay index out of range");
  return entries_[(head_ + i) % entries_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (entries_.size() < n)
    throw AgentError("insufficient samples: have " + std::to_string(entries_.size()) +
                     ", need " + std::to_string(n));
  std::vector<const Transition*> batch;
  batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i) batch.push_back(&entries_[rng.index(entries_.size())]);
  return batch;
}

std::string_view weight_mode_name(WeightMode mode) {
  return mode == WeightMode::kCoi ? "coi" : "constant";
}

WeightMode weight_mode_from_name(std::string_view name) {
  if (name == "coi") return WeightMode::kCoi;
  if (name == "constant") return WeightMode::kConstant;
  throw AgentError("unknown weight mode: " + std::string(name));
}

void validate_dqn_config(const DqnConfig& config) {
  if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0))
    throw AgentError("epsilon must be in [0,1]");
  if (!(config.gamma > 0.0 && config.gamma <= 1.0)) throw AgentError("gamma must be in (0,1]");
  if (config.batch_size == 0 || config.batch_size > config.replay_capacity)
    throw AgentError("batch size must be in [1, replay capacity]");
  if (config.batches_per_update == 0) throw AgentError("batches per update must be >= 1");
  if (!(config.target_mix >= 0.0 && config.target_mix <= 1.0))
    throw AgentError("target mix must be in [0,1]");
  if (config.sessions == 0) throw AgentError("session count must be >= 1");
  if (config.hidden_dims.empty()) throw AgentError("at least one hidden layer required");
  if (!(config.learning_rate > 0.0)) throw AgentError("learning rate must be positive");
  if (!(config.reward_scale > 0.0)) throw AgentError("reward scale must be positive");
}

namespace {

double max_q(const Network& net, std::span<const double> state) {
  const std::vector<double> q = net.forward(state);
  return *std::max_element(q.begin(), q.end());
}

}  // namespace

DqnTrainResult dqn_train(const EnvFactory& factory, const DqnConfig& config, WeightMode mode) {
  validate_dqn_config(config);
  Rng rng(config.seed);

  DqnTrainResult result;
  result.weight_mode = mode;
  ReplayBuffer replay(config.replay_capacity);
  Optimizer optimizer(OptimMethod::kAdam, config.learning_rate);
  Network target;
  bool initialized = false;

  for (std::size_t session = 0; session < config.sessions; ++session) {
    Environment env = factory(session);
    const auto& bitrates = env.manifest().bitrates_kbps;
    if (!initialized) {
      result.sim_config = env.config();
      result.bitrates_kbps = bitrates;
      result.normalization.throughput_kbps = bitrates.back();
      result.normalization.bitrate_kbps = bitrates.back();
      result.normalization.buffer_s = env.config().buffer_cap_s;
      result.normalization.chunk_size_kbit = env.manifest().max_chunk_size_kbit();
      std::vector<LayerSpec> specs;
      for (std::size_t width : config.hidden_dims)
        specs.push_back({width, Activation::kRectifier});
      specs.push_back({bitrates.size(), Activation::kLinear});
      result.net = Network::make(state_dimension(env.config(), bitrates.size()), specs, rng);
      target = result.net;
      initialized = true;
    }
    if (bitrates.size() != result.bitrates_kbps.size())
      throw AgentError("environments must share one bitrate ladder");

    std::vector<double> state = normalized_state(env.observe(), result.normalization);
    double session_reward = 0.0;
    while (!env.terminal()) {
      const std::size_t action = dqn_select_action(result.net, state, config.epsilon, rng);
      const double prev_bitrate = env.last_bitrate_kbps();
      const StepOutcome outcome = env.step(bitrates[action]);

      double reward = outcome.reward;
      if (mode == WeightMode::kConstant)
        reward = compute_reward(config.constant_weight, bitrates[action], prev_bitrate,
                                outcome.rebuffer_s, env.params());
      session_reward += reward;

      Transition transition;
      transition.state = state;
      transition.action = action;
      transition.reward = reward * config.reward_scale;
      transition.terminal = !outcome.next_observation.has_value();
      if (outcome.next_observation)
        transition.next_state = normalized_state(*outcome.next_observation, result.normalization);
      state = transition.next_state;
      replay.push(std::move(transition));

      if (replay.size() >= config.batch_size) {
        const double inv_batch = 1.0 / static_cast<double>(config.batch_size);
        for (std::size_t b = 0; b < config.batches_per_update; ++b) {
          const auto batch = replay.sample(config.batch_size, rng);
          Gradients grads = result.net.zero_gradients();
          std::vector<double> output_grad(result.net.output_dim(), 0.0);
          for (const Transition* tr : batch) {
            const std::vector<double> q = result.net.forward(tr->state);
            double y = tr->reward;
            if (!tr->terminal) y += config.gamma * max_q(target, tr->next_state);
            std::fill(output_grad.begin(), output_grad.end(), 0.0);
            output_grad[tr->action] = 2.0 * (q[tr->action] - y) * inv_batch;
            grads.add(result.net.backward(tr->state, output_grad));
          }
          optimizer.step(result.net, grads);
        }
        blend_parameters(target, result.net, config.target_mix);
      }
    }
    result.reward_history.push_back(session_reward);
  }
  return result;
}

void save_agent_checkpoint(const DqnTrainResult& result, const std::string& model_path,
                           const std::string& sidecar_path) {
  {
    std::ofstream out(model_path, std::ios::binary | std::ios::trunc);
    if (!out) throw AgentError("cannot write model file: " + model_path);
    result.net.save(out);
  }
  std::string model_ref = model_path;
  if (auto slash = model_ref.find_last_of('/'); slash != std::string::npos)
    model_ref = model_ref.substr(slash + 1);
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["model"] = model_ref;
  doc["weight_mode"] = std::string(weight_mode_name(result.weight_mode));
  doc["bandwidth_horizon_k"] = result.sim_config.bandwidth_horizon_k;
  doc["interest_horizon_h"] = result.sim_config.interest_horizon_h;
  doc["bitrates_kbps"] = result.bitrates_kbps;
  doc["normalization"] = {{"throughput_kbps", result.normalization.throughput_kbps},
                          {"buffer_s", result.normalization.buffer_s},
                          {"bitrate_kbps", result.normalization.bitrate_kbps},
                          {"chunk_size_kbit", result.normalization.chunk_size_kbit}};
  write_text_file(sidecar_path, doc.dump(2) + "\n");
}

void BbaPolicy::begin_session(const VideoManifest& manifest, const SimConfig&) {
  bitrates_ = manifest.bitrates_kbps;
}

double BbaPolicy::select_bitrate(const StateObservation& obs, std::size_t) {
  return bba_select(obs.buffer_s, bitrates_, reservoir_s_, cushion_s_);
}

void RbaPolicy::begin_session(const VideoManifest& manifest, const SimConfig&) {
  bitrates_ = manifest.bitrates_kbps;
}

double RbaPolicy::select_bitrate(const StateObservation& obs, std::size_t) {
  return rba_select(obs.predicted_throughput_kbps.front(), bitrates_);
}

MpcPolicy::MpcPolicy(RewardParams params, std::size_t horizon, std::size_t error_window)
    : params_(std::move(params)), horizon_(horizon), error_window_(error_window) {}

void MpcPolicy::begin_session(const VideoManifest& manifest, const SimConfig& config) {
  manifest_ = &manifest;
  buffer_cap_s_ = config.buffer_cap_s;
  last_prediction_kbps_ = 0.0;
  relative_errors_.clear();
}

double MpcPolicy::select_bitrate(const StateObservation& obs, std::size_t next_chunk) {
  if (manifest_ == nullptr) throw AgentError("mpc policy used before begin_session");
  last_prediction_kbps_ = obs.predicted_throughput_kbps.front();
  MpcModel model;
  model.manifest = manifest_;
  model.params = params_;
  model.buffer_cap_s = buffer_cap_s_;
  model.horizon = horizon_;
  return mpc_select(obs, next_chunk, model, relative_errors_);
}

void MpcPolicy::observe_outcome(const StepOutcome& outcome) {
  if (last_prediction_kbps_ <= 0.0 || outcome.measured_throughput_kbps <= 0.0) return;
  const double error = std::abs(last_prediction_kbps_ - outcome.measured_throughput_kbps) /
                       outcome.measured_throughput_kbps;
  relative_errors_.push_back(error);
  if (relative_errors_.size() > error_window_) relative_errors_.erase(relative_errors_.begin());
}

DqnPolicy::DqnPolicy(std::string name, Network net, Normalization norm,
                     std::vector<double> bitrates)
    : name_(std::move(name)), net_(std::move(net)), norm_(norm), bitrates_(std::move(bitrates)) {
  if (bitrates_.empty()) throw AgentError("dqn policy needs a bitrate ladder");
  if (net_.output_dim() != bitrates_.size())
    throw AgentError("dqn policy: network outputs do not match ladder");
}

DqnPolicy DqnPolicy::from_checkpoint(const std::string& sidecar_path, std::string name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(sidecar_path));
  } catch (const nlohmann::json::exception& e) {
    throw AgentError(std::string("agent sidecar parse failure: ") + e.what());
  }
  std::string model_path = doc.at("model").get<std::string>();
  if (auto slash = sidecar_path.find_last_of('/'); slash != std::string::npos)
    model_path = sidecar_path.substr(0, slash + 1) + model_path;
  std::ifstream model_in(model_path, std::ios::binary);
  if (!model_in) throw AgentError("cannot open model file: " + model_path);
  Network net = Network::load(model_in);
  Normalization norm;
  const auto& n = doc.at("normalization");
  norm.throughput_kbps = n.at("throughput_kbps").get<double>();
  norm.buffer_s = n.at("buffer_s").get<double>();
  norm.bitrate_kbps = n.at("bitrate_kbps").get<double>();
  norm.chunk_size_kbit = n.at("chunk_size_kbit").get<double>();
  auto bitrates = doc.at("bitrates_kbps").get<std::vector<double>>();
  const WeightMode mode = weight_mode_from_name(doc.at("weight_mode").get<std::string>());
  if (name.empty()) name = std::string(weight_mode_name(mode));
  DqnPolicy policy(std::move(name), std::move(net), norm, std::move(bitrates));
  policy.weight_mode_ = mode;
  return policy;
}

double DqnPolicy::select_bitrate(const StateObservation& obs, std::size_t) {
  const std::vector<double> state = normalized_state(obs, norm_);
  const std::vector<double> q = net_.forward(state);
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return bitrates_[best];
}

}  // namespace coi
