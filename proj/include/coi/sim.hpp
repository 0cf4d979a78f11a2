#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "coi/media.hpp"
#include "coi/trace.hpp"

namespace coi {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps interestingness in [1, 5] linearly onto a reward weight in [1, 3].
double interest_weight(double interestingness);

struct RewardParams {
  double alpha = 3000.0;  // rebuffer penalty per second
  double beta = 1.0;      // quality-variation penalty weight
  double gamma = 0.8;     // discount factor for session returns
  std::function<double(double)> weight_map = interest_weight;         // f: interestingness -> weight
  std::function<double(double)> quality_map = [](double b) { return b; };  // q: kbps -> quality
};

struct SimConfig {
  std::size_t bandwidth_horizon_k = 2;  // predicted-throughput entries in the state
  std::size_t interest_horizon_h = 3;   // interestingness look-ahead entries
  double buffer_cap_s = 60.0;
  double cold_start_kbps = 350.0;  // predictor output before any measurement
  std::size_t history_window = 5;
};

// Agent-facing snapshot taken before each chunk decision. Values are in
// physical units; any normalization is the agent's business.
struct StateObservation {
  std::vector<double> predicted_throughput_kbps;  // length k
  double buffer_s = 0.0;
  double last_bitrate_kbps = 0.0;
  std::vector<double> interest_window;        // length h, raw scores in [1, 5]
  std::vector<double> next_chunk_sizes_kbit;  // one per ladder entry
};

struct ChunkLogEntry {
  std::size_t chunk_index = 0;
  double bitrate_kbps = 0.0;
  double weight = 0.0;  // mapped weight used in the reward
  double rebuffer_s = 0.0;
  double download_time_s = 0.0;
  double reward = 0.0;
};

struct StepOutcome {
  double reward = 0.0;
  double rebuffer_s = 0.0;
  double download_time_s = 0.0;
  double wait_s = 0.0;  // idle time spent draining an over-full buffer
  double measured_throughput_kbps = 0.0;
  std::optional<StateObservation> next_observation;  // nullopt once the session ends
  ChunkLogEntry chunk_log;
};

// Smallest d such that the trace delivers size_kbit over [start, start+d);
// past the last sample the final throughput holds forever.
double compute_download_time(const BandwidthTrace& trace, double start_s, double size_kbit);

// weight * q(bitrate) - alpha * rebuffer - beta * |q(bitrate) - q(prev)|
double compute_reward(double weight, double bitrate_kbps, double prev_bitrate_kbps,
                      double rebuffer_s, const RewardParams& params);

struct BufferUpdate {
  double rebuffer_s = 0.0;
  double wait_s = 0.0;
  double buffer_s = 0.0;
};

// Pure buffer dynamics for one chunk: drain during the download (stalling
// when empty), add the chunk's playback time, then wait out any overflow
// above the cap.
BufferUpdate apply_download(double buffer_s, double download_s, double chunk_duration_s,
                            double buffer_cap_s);

// One streaming session over a fixed manifest and trace. Single-owner;
// mutate only through step(). Distinct environments are fully independent.
class Environment {
 public:
  Environment(VideoManifest manifest, BandwidthTrace trace, RewardParams params,
              SimConfig config);

  StateObservation observe() const;  // throws SimError once terminal
  StepOutcome step(double bitrate_kbps);
  bool terminal() const { return next_chunk_ >= manifest_.num_chunks(); }

  double buffer_s() const { return buffer_s_; }
  double wall_clock_s() const { return wall_clock_s_; }
  std::size_t next_chunk() const { return next_chunk_; }
  double last_bitrate_kbps() const { return last_bitrate_kbps_; }
  // Download time of chunk 0; start-up delay is not counted as rebuffering.
  double startup_delay_s() const { return startup_delay_s_; }
  const VideoManifest& manifest() const { return manifest_; }
  const BandwidthTrace& trace() const { return trace_; }
  const RewardParams& params() const { return params_; }
  const SimConfig& config() const { return config_; }
  const ThroughputHistory& history() const { return history_; }

 private:
  VideoManifest manifest_;
  BandwidthTrace trace_;
  RewardParams params_;
  SimConfig config_;
  ThroughputHistory history_;
  double buffer_s_ = 0.0;
  double wall_clock_s_ = 0.0;
  double last_bitrate_kbps_ = 0.0;
  double startup_delay_s_ = 0.0;
  std::size_t next_chunk_ = 0;
};

void write_chunk_log_csv(const std::vector<ChunkLogEntry>& log, std::ostream& out);

}  // namespace coi
