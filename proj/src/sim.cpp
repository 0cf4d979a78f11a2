#include "coi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "coi/io_util.hpp"

namespace coi {

double interest_weight(double interestingness) {
  if (!(interestingness >= 1.0 && interestingness <= 5.0))
    throw SimError("interestingness out of range [1,5]: " + format_double(interestingness));
  return 1.0 + (interestingness - 1.0) / 2.0;
}

double compute_download_time(const BandwidthTrace& trace, double start_s, double size_kbit) {
  if (!(size_kbit > 0.0)) throw SimError("download size must be positive");
  if (!(start_s >= 0.0)) throw SimError("download start must be >= 0");
  const auto& samples = trace.samples;
  auto it = std::upper_bound(samples.begin(), samples.end(), start_s,
                             [](double t, const TraceSample& s) { return t < s.time_s; });
  std::size_t seg = (it == samples.begin()) ? 0 : static_cast<std::size_t>(it - samples.begin()) - 1;

  double clock = start_s;
  double remaining = size_kbit;
  while (true) {
    const double rate = samples[seg].throughput_kbps;
    if (seg + 1 >= samples.size()) return (clock - start_s) + remaining / rate;
    const double seg_end = samples[seg + 1].time_s;
    const double capacity = rate * (seg_end - clock);
    if (remaining <= capacity) return (clock - start_s) + remaining / rate;
    remaining -= capacity;
    clock = seg_end;
    ++seg;
  }
}

double compute_reward(double weight, double bitrate_kbps, double prev_bitrate_kbps,
                      double rebuffer_s, const RewardParams& params) {
  const double quality = params.quality_map(bitrate_kbps);
  const double prev_quality = params.quality_map(prev_bitrate_kbps);
  return weight * quality - params.alpha * rebuffer_s -
         params.beta * std::abs(quality - prev_quality);
}

BufferUpdate apply_download(double buffer_s, double download_s, double chunk_duration_s,
                            double buffer_cap_s) {
  BufferUpdate update;
  update.rebuffer_s = std::max(download_s - buffer_s, 0.0);
  update.buffer_s = std::max(buffer_s - download_s, 0.0) + chunk_duration_s;
  if (update.buffer_s > buffer_cap_s) {
    update.wait_s = update.buffer_s - buffer_cap_s;
    update.buffer_s = buffer_cap_s;
  }
  return update;
}

Environment::Environment(VideoManifest manifest, BandwidthTrace trace, RewardParams params,
                         SimConfig config)
    : manifest_(std::move(manifest)),
      trace_(std::move(trace)),
      params_(std::move(params)),
      config_(config),
      history_(config.history_window) {
  validate_manifest(manifest_);
  validate_trace(trace_);
  if (config_.bandwidth_horizon_k == 0 || config_.interest_horizon_h == 0)
    throw SimError("state horizons must be >= 1");
  if (!(config_.buffer_cap_s > 0.0)) throw SimError("buffer cap must be positive");
  last_bitrate_kbps_ = manifest_.bitrates_kbps.front();
}

StateObservation Environment::observe() const {
  if (terminal()) throw SimError("observe after terminal session");
  StateObservation obs;
  obs.predicted_throughput_kbps =
      predict_throughput(history_, config_.bandwidth_horizon_k, config_.cold_start_kbps);
  obs.buffer_s = buffer_s_;
  obs.last_bitrate_kbps = last_bitrate_kbps_;
  obs.interest_window.reserve(config_.interest_horizon_h);
  for (std::size_t i = 0; i < config_.interest_horizon_h; ++i) {
    // Past end-of-video the final chunk's score repeats.
    const std::size_t index = std::min(next_chunk_ + i, manifest_.num_chunks() - 1);
    obs.interest_window.push_back(manifest_.chunks[index].interestingness);
  }
  obs.next_chunk_sizes_kbit = manifest_.chunks[next_chunk_].sizes_kbit;
  return obs;
}

StepOutcome Environment::step(double bitrate_kbps) {
  if (terminal()) throw SimError("step after terminal session");
  std::size_t bitrate_idx = 0;
  try {
    bitrate_idx = manifest_.bitrate_index(bitrate_kbps);
  } catch (const ManifestError& e) {
    throw SimError(e.what());
  }

  const ChunkRecord& chunk = manifest_.chunks[next_chunk_];
  const double size_kbit = chunk.sizes_kbit[bitrate_idx];
  const double download_s = compute_download_time(trace_, wall_clock_s_, size_kbit);
  BufferUpdate update =
      apply_download(buffer_s_, download_s, manifest_.chunk_duration_s, config_.buffer_cap_s);
  if (next_chunk_ == 0) {
    // Playback has not begun; the first download is start-up delay, not a stall.
    startup_delay_s_ = download_s;
    update.rebuffer_s = 0.0;
  }
  wall_clock_s_ += download_s + update.wait_s;
  buffer_s_ = update.buffer_s;

  const double measured_kbps = size_kbit / download_s;
  history_.push(measured_kbps);

  const double weight = params_.weight_map(chunk.interestingness);
  const double reward =
      compute_reward(weight, bitrate_kbps, last_bitrate_kbps_, update.rebuffer_s, params_);

  last_bitrate_kbps_ = bitrate_kbps;
  ++next_chunk_;

  StepOutcome outcome;
  outcome.reward = reward;
  outcome.rebuffer_s = update.rebuffer_s;
  outcome.download_time_s = download_s;
  outcome.wait_s = update.wait_s;
  outcome.measured_throughput_kbps = measured_kbps;
  if (!terminal()) outcome.next_observation = observe();
  outcome.chunk_log = {chunk.index, bitrate_kbps, weight, update.rebuffer_s, download_s, reward};
  return outcome;
}

void write_chunk_log_csv(const std::vector<ChunkLogEntry>& log, std::ostream& out) {
  out << "chunk_index,chosen_bitrate_kbps,weight,rebuffer_s,download_time_s,reward\n";
  for (const ChunkLogEntry& e : log) {
    out << e.chunk_index << ',' << format_double(e.bitrate_kbps) << ',' << format_double(e.weight)
        << ',' << format_double(e.rebuffer_s) << ',' << format_double(e.download_time_s) << ','
        << format_double(e.reward) << '\n';
  }
}

}  // namespace coi
