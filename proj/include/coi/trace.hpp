#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coi {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceSample {
  double time_s = 0.0;
  double throughput_kbps = 0.0;
};

// Piecewise-constant throughput timeline. Each sample's throughput holds
// until the next sample's timestamp; the last sample holds indefinitely.
struct BandwidthTrace {
  std::string name;
  std::vector<TraceSample> samples;

  double duration_s() const { return samples.empty() ? 0.0 : samples.back().time_s; }
  double throughput_at(double time_s) const;
};

// Throws TraceError unless: at least one sample, first timestamp 0,
// strictly increasing timestamps, all throughputs positive.
void validate_trace(const BandwidthTrace& trace);

// CSV "time_s,throughput_kbps" per line; a non-numeric first field on the
// first line is treated as a header and skipped. Errors carry line numbers.
BandwidthTrace load_trace(std::istream& in, std::string name = {});
BandwidthTrace load_trace_file(const std::string& path);
void serialize_trace(const BandwidthTrace& trace, std::ostream& out);

// Bounded window of measured per-chunk throughputs feeding the predictor.
class ThroughputHistory {
 public:
  explicit ThroughputHistory(std::size_t window = 5) : window_(window) {}

  void push(double throughput_kbps);
  const std::vector<double>& recent() const { return recent_; }
  std::size_t window() const { return window_; }
  bool empty() const { return recent_.empty(); }

 private:
  std::size_t window_;
  std::vector<double> recent_;
};

double harmonic_mean(std::span<const double> values);

// Harmonic mean of the history replicated k times; a fresh history yields
// the cold-start value instead.
std::vector<double> predict_throughput(const ThroughputHistory& history, std::size_t k,
                                       double cold_start_kbps);

struct SyntheticTraceProfile {
  double mean_kbps = 2000.0;
  double amplitude_kbps = 1000.0;  // per-segment draw is uniform in mean +/- amplitude
  double segment_duration_s = 4.0;
  double total_duration_s = 1600.0;
};

BandwidthTrace generate_synthetic_trace(const SyntheticTraceProfile& profile, std::uint64_t seed,
                                        std::string name = {});

}  // namespace coi
