#include "coi/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "coi/io_util.hpp"
#include "coi/rng.hpp"

namespace coi {

double BandwidthTrace::throughput_at(double time_s) const {
  auto it = std::upper_bound(samples.begin(), samples.end(), time_s,
                             [](double t, const TraceSample& s) { return t < s.time_s; });
  if (it == samples.begin()) return samples.front().throughput_kbps;
  return std::prev(it)->throughput_kbps;
}

void validate_trace(const BandwidthTrace& trace) {
  if (trace.samples.empty()) throw TraceError("empty trace: at least one sample required");
  if (trace.samples.front().time_s != 0.0)
    throw TraceError("first timestamp must be 0, got " +
                     format_double(trace.samples.front().time_s));
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const TraceSample& s = trace.samples[i];
    if (!std::isfinite(s.time_s) || !std::isfinite(s.throughput_kbps))
      throw TraceError("non-finite sample at index " + std::to_string(i));
    if (s.throughput_kbps <= 0.0)
      throw TraceError("non-positive throughput at index " + std::to_string(i));
    if (i > 0 && s.time_s <= trace.samples[i - 1].time_s)
      throw TraceError("non-monotone time at index " + std::to_string(i));
  }
}

BandwidthTrace load_trace(std::istream& in, std::string name) {
  BandwidthTrace trace;
  trace.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_csv_line(line);
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != 2)
      throw TraceError("malformed line " + std::to_string(line_no) + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    auto time = parse_double(fields[0]);
    auto throughput = parse_double(fields[1]);
    if (first_content_line && !time.has_value()) {
      first_content_line = false;  // header row
      continue;
    }
    first_content_line = false;
    if (!time.has_value() || !throughput.has_value())
      throw TraceError("malformed line " + std::to_string(line_no) + ": non-numeric field");
    if (!trace.samples.empty() && *time <= trace.samples.back().time_s)
      throw TraceError("non-monotone time at line " + std::to_string(line_no));
    if (*throughput <= 0.0)
      throw TraceError("non-positive throughput at line " + std::to_string(line_no));
    trace.samples.push_back({*time, *throughput});
  }
  if (trace.samples.empty()) throw TraceError("empty trace");
  if (trace.samples.front().time_s != 0.0)
    throw TraceError("first timestamp must be 0, got " +
                     format_double(trace.samples.front().time_s));
  return trace;
}

BandwidthTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file: " + path);
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
  return load_trace(in, name);
}

void serialize_trace(const BandwidthTrace& trace, std::ostream& out) {
  out << "time_s,throughput_kbps\n";
  for (const TraceSample& s : trace.samples)
    out << format_double(s.time_s) << ',' << format_double(s.throughput_kbps) << '\n';
}

void ThroughputHistory::push(double throughput_kbps) {
  recent_.push_back(throughput_kbps);
  if (recent_.size() > window_) recent_.erase(recent_.begin());
}

double harmonic_mean(std::span<const double> values) {
  if (values.empty()) throw TraceError("harmonic mean of empty range");
  double reciprocal_sum = 0.0;
  for (double v : values) reciprocal_sum += 1.0 / v;
  return static_cast<double>(values.size()) / reciprocal_sum;
}

std::vector<double> predict_throughput(const ThroughputHistory& history, std::size_t k,
                                       double cold_start_kbps) {
  if (k == 0) throw TraceError("prediction length must be >= 1");
  const double value =
      history.empty() ? cold_start_kbps : harmonic_mean(history.recent());
  return std::vector<double>(k, value);
}

BandwidthTrace generate_synthetic_trace(const SyntheticTraceProfile& profile, std::uint64_t seed,
                                        std::string name) {
  if (!(profile.amplitude_kbps >= 0.0) || !(profile.mean_kbps > profile.amplitude_kbps))
    throw TraceError("synthetic profile requires mean > amplitude >= 0");
  if (!(profile.segment_duration_s > 0.0) || !(profile.total_duration_s > 0.0))
    throw TraceError("synthetic profile requires positive durations");

  Rng rng(seed);
  BandwidthTrace trace;
  trace.name = name.empty() ? "synthetic-" + std::to_string(seed) : std::move(name);
  for (double t = 0.0; t < profile.total_duration_s; t += profile.segment_duration_s) {
    const double throughput = rng.uniform(profile.mean_kbps - profile.amplitude_kbps,
                                          profile.mean_kbps + profile.amplitude_kbps);
    trace.samples.push_back({t, throughput});
  }
  validate_trace(trace);
  return trace;
}

}  // namespace coi
