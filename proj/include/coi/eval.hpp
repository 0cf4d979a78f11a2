#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coi/agents.hpp"
#include "coi/sim.hpp"

namespace coi {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionMetrics {
  std::string method;
  std::size_t session_index = 0;
  double total_rebuffer_s = 0.0;
  double startup_delay_s = 0.0;
  double average_bitrate_kbps = 0.0;
  double bitrate_variation_kbps = 0.0;  // mean |b_t - b_{t-1}| over transitions
  double cumulative_reward = 0.0;
  std::vector<ChunkLogEntry> chunk_log;
};

// Drives one session to completion under the policy.
SessionMetrics run_session(Policy& policy, const VideoManifest& manifest,
                           const BandwidthTrace& trace, const RewardParams& params,
                           const SimConfig& config);

struct MethodSummary {
  std::string method;
  std::size_t sessions = 0;
  double mean_rebuffer_s = 0.0;
  double std_rebuffer_s = 0.0;
  double mean_bitrate_kbps = 0.0;
  double std_bitrate_kbps = 0.0;
  double mean_variation_kbps = 0.0;
  double std_variation_kbps = 0.0;
  double mean_reward = 0.0;
  // Sorted per-session values; the ECDF at sorted[i] is (i + 1) / n.
  std::vector<double> bitrate_values;
  std::vector<double> rebuffer_values;
  std::vector<double> variation_values;
};

struct Summary {
  std::vector<MethodSummary> methods;
};

// Per-method means and population standard deviations, methods ordered by
// first appearance in the runs.
Summary summarize_sessions(const std::vector<SessionMetrics>& runs);

struct CorrelationResult {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall_tau = 0.0;  // tau-b, tie-adjusted
  bool defined = false;      // false when either variable is constant
};

CorrelationResult correlation_suite(std::span<const std::pair<double, double>> pairs);

struct InterestBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;              // 0 marks an empty bin
  double mean_bitrate_kbps = 0.0;     // meaningless when empty
};

// Five weight bins over [1, 3]: left-closed right-open, last bin closed.
std::vector<InterestBin> bin_by_interest_level(
    std::span<const std::pair<double, double>> weight_bitrate);

// Pooled (weight, bitrate) pairs across the chunk logs of the given runs.
std::vector<std::pair<double, double>> pooled_weight_bitrate(
    const std::vector<SessionMetrics>& runs, std::string_view method);

// --- emitters -------------------------------------------------------------

void write_sessions_csv(const std::vector<SessionMetrics>& runs, std::ostream& out);
void write_table_csv(const Summary& summary, std::ostream& out);
void write_ecdf_csv(const Summary& summary, std::string_view metric, std::ostream& out);
void write_bins_csv(std::span<const InterestBin> bins, std::ostream& out);
std::string summary_to_json(const Summary& summary);
Summary summary_from_json(const std::string& text);

}  // namespace coi
