#include "coi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "coi/io_util.hpp"

namespace coi {

SessionMetrics run_session(Policy& policy, const VideoManifest& manifest,
                           const BandwidthTrace& trace, const RewardParams& params,
                           const SimConfig& config) {
  Environment env(manifest, trace, params, config);
  policy.begin_session(env.manifest(), config);

  SessionMetrics metrics;
  metrics.method = std::string(policy.name());
  while (!env.terminal()) {
    const StateObservation obs = env.observe();
    const double bitrate = policy.select_bitrate(obs, env.next_chunk());
    const StepOutcome outcome = env.step(bitrate);
    policy.observe_outcome(outcome);
    metrics.chunk_log.push_back(outcome.chunk_log);
    metrics.total_rebuffer_s += outcome.rebuffer_s;
    metrics.cumulative_reward += outcome.reward;
  }
  metrics.startup_delay_s = env.startup_delay_s();

  double bitrate_sum = 0.0;
  double variation_sum = 0.0;
  for (std::size_t i = 0; i < metrics.chunk_log.size(); ++i) {
    bitrate_sum += metrics.chunk_log[i].bitrate_kbps;
    if (i > 0)
      variation_sum +=
          std::abs(metrics.chunk_log[i].bitrate_kbps - metrics.chunk_log[i - 1].bitrate_kbps);
  }
  const std::size_t n = metrics.chunk_log.size();
  metrics.average_bitrate_kbps = n > 0 ? bitrate_sum / static_cast<double>(n) : 0.0;
  metrics.bitrate_variation_kbps =
      n > 1 ? variation_sum / static_cast<double>(n - 1) : 0.0;
  return metrics;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population form
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd result;
  if (values.empty()) return result;
  const double n = static_cast<double>(values.size());
  result.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : values) sq += (v - result.mean) * (v - result.mean);
  result.std = std::sqrt(sq / n);
  return result;
}

// Ranks with ties averaged.
std::vector<double> ranks_of(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double cov = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

}  // namespace

Summary summarize_sessions(const std::vector<SessionMetrics>& runs) {
  if (runs.empty()) throw EvalError("no sessions to summarize");
  Summary summary;
  for (const SessionMetrics& run : runs) {
    auto it = std::find_if(summary.methods.begin(), summary.methods.end(),
                           [&](const MethodSummary& m) { return m.method == run.method; });
    if (it == summary.methods.end()) {
      summary.methods.push_back({});
      it = std::prev(summary.methods.end());
      it->method = run.method;
    }
    it->sessions += 1;
    it->bitrate_values.push_back(run.average_bitrate_kbps);
    it->rebuffer_values.push_back(run.total_rebuffer_s);
    it->variation_values.push_back(run.bitrate_variation_kbps);
    it->mean_reward += run.cumulative_reward;
  }
  for (MethodSummary& m : summary.methods) {
    m.mean_reward /= static_cast<double>(m.sessions);
    const MeanStd rebuffer = mean_std(m.rebuffer_values);
    const MeanStd bitrate = mean_std(m.bitrate_values);
    const MeanStd variation = mean_std(m.variation_values);
    m.mean_rebuffer_s = rebuffer.mean;
    m.std_rebuffer_s = rebuffer.std;
    m.mean_bitrate_kbps = bitrate.mean;
    m.std_bitrate_kbps = bitrate.std;
    m.mean_variation_kbps = variation.mean;
    m.std_variation_kbps = variation.std;
    std::sort(m.bitrate_values.begin(), m.bitrate_values.end());
    std::sort(m.rebuffer_values.begin(), m.rebuffer_values.end());
    std::sort(m.variation_values.begin(), m.variation_values.end());
  }
  return summary;
}

CorrelationResult correlation_suite(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) throw EvalError("correlation needs at least 2 pairs");
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(pairs.size());
  y.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    x.push_back(a);
    y.push_back(b);
  }
  CorrelationResult result;
  const bool x_constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  const bool y_constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (x_constant || y_constant) {
    result.defined = false;
    return result;
  }
  result.defined = true;
  result.pearson = pearson_of(x, y);
  result.spearman = pearson_of(ranks_of(x), ranks_of(y));

  // Kendall tau-b. Quadratic scan; pooled chunk counts stay small enough.
  long long concordant = 0;
  long long discordant = 0;
  long long ties_x = 0;
  long long ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if (dx * dy > 0.0) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = static_cast<double>(concordant + discordant + ties_x + ties_y);
  const double denom = std::sqrt((n0 - static_cast<double>(ties_x)) *
                                 (n0 - static_cast<double>(ties_y)));
  result.kendall_tau =
      denom > 0.0 ? static_cast<double>(concordant - discordant) / denom : 0.0;
  return result;
}

std::vector<InterestBin> bin_by_interest_level(
    std::span<const std::pair<double, double>> weight_bitrate) {
  static constexpr double kEdges[] = {1.0, 1.4, 1.8, 2.2, 2.6, 3.0};
  std::vector<InterestBin> bins;
  for (std::size_t i = 0; i + 1 < std::size(kEdges); ++i)
    bins.push_back({kEdges[i], kEdges[i + 1], 0, 0.0});
  for (const auto& [weight, bitrate] : weight_bitrate) {
    if (!(weight >= 1.0 && weight <= 3.0))
      throw EvalError("weight out of range [1,3]: " + format_double(weight));
    std::size_t bin = bins.size() - 1;  // weight == 3.0 falls in the last bin
    for (std::size_t i = 0; i + 1 < std::size(kEdges); ++i) {
      if (weight >= kEdges[i] && weight < kEdges[i + 1]) {
        bin = i;
        break;
      }
    }
    bins[bin].count += 1;
    bins[bin].mean_bitrate_kbps += bitrate;
  }
  for (InterestBin& bin : bins)
    if (bin.count > 0) bin.mean_bitrate_kbps /= static_cast<double>(bin.count);
  return bins;
}

std::vector<std::pair<double, double>> pooled_weight_bitrate(
    const std::vector<SessionMetrics>& runs, std::string_view method) {
  std::vector<std::pair<double, double>> pairs;
  for (const SessionMetrics& run : runs) {
    if (run.method != method) continue;
    for (const ChunkLogEntry& entry : run.chunk_log)
      pairs.emplace_back(entry.weight, entry.bitrate_kbps);
  }
  return pairs;
}

void write_sessions_csv(const std::vector<SessionMetrics>& runs, std::ostream& out) {
  out << "method,session,total_rebuffer_s,startup_delay_s,average_bitrate_kbps,"
         "bitrate_variation_kbps,cumulative_reward\n";
  for (const SessionMetrics& run : runs) {
    out << run.method << ',' << run.session_index << ',' << format_double(run.total_rebuffer_s)
        << ',' << format_double(run.startup_delay_s) << ','
        << format_double(run.average_bitrate_kbps) << ','
        << format_double(run.bitrate_variation_kbps) << ','
        << format_double(run.cumulative_reward) << '\n';
  }
}

void write_table_csv(const Summary& summary, std::ostream& out) {
  out << "metric";
  for (const MethodSummary& m : summary.methods) out << ',' << m.method;
  out << '\n';
  auto row = [&](const char* label, auto getter) {
    out << label;
    for (const MethodSummary& m : summary.methods) out << ',' << format_double(getter(m));
    out << '\n';
  };
  row("avg_rebuffer_s", [](const MethodSummary& m) { return m.mean_rebuffer_s; });
  row("std_rebuffer_s", [](const MethodSummary& m) { return m.std_rebuffer_s; });
  row("avg_bitrate_kbps", [](const MethodSummary& m) { return m.mean_bitrate_kbps; });
  row("std_bitrate_kbps", [](const MethodSummary& m) { return m.std_bitrate_kbps; });
  row("avg_variation_kbps_per_chunk", [](const MethodSummary& m) { return m.mean_variation_kbps; });
  row("std_variation_kbps_per_chunk", [](const MethodSummary& m) { return m.std_variation_kbps; });
}

void write_ecdf_csv(const Summary& summary, std::string_view metric, std::ostream& out) {
  out << "method,value,cdf\n";
  for (const MethodSummary& m : summary.methods) {
    const std::vector<double>* values = nullptr;
    if (metric == "bitrate") values = &m.bitrate_values;
    else if (metric == "rebuffer") values = &m.rebuffer_values;
    else if (metric == "variation") values = &m.variation_values;
    else throw EvalError("unknown ECDF metric: " + std::string(metric));
    const double n = static_cast<double>(values->size());
    for (std::size_t i = 0; i < values->size(); ++i)
      out << m.method << ',' << format_double((*values)[i]) << ','
          << format_double(static_cast<double>(i + 1) / n) << '\n';
  }
}

void write_bins_csv(std::span<const InterestBin> bins, std::ostream& out) {
  out << "weight_lo,weight_hi,count,mean_bitrate_kbps\n";
  for (const InterestBin& bin : bins) {
    out << format_double(bin.lo) << ',' << format_double(bin.hi) << ',' << bin.count << ',';
    out << (bin.count > 0 ? format_double(bin.mean_bitrate_kbps) : "empty");
    out << '\n';
  }
}

std::string summary_to_json(const Summary& summary) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodSummary& m : summary.methods) {
    methods.push_back({{"method", m.method},
                       {"sessions", m.sessions},
                       {"mean_rebuffer_s", m.mean_rebuffer_s},
                       {"std_rebuffer_s", m.std_rebuffer_s},
                       {"mean_bitrate_kbps", m.mean_bitrate_kbps},
                       {"std_bitrate_kbps", m.std_bitrate_kbps},
                       {"mean_variation_kbps", m.mean_variation_kbps},
                       {"std_variation_kbps", m.std_variation_kbps},
                       {"mean_reward", m.mean_reward},
                       {"bitrate_values", m.bitrate_values},
                       {"rebuffer_values", m.rebuffer_values},
                       {"variation_values", m.variation_values}});
  }
  doc["methods"] = std::move(methods);
  return doc.dump(2) + "\n";
}

Summary summary_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw EvalError(std::string("summary parse failure: ") + e.what());
  }
  Summary summary;
  try {
    for (const auto& m : doc.at("methods")) {
      MethodSummary method;
      method.method = m.at("method").get<std::string>();
      method.sessions = m.at("sessions").get<std::size_t>();
      method.mean_rebuffer_s = m.at("mean_rebuffer_s").get<double>();
      method.std_rebuffer_s = m.at("std_rebuffer_s").get<double>();
      method.mean_bitrate_kbps = m.at("mean_bitrate_kbps").get<double>();
      method.std_bitrate_kbps = m.at("std_bitrate_kbps").get<double>();
      method.mean_variation_kbps = m.at("mean_variation_kbps").get<double>();
      method.std_variation_kbps = m.at("std_variation_kbps").get<double>();
      method.mean_reward = m.at("mean_reward").get<double>();
      method.bitrate_values = m.at("bitrate_values").get<std::vector<double>>();
      method.rebuffer_values = m.at("rebuffer_values").get<std::vector<double>>();
      method.variation_values = m.at("variation_values").get<std::vector<double>>();
      summary.methods.push_back(std::move(method));
    }
  } catch (const nlohmann::json::exception& e) {
    throw EvalError(std::string("summary schema violation: ") + e.what());
  }
  return summary;
}

}  // namespace coi
