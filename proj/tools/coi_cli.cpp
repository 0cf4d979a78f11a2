// Batch entry points for the interest-aware ABR toolkit: synthetic input
// generation, DQN and regressor training, session evaluation, and report
// emission. Every subcommand is deterministic under --seed.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coi/agents.hpp"
#include "coi/eval.hpp"
#include "coi/interest.hpp"
#include "coi/io_util.hpp"
#include "coi/media.hpp"
#include "coi/sim.hpp"
#include "coi/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Invalid configuration or unusable inputs; mapped to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  try {
    return json::parse(coi::read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config parse failure: " + std::string(e.what()));
  }
}

template <typename T>
T config_get(const json& config, const char* section, const char* key, T fallback) {
  if (!config.contains(section)) return fallback;
  const json& s = config.at(section);
  if (!s.contains(key)) return fallback;
  try {
    return s.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key ") + section + "." + key + ": " + e.what());
  }
}

std::vector<coi::BandwidthTrace> load_trace_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("trace directory not found: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw ConfigError("no .csv traces in " + dir);
  std::vector<coi::BandwidthTrace> traces;
  traces.reserve(paths.size());
  for (const std::string& path : paths) traces.push_back(coi::load_trace_file(path));
  return traces;
}

// Session input source shared by training and evaluation: traces round-robin
// from a directory, manifests either fixed from a file or generated fresh
// per session.
struct SessionSource {
  std::vector<coi::BandwidthTrace> traces;
  std::optional<coi::VideoManifest> fixed_manifest;
  coi::ManifestConfig manifest_gen;
  coi::RewardParams reward;
  coi::SimConfig sim;
  std::uint64_t seed = 0;

  coi::VideoManifest manifest_for(std::size_t session) const {
    if (fixed_manifest) return *fixed_manifest;
    coi::ManifestConfig config = manifest_gen;
    config.name = manifest_gen.name + "-" + std::to_string(session);
    return coi::generate_manifest(config, mix_seed(seed, 1000 + session));
  }
  const coi::BandwidthTrace& trace_for(std::size_t session) const {
    return traces[session % traces.size()];
  }
  coi::Environment environment_for(std::size_t session) const {
    return coi::Environment(manifest_for(session), trace_for(session), reward, sim);
  }
};

struct ExperimentOptions {
  std::string config_path;
  std::string out_dir;
  std::string traces_dir;
  std::string manifest_path;
  std::uint64_t seed = 0;
  std::size_t sessions = 0;  // 0 = take from config/default
};

SessionSource build_session_source(const ExperimentOptions& opts, const json& config) {
  SessionSource source;
  source.seed = opts.seed;

  std::string traces_dir = opts.traces_dir;
  if (traces_dir.empty()) traces_dir = config_get<std::string>(config, "paths", "traces_dir", "");
  if (traces_dir.empty()) throw ConfigError("no trace directory given (--traces)");
  source.traces = load_trace_dir(traces_dir);

  std::string manifest_path = opts.manifest_path;
  if (manifest_path.empty())
    manifest_path = config_get<std::string>(config, "paths", "manifest", "");
  if (!manifest_path.empty()) {
    if (!fs::exists(manifest_path)) throw ConfigError("manifest not found: " + manifest_path);
    source.fixed_manifest = coi::load_manifest_file(manifest_path);
  }

  source.manifest_gen.num_chunks =
      config_get<std::size_t>(config, "manifest_gen", "num_chunks", 200);
  source.manifest_gen.chunk_duration_s =
      config_get<double>(config, "manifest_gen", "chunk_duration_s", 4.0);
  source.manifest_gen.size_noise = config_get<double>(config, "manifest_gen", "size_noise", 0.05);
  source.manifest_gen.interest.beta_a = config_get<double>(config, "manifest_gen", "beta_a", 2.0);
  source.manifest_gen.interest.beta_b = config_get<double>(config, "manifest_gen", "beta_b", 5.0);
  source.manifest_gen.interest.scene_length =
      config_get<std::size_t>(config, "manifest_gen", "scene_length", 1);
  source.manifest_gen.bitrates_kbps = config_get<std::vector<double>>(
      config, "manifest_gen", "bitrates_kbps", coi::default_bitrate_ladder());

  source.reward.alpha = config_get<double>(config, "reward", "alpha", 3000.0);
  source.reward.beta = config_get<double>(config, "reward", "beta", 1.0);
  source.reward.gamma = config_get<double>(config, "reward", "gamma", 0.8);

  source.sim.bandwidth_horizon_k =
      config_get<std::size_t>(config, "sim", "bandwidth_horizon_k", 2);
  source.sim.interest_horizon_h =
      config_get<std::size_t>(config, "sim", "interest_horizon_h", 3);
  source.sim.buffer_cap_s = config_get<double>(config, "sim", "buffer_cap_s", 60.0);
  source.sim.cold_start_kbps = config_get<double>(config, "sim", "cold_start_kbps", 350.0);
  return source;
}

coi::DqnConfig build_dqn_config(const json& config) {
  coi::DqnConfig dqn;
  dqn.epsilon = config_get<double>(config, "dqn", "epsilon", dqn.epsilon);
  dqn.gamma = config_get<double>(config, "dqn", "gamma", dqn.gamma);
  dqn.batch_size = config_get<std::size_t>(config, "dqn", "batch_size", dqn.batch_size);
  dqn.batches_per_update =
      config_get<std::size_t>(config, "dqn", "batches_per_update", dqn.batches_per_update);
  dqn.target_mix = config_get<double>(config, "dqn", "target_mix", dqn.target_mix);
  dqn.replay_capacity =
      config_get<std::size_t>(config, "dqn", "replay_capacity", dqn.replay_capacity);
  dqn.hidden_dims =
      config_get<std::vector<std::size_t>>(config, "dqn", "hidden_dims", dqn.hidden_dims);
  dqn.learning_rate = config_get<double>(config, "dqn", "learning_rate", dqn.learning_rate);
  dqn.reward_scale = config_get<double>(config, "dqn", "reward_scale", dqn.reward_scale);
  dqn.constant_weight = config_get<double>(config, "dqn", "constant_weight", dqn.constant_weight);
  return dqn;
}

void ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw ConfigError("no output directory given (--out)");
  fs::create_directories(out_dir);
}

// --- subcommands -----------------------------------------------------------

int run_gen_traces(const std::string& out_dir, std::size_t count,
                   const coi::SyntheticTraceProfile& profile, std::uint64_t seed) {
  ensure_out_dir(out_dir);
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "trace_%03zu", i);
    const coi::BandwidthTrace trace =
        coi::generate_synthetic_trace(profile, mix_seed(seed, i), name);
    std::ostringstream out;
    coi::serialize_trace(trace, out);
    coi::write_text_file((fs::path(out_dir) / (std::string(name) + ".csv")).string(), out.str());
  }
  std::cout << "wrote " << count << " traces to " << out_dir << "\n";
  return 0;
}

int run_gen_manifest(const std::string& out_path, const coi::ManifestConfig& config,
                     std::uint64_t seed) {
  if (out_path.empty()) throw ConfigError("no output path given (--out)");
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  const coi::VideoManifest manifest = coi::generate_manifest(config, seed);
  std::ostringstream out;
  coi::serialize_manifest(manifest, out);
  coi::write_text_file(out_path, out.str());
  std::cout << "wrote manifest (" << manifest.num_chunks() << " chunks) to " << out_path << "\n";
  return 0;
}

int run_train_dqn(const ExperimentOptions& opts, const std::string& weight_mode_name,
                  std::size_t cli_sessions) {
  const json config = load_config(opts.config_path);
  ensure_out_dir(opts.out_dir);
  SessionSource source = build_session_source(opts, config);
  coi::DqnConfig dqn = build_dqn_config(config);
  dqn.seed = opts.seed;
  dqn.sessions = cli_sessions > 0
                     ? cli_sessions
                     : config_get<std::size_t>(config, "dqn", "sessions", dqn.sessions);
  const coi::WeightMode mode = coi::weight_mode_from_name(weight_mode_name);

  const coi::DqnTrainResult result = coi::dqn_train(
      [&source](std::size_t session) { return source.environment_for(session); }, dqn, mode);

  const fs::path out(opts.out_dir);
  coi::save_agent_checkpoint(result, (out / "dqn_model.json").string(),
                             (out / "dqn_agent.json").string());
  std::ostringstream history;
  history << "session,cumulative_reward\n";
  for (std::size_t i = 0; i < result.reward_history.size(); ++i)
    history << i << ',' << coi::format_double(result.reward_history[i]) << '\n';
  coi::write_text_file((out / "reward_history.csv").string(), history.str());
  std::cout << "trained " << weight_mode_name << " agent over " << dqn.sessions
            << " sessions; checkpoint in " << opts.out_dir << "\n";
  return 0;
}

int run_train_interest(const std::string& out_dir, const std::string& features_path, bool planted,
                       const coi::PlantedConfig& planted_config,
                       const coi::RegressorConfig& regressor_config, double train_fraction,
                       std::uint64_t seed) {
  ensure_out_dir(out_dir);
  std::vector<coi::FeatureSample> samples;
  if (!features_path.empty()) {
    if (!fs::exists(features_path)) throw ConfigError("feature file not found: " + features_path);
    std::ifstream in(features_path);
    samples = coi::load_feature_csv(in);
  } else if (planted) {
    samples = coi::generate_planted_samples(planted_config, mix_seed(seed, 7));
  } else {
    throw ConfigError("either --features or --planted is required");
  }

  const coi::Dataset data =
      coi::make_dataset(std::move(samples), train_fraction, mix_seed(seed, 8));
  coi::RegressorConfig rc = regressor_config;
  rc.seed = mix_seed(seed, 9);
  const coi::RegressorResult result = coi::train_regressor(data, rc);

  const fs::path out(out_dir);
  {
    std::ofstream model_out(out / "interest_model.json", std::ios::binary | std::ios::trunc);
    result.model.save(model_out);
  }
  std::ostringstream history;
  history << "epoch,train_mse\n";
  for (std::size_t e = 0; e < result.loss_history.size(); ++e)
    history << e << ',' << coi::format_double(result.loss_history[e]) << '\n';
  coi::write_text_file((out / "loss_history.csv").string(), history.str());

  json metrics;
  metrics["train_mse"] = coi::mean_squared_error(result.model, data, data.train_indices);
  metrics["train_samples"] = data.train_indices.size();
  metrics["test_samples"] = data.test_indices.size();
  if (!data.test_indices.empty()) {
    metrics["test_mse"] = coi::mean_squared_error(result.model, data, data.test_indices);
    metrics["test_mean_error"] = coi::mean_error(result.model, data, data.test_indices);
    metrics["test_mean_abs_error"] = coi::mean_abs_error(result.model, data, data.test_indices);
  }
  coi::write_text_file((out / "metrics.json").string(), metrics.dump(2) + "\n");
  std::cout << "trained interest regressor; metrics in " << out_dir << "/metrics.json\n";
  return 0;
}

int run_evaluate(const ExperimentOptions& opts, const std::string& methods_csv,
                 const std::string& coi_agent_path, const std::string& constant_agent_path,
                 bool chunk_logs) {
  const json config = load_config(opts.config_path);
  ensure_out_dir(opts.out_dir);
  SessionSource source = build_session_source(opts, config);
  const std::size_t sessions = opts.sessions > 0
                                   ? opts.sessions
                                   : config_get<std::size_t>(config, "eval", "sessions", 20);

  const std::vector<std::string> methods = split_list(
      !methods_csv.empty() ? methods_csv
                           : config_get<std::string>(config, "eval", "methods", "bba,rba,mpc"));
  if (methods.empty()) throw ConfigError("no methods selected");

  std::vector<std::unique_ptr<coi::Policy>> policies;
  for (const std::string& method : methods) {
    if (method == "bba") {
      policies.push_back(std::make_unique<coi::BbaPolicy>());
    } else if (method == "rba") {
      policies.push_back(std::make_unique<coi::RbaPolicy>());
    } else if (method == "mpc") {
      policies.push_back(std::make_unique<coi::MpcPolicy>(source.reward));
    } else if (method == "coi") {
      if (coi_agent_path.empty()) throw ConfigError("method coi requires --coi-agent");
      policies.push_back(std::make_unique<coi::DqnPolicy>(
          coi::DqnPolicy::from_checkpoint(coi_agent_path, "coi")));
    } else if (method == "constant") {
      if (constant_agent_path.empty())
        throw ConfigError("method constant requires --constant-agent");
      policies.push_back(std::make_unique<coi::DqnPolicy>(
          coi::DqnPolicy::from_checkpoint(constant_agent_path, "constant")));
    } else {
      throw ConfigError("unknown method: " + method);
    }
  }

  const fs::path out(opts.out_dir);
  if (chunk_logs) fs::create_directories(out / "chunk_logs");
  std::vector<coi::SessionMetrics> runs;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    for (std::size_t s = 0; s < sessions; ++s) {
      const coi::VideoManifest manifest = source.manifest_for(s);
      coi::SessionMetrics metrics = coi::run_session(*policies[p], manifest, source.trace_for(s),
                                                     source.reward, source.sim);
      metrics.session_index = s;
      if (chunk_logs) {
        std::ostringstream log;
        coi::write_chunk_log_csv(metrics.chunk_log, log);
        const std::string file =
            std::string(policies[p]->name()) + "_session" + std::to_string(s) + ".csv";
        coi::write_text_file((out / "chunk_logs" / file).string(), log.str());
      }
      runs.push_back(std::move(metrics));
    }
  }

  const coi::Summary summary = coi::summarize_sessions(runs);
  coi::write_text_file((out / "summary.json").string(), coi::summary_to_json(summary));
  std::ostringstream sessions_csv;
  coi::write_sessions_csv(runs, sessions_csv);
  coi::write_text_file((out / "sessions.csv").string(), sessions_csv.str());

  std::ostringstream pairs_csv;
  pairs_csv << "method,weight,bitrate_kbps\n";
  for (const coi::SessionMetrics& run : runs)
    for (const coi::ChunkLogEntry& e : run.chunk_log)
      pairs_csv << run.method << ',' << coi::format_double(e.weight) << ','
                << coi::format_double(e.bitrate_kbps) << '\n';
  coi::write_text_file((out / "chunk_pairs.csv").string(), pairs_csv.str());

  std::cout << "evaluated " << methods.size() << " methods over " << sessions
            << " sessions; summary in " << opts.out_dir << "/summary.json\n";
  return 0;
}

int run_report(const std::string& in_dir, const std::string& out_dir) {
  const fs::path in(in_dir);
  const fs::path summary_path = in / "summary.json";
  const fs::path pairs_path = in / "chunk_pairs.csv";
  if (!fs::exists(summary_path))
    throw ConfigError("missing evaluation output: " + summary_path.string());
  if (!fs::exists(pairs_path))
    throw ConfigError("missing evaluation output: " + pairs_path.string());
  ensure_out_dir(out_dir);

  const coi::Summary summary = coi::summary_from_json(coi::read_text_file(summary_path.string()));

  // method -> pooled (weight, bitrate) pairs, keeping first-seen method order
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> pooled;
  {
    std::ifstream pairs_in(pairs_path);
    std::string line;
    std::getline(pairs_in, line);  // header
    std::size_t line_no = 1;
    while (std::getline(pairs_in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = coi::split_csv_line(line);
      if (fields.size() != 3)
        throw ConfigError("bad chunk_pairs row at line " + std::to_string(line_no));
      const auto weight = coi::parse_double(fields[1]);
      const auto bitrate = coi::parse_double(fields[2]);
      if (!weight || !bitrate)
        throw ConfigError("bad chunk_pairs row at line " + std::to_string(line_no));
      const std::string method(fields[0]);
      auto it = std::find_if(pooled.begin(), pooled.end(),
                             [&](const auto& entry) { return entry.first == method; });
      if (it == pooled.end()) {
        pooled.push_back({method, {}});
        it = std::prev(pooled.end());
      }
      it->second.emplace_back(*weight, *bitrate);
    }
  }

  const fs::path out(out_dir);
  std::ostringstream table;
  coi::write_table_csv(summary, table);
  coi::write_text_file((out / "table2.csv").string(), table.str());

  for (const char* metric : {"bitrate", "rebuffer", "variation"}) {
    std::ostringstream ecdf;
    coi::write_ecdf_csv(summary, metric, ecdf);
    coi::write_text_file((out / (std::string("ecdf_") + metric + ".csv")).string(), ecdf.str());
  }

  std::ostringstream correlations;
  correlations << "method,pearson,spearman,kendall_tau,defined\n";
  for (const auto& [method, pairs] : pooled) {
    const coi::CorrelationResult r = coi::correlation_suite(pairs);
    correlations << method << ',';
    if (r.defined)
      correlations << coi::format_double(r.pearson) << ',' << coi::format_double(r.spearman)
                   << ',' << coi::format_double(r.kendall_tau) << ",true\n";
    else
      correlations << "undefined,undefined,undefined,false\n";
  }
  coi::write_text_file((out / "correlations.csv").string(), correlations.str());

  std::ostringstream bins_csv;
  bins_csv << "method,weight_lo,weight_hi,count,mean_bitrate_kbps\n";
  for (const auto& [method, pairs] : pooled) {
    for (const coi::InterestBin& bin : coi::bin_by_interest_level(pairs)) {
      bins_csv << method << ',' << coi::format_double(bin.lo) << ',' << coi::format_double(bin.hi)
               << ',' << bin.count << ',';
      bins_csv << (bin.count > 0 ? coi::format_double(bin.mean_bitrate_kbps) : "empty");
      bins_csv << '\n';
    }
  }
  coi::write_text_file((out / "interest_bins.csv").string(), bins_csv.str());

  std::cout << "report written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator and policy toolkit for interest-aware ABR streaming"};
  app.require_subcommand(1);

  // gen-traces
  auto* gen_traces = app.add_subcommand("gen-traces", "Generate synthetic bandwidth traces");
  std::string gt_out;
  std::size_t gt_count = 20;
  coi::SyntheticTraceProfile gt_profile;
  std::uint64_t gt_seed = 0;
  gen_traces->add_option("--out", gt_out, "Output directory")->required();
  gen_traces->add_option("--count", gt_count, "Number of traces");
  gen_traces->add_option("--mean", gt_profile.mean_kbps, "Mean throughput (kbps)");
  gen_traces->add_option("--amplitude", gt_profile.amplitude_kbps, "Uniform variation (kbps)");
  gen_traces->add_option("--segment", gt_profile.segment_duration_s, "Segment duration (s)");
  gen_traces->add_option("--duration", gt_profile.total_duration_s, "Total duration (s)");
  gen_traces->add_option("--seed", gt_seed, "Random seed");

  // gen-manifest
  auto* gen_manifest = app.add_subcommand("gen-manifest", "Generate a synthetic video manifest");
  std::string gm_out;
  std::string gm_bitrates;
  coi::ManifestConfig gm_config;
  std::uint64_t gm_seed = 0;
  gen_manifest->add_option("--out", gm_out, "Output manifest path")->required();
  gen_manifest->add_option("--chunks", gm_config.num_chunks, "Chunk count");
  gen_manifest->add_option("--duration", gm_config.chunk_duration_s, "Chunk duration (s)");
  gen_manifest->add_option("--noise", gm_config.size_noise, "Size noise fraction");
  gen_manifest->add_option("--bitrates", gm_bitrates, "Comma-separated ladder (kbps)");
  gen_manifest->add_option("--beta-a", gm_config.interest.beta_a, "Interest Beta shape a");
  gen_manifest->add_option("--beta-b", gm_config.interest.beta_b, "Interest Beta shape b");
  gen_manifest->add_option("--scene-length", gm_config.interest.scene_length,
                           "Chunks sharing one interest draw");
  gen_manifest->add_option("--name", gm_config.name, "Manifest name");
  gen_manifest->add_option("--seed", gm_seed, "Random seed");

  // train-dqn
  auto* train_dqn = app.add_subcommand("train-dqn", "Train a DQN rate-adaptation agent");
  ExperimentOptions td_opts;
  std::string td_weight_mode = "coi";
  std::size_t td_sessions = 0;
  train_dqn->add_option("--config", td_opts.config_path, "JSON experiment config");
  train_dqn->add_option("--out", td_opts.out_dir, "Output directory")->required();
  train_dqn->add_option("--traces", td_opts.traces_dir, "Directory of trace CSVs");
  train_dqn->add_option("--manifest", td_opts.manifest_path, "Fixed manifest (else generated)");
  train_dqn->add_option("--sessions", td_sessions, "Training sessions");
  train_dqn->add_option("--seed", td_opts.seed, "Random seed");
  train_dqn->add_option("--weight-mode", td_weight_mode, "coi | constant");

  // train-interest
  auto* train_interest = app.add_subcommand("train-interest", "Train the interest regressor");
  std::string ti_out;
  std::string ti_features;
  bool ti_planted = false;
  coi::PlantedConfig ti_planted_config;
  coi::RegressorConfig ti_regressor;
  double ti_train_fraction = 0.9;
  std::uint64_t ti_seed = 0;
  train_interest->add_option("--out", ti_out, "Output directory")->required();
  train_interest->add_option("--features", ti_features, "Feature CSV (chunk_id,label,f...)");
  train_interest->add_flag("--planted", ti_planted, "Use the planted synthetic dataset");
  train_interest->add_option("--samples", ti_planted_config.num_samples, "Planted sample count");
  train_interest->add_option("--dim", ti_planted_config.feature_dim, "Planted feature dim");
  train_interest->add_option("--noise", ti_planted_config.label_noise_sigma,
                             "Planted label noise sigma");
  train_interest->add_option("--epochs", ti_regressor.epochs, "Training epochs");
  train_interest->add_option("--batch", ti_regressor.batch_size, "Batch size");
  train_interest->add_option("--lr", ti_regressor.learning_rate, "Learning rate");
  train_interest->add_option("--train-fraction", ti_train_fraction, "Train split fraction");
  train_interest->add_option("--seed", ti_seed, "Random seed");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Run sessions under selected policies");
  ExperimentOptions ev_opts;
  std::string ev_methods;
  std::string ev_coi_agent;
  std::string ev_constant_agent;
  bool ev_chunk_logs = false;
  evaluate->add_option("--config", ev_opts.config_path, "JSON experiment config");
  evaluate->add_option("--out", ev_opts.out_dir, "Output directory")->required();
  evaluate->add_option("--traces", ev_opts.traces_dir, "Directory of trace CSVs");
  evaluate->add_option("--manifest", ev_opts.manifest_path, "Fixed manifest (else generated)");
  evaluate->add_option("--methods", ev_methods, "Comma list: bba,rba,mpc,coi,constant");
  evaluate->add_option("--sessions", ev_opts.sessions, "Sessions per method");
  evaluate->add_option("--seed", ev_opts.seed, "Random seed");
  evaluate->add_option("--coi-agent", ev_coi_agent, "Sidecar JSON of the coi agent");
  evaluate->add_option("--constant-agent", ev_constant_agent,
                       "Sidecar JSON of the constant-weight agent");
  evaluate->add_flag("--chunk-logs", ev_chunk_logs, "Also write per-session chunk logs");

  // report
  auto* report = app.add_subcommand("report", "Derive tables and plot data from an evaluation");
  std::string rp_in;
  std::string rp_out;
  report->add_option("--in", rp_in, "Evaluation output directory")->required();
  report->add_option("--out", rp_out, "Report output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen_traces->parsed()) return run_gen_traces(gt_out, gt_count, gt_profile, gt_seed);
    if (gen_manifest->parsed()) {
      if (!gm_bitrates.empty()) {
        gm_config.bitrates_kbps.clear();
        for (const std::string& token : split_list(gm_bitrates)) {
          const auto value = coi::parse_double(token);
          if (!value) throw ConfigError("bad bitrate token: " + token);
          gm_config.bitrates_kbps.push_back(*value);
        }
      }
      return run_gen_manifest(gm_out, gm_config, gm_seed);
    }
    if (train_dqn->parsed()) return run_train_dqn(td_opts, td_weight_mode, td_sessions);
    if (train_interest->parsed())
      return run_train_interest(ti_out, ti_features, ti_planted, ti_planted_config, ti_regressor,
                                ti_train_fraction, ti_seed);
    if (evaluate->parsed())
      return run_evaluate(ev_opts, ev_methods, ev_coi_agent, ev_constant_agent, ev_chunk_logs);
    if (report->parsed()) return run_report(rp_in, rp_out);
    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
