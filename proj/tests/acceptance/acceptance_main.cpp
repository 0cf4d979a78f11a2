// Acceptance suite: one line per criterion, nonzero exit on any failure.
// argv[1] must point at the CLI binary (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "coi/agents.hpp"
#include "coi/eval.hpp"
#include "coi/interest.hpp"
#include "coi/io_util.hpp"
#include "coi/media.hpp"
#include "coi/rng.hpp"
#include "coi/sim.hpp"
#include "coi/trace.hpp"

namespace fs = std::filesystem;
using namespace coi;

namespace {

int failures = 0;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool ok, const std::string& label, const std::string& detail,
            double seconds) {
  std::ostringstream line;
  line << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << label << " (" << detail
       << ") [" << static_cast<int>(seconds + 0.5) << "s]";
  std::cout << line.str() << std::endl;
  if (!ok) ++failures;
}

// --- criterion 1: gradient fidelity ----------------------------------------

bool preactivations_near_kink(const Network& net, std::span<const double> input, double margin) {
  std::vector<double> activation(input.begin(), input.end());
  for (const Layer& layer : net.layers()) {
    std::vector<double> next(layer.out_dim, 0.0);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      double z = layer.biases[o];
      for (std::size_t i = 0; i < layer.in_dim; ++i)
        z += layer.weights[o * layer.in_dim + i] * activation[i];
      if (layer.activation == Activation::kRectifier && std::abs(z) < margin) return true;
      next[o] = layer.activation == Activation::kRectifier ? std::max(0.0, z) : z;
    }
    activation.swap(next);
  }
  return false;
}

void criterion_gradient_fidelity() {
  Stopwatch watch;
  Rng rng(101);
  double worst = 0.0;
  int checked = 0;
  while (checked < 100) {
    const std::size_t input_dim = 1 + rng.index(8);
    const std::size_t depth = 1 + rng.index(3);  // <= 3 layers
    std::vector<LayerSpec> specs;
    for (std::size_t l = 0; l + 1 < depth; ++l)
      specs.push_back({1 + rng.index(64), Activation::kRectifier});
    specs.push_back({1 + rng.index(8), Activation::kLinear});
    Network net = Network::make(input_dim, specs, rng);
    std::vector<double> input(input_dim);
    for (double& x : input) x = rng.uniform(-1.5, 1.5);
    if (preactivations_near_kink(net, input, 1e-3)) continue;

    std::vector<double> target(net.output_dim());
    for (double& t : target) t = rng.uniform(-1.0, 1.0);
    const auto loss = [&](std::span<const double> y) {
      double sum = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) sum += (y[i] - target[i]) * (y[i] - target[i]);
      return sum;
    };
    const auto loss_grad = [&](std::span<const double> y) {
      std::vector<double> g(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) g[i] = 2.0 * (y[i] - target[i]);
      return g;
    };
    worst = std::max(worst, gradient_check(net, loss, loss_grad, input));
    ++checked;
  }
  std::ostringstream detail;
  detail << "max relative error " << worst << " over 100 networks";
  report(1, worst < 1e-4 && watch.seconds() < 60.0, "gradient fidelity", detail.str(),
         watch.seconds());
}

// --- criterion 2: simulator oracle ------------------------------------------

double stepped_download_time(const BandwidthTrace& trace, double start_s, double size_kbit,
                             double dt = 0.001) {
  double t = start_s;
  double remaining = size_kbit;
  std::size_t seg = 0;
  while (seg + 1 < trace.samples.size() && trace.samples[seg + 1].time_s <= t) ++seg;
  while (true) {
    double tick_end = t + dt;
    if (seg + 1 < trace.samples.size())
      tick_end = std::min(tick_end, trace.samples[seg + 1].time_s);
    remaining -= trace.samples[seg].throughput_kbps * (tick_end - t);
    t = tick_end;
    if (remaining <= 0.0) return t - start_s;
    if (seg + 1 < trace.samples.size() && t >= trace.samples[seg + 1].time_s) ++seg;
  }
}

void criterion_simulator_oracle() {
  Stopwatch watch;
  Rng rng(202);
  double worst_gap = 0.0;
  for (int round = 0; round < 1000; ++round) {
    BandwidthTrace trace;
    trace.name = "oracle";
    double t = 0.0;
    const int segments = 1 + static_cast<int>(rng.index(12));
    for (int i = 0; i < segments; ++i) {
      trace.samples.push_back({t, rng.uniform(100.0, 6000.0)});
      t += rng.uniform(0.5, 8.0);
    }
    const double start = rng.uniform(0.0, 25.0);
    const double size = rng.uniform(100.0, 25000.0);
    worst_gap = std::max(worst_gap, std::abs(compute_download_time(trace, start, size) -
                                             stepped_download_time(trace, start, size)));
  }

  // session bookkeeping closure over random sessions
  double worst_closure = 0.0;
  for (int round = 0; round < 50; ++round) {
    ManifestConfig mconfig;
    mconfig.num_chunks = 60;
    mconfig.size_noise = 0.3;
    const VideoManifest manifest = generate_manifest(mconfig, 300 + round);
    const BandwidthTrace trace =
        generate_synthetic_trace({1500.0, 1200.0, 3.0, 3000.0}, 400 + round);
    Environment env(manifest, trace, RewardParams{}, SimConfig{});
    double downloads = 0.0;
    double waits = 0.0;
    double stalls = 0.0;
    while (!env.terminal()) {
      const StepOutcome outcome =
          env.step(manifest.bitrates_kbps[rng.index(manifest.bitrates_kbps.size())]);
      downloads += outcome.download_time_s;
      waits += outcome.wait_s;
      stalls += outcome.rebuffer_s;
    }
    worst_closure =
        std::max(worst_closure, std::abs(env.wall_clock_s() - (downloads + waits)));
    const double playback = manifest.total_duration_s();
    const double accounted =
        env.wall_clock_s() - stalls - env.startup_delay_s() + env.buffer_s();
    worst_closure = std::max(worst_closure, std::abs(playback - accounted));
  }

  std::ostringstream detail;
  detail << "download-time gap " << worst_gap << " s over 1000 traces; bookkeeping gap "
         << worst_closure << " s";
  report(2, worst_gap < 0.002 && worst_closure < 1e-9 && watch.seconds() < 60.0,
         "simulator oracle", detail.str(), watch.seconds());
}

// --- criterion 3: policy unit conformance -----------------------------------

void criterion_policy_conformance() {
  Stopwatch watch;
  const std::vector<double> ladder = default_bitrate_ladder();
  bool ok = true;
  std::ostringstream detail;

  // reservoir/cushion boundaries and interior map
  ok &= bba_select(0.0, ladder) == 350.0;
  ok &= bba_select(5.0, ladder) == 350.0;
  ok &= bba_select(25.0, ladder) == 3000.0;
  ok &= bba_select(15.0, ladder) == 1000.0;
  for (double buffer = 0.0; buffer <= 30.0 && ok; buffer += 0.01) {
    double expected = 350.0;
    if (buffer <= 5.0) {
      expected = 350.0;
    } else if (buffer >= 25.0) {
      expected = 3000.0;
    } else {
      const double target = 350.0 + (buffer - 5.0) / 20.0 * 2650.0;
      for (double b : ladder)
        if (b <= target) expected = b;
    }
    ok &= bba_select(buffer, ladder) == expected;
  }
  if (!ok) detail << "bba mapping mismatch; ";

  // rba floor over random histories
  Rng rng(303);
  bool rba_ok = true;
  for (int round = 0; round < 1000; ++round) {
    ThroughputHistory history;
    const std::size_t n = 1 + rng.index(5);
    for (std::size_t i = 0; i < n; ++i) history.push(rng.uniform(120.0, 5200.0));
    const double prediction = predict_throughput(history, 1, 350.0)[0];
    double expected = ladder.front();
    for (double b : ladder)
      if (b <= prediction) expected = b;
    rba_ok &= rba_select(prediction, ladder) == expected;
  }
  if (!rba_ok) detail << "rba floor mismatch; ";
  ok &= rba_ok;

  // mpc horizon 1 == greedy one-step argmax
  ManifestConfig mconfig;
  mconfig.num_chunks = 30;
  mconfig.size_noise = 0.2;
  const VideoManifest manifest = generate_manifest(mconfig, 99);
  bool mpc_ok = true;
  for (int round = 0; round < 1000; ++round) {
    const std::size_t next_chunk = rng.index(manifest.num_chunks());
    StateObservation obs;
    obs.predicted_throughput_kbps = {rng.uniform(100.0, 5000.0)};
    obs.buffer_s = rng.uniform(0.0, 60.0);
    obs.last_bitrate_kbps = ladder[rng.index(ladder.size())];
    obs.next_chunk_sizes_kbit = manifest.chunks[next_chunk].sizes_kbit;
    std::vector<double> errors;
    const std::size_t n_errors = rng.index(5);
    for (std::size_t i = 0; i < n_errors; ++i) errors.push_back(rng.uniform(0.0, 1.2));

    MpcModel model;
    model.manifest = &manifest;
    model.horizon = 1;
    const double chosen = mpc_select(obs, next_chunk, model, errors);

    double max_err = 0.0;
    for (double e : errors) max_err = std::max(max_err, e);
    const double robust = obs.predicted_throughput_kbps[0] / (1.0 + max_err);
    double best_value = -1e300;
    double best_bitrate = ladder.front();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const double d = manifest.chunks[next_chunk].sizes_kbit[i] / robust;
      const double stall = std::max(d - obs.buffer_s, 0.0);
      const double value =
          ladder[i] - 3000.0 * stall - std::abs(ladder[i] - obs.last_bitrate_kbps);
      if (value > best_value) {
        best_value = value;
        best_bitrate = ladder[i];
      }
    }
    mpc_ok &= chosen == best_bitrate;
  }
  if (!mpc_ok) detail << "mpc horizon-1 mismatch; ";
  ok &= mpc_ok;

  if (ok) detail << "bba boundary+interior sweep, 1000 rba floors, 1000 mpc states";
  report(3, ok && watch.seconds() < 60.0, "policy unit conformance", detail.str(),
         watch.seconds());
}

// --- criterion 4: toy DQN convergence ---------------------------------------

struct ToyWorld {
  VideoManifest manifest;
  BandwidthTrace trace;
  RewardParams params;
  SimConfig config;
};

ToyWorld make_toy_world() {
  ToyWorld world;
  ManifestConfig mconfig;
  mconfig.name = "toy";
  mconfig.num_chunks = 20;
  mconfig.size_noise = 0.0;
  world.manifest = generate_manifest(mconfig, 7);
  for (ChunkRecord& c : world.manifest.chunks) c.interestingness = 3.0;  // weight 2
  world.trace = BandwidthTrace{"c2500", {{0.0, 2500.0}}};
  return world;
}

// Value iteration over (chunk, buffer bucket, previous rung). The buffer
// grid is fine enough that rounding sits far inside the 5% margin.
double toy_optimal_return(const ToyWorld& world) {
  const auto& ladder = world.manifest.bitrates_kbps;
  const std::size_t num_actions = ladder.size();
  const std::size_t chunks = world.manifest.num_chunks();
  const double dur = world.manifest.chunk_duration_s;
  const double cap = world.config.buffer_cap_s;
  const double gamma = world.params.gamma;
  constexpr double kStep = 1e-3;
  const auto buckets = static_cast<std::size_t>(cap / kStep) + 1;

  std::vector<double> download(num_actions);
  for (std::size_t a = 0; a < num_actions; ++a)
    download[a] =
        world.manifest.chunks[0].sizes_kbit[a] / world.trace.samples[0].throughput_kbps;

  const double weight = 2.0;
  std::vector<double> next(buckets * num_actions, 0.0);
  std::vector<double> current(buckets * num_actions, 0.0);
  for (std::size_t t = chunks; t-- > 0;) {
    for (std::size_t bucket = 0; bucket < buckets; ++bucket) {
      const double buffer = static_cast<double>(bucket) * kStep;
      for (std::size_t prev = 0; prev < num_actions; ++prev) {
        double best = -1e300;
        for (std::size_t a = 0; a < num_actions; ++a) {
          const double stall = t == 0 ? 0.0 : std::max(download[a] - buffer, 0.0);
          const double reward = weight * ladder[a] - world.params.alpha * stall -
                                world.params.beta * std::abs(ladder[a] - ladder[prev]);
          double value = reward;
          if (t + 1 < chunks) {
            const double new_buffer = std::min(std::max(buffer - download[a], 0.0) + dur, cap);
            const auto new_bucket = static_cast<std::size_t>(std::round(new_buffer / kStep));
            value += gamma * next[new_bucket * num_actions + a];
          }
          best = std::max(best, value);
        }
        current[bucket * num_actions + prev] = best;
      }
    }
    next.swap(current);
  }
  return next[0 * num_actions + 0];  // buffer 0, previous = lowest rung
}

double toy_greedy_return(const ToyWorld& world, const DqnTrainResult& agent) {
  Environment env(world.manifest, world.trace, world.params, world.config);
  double value = 0.0;
  double discount = 1.0;
  Rng unused(0);
  while (!env.terminal()) {
    const std::vector<double> state = normalized_state(env.observe(), agent.normalization);
    const std::size_t action = dqn_select_action(agent.net, state, 0.0, unused);
    const StepOutcome outcome = env.step(agent.bitrates_kbps[action]);
    value += discount * outcome.reward;
    discount *= world.params.gamma;
  }
  return value;
}

void criterion_toy_convergence() {
  Stopwatch watch;
  const ToyWorld world = make_toy_world();
  const double optimal = toy_optimal_return(world);

  DqnConfig config;
  config.sessions = 400;
  config.hidden_dims = {32, 32};
  config.batch_size = 32;
  config.batches_per_update = 2;
  config.target_mix = 0.1;
  config.learning_rate = 1e-3;
  config.seed = 404;
  const DqnTrainResult agent = dqn_train(
      [&world](std::size_t) {
        return Environment(world.manifest, world.trace, world.params, world.config);
      },
      config, WeightMode::kCoi);
  const double achieved = toy_greedy_return(world, agent);

  std::ostringstream detail;
  detail << "greedy discounted return " << achieved << " vs optimal " << optimal << " ("
         << (achieved / optimal * 100.0) << "%)";
  report(4, achieved >= 0.95 * optimal && watch.seconds() < 600.0, "toy dqn convergence",
         detail.str(), watch.seconds());
}

// --- criteria 5 and 6: interest alignment and QoE non-degradation -----------

struct AlignmentSetup {
  std::vector<BandwidthTrace> train_traces;
  std::vector<BandwidthTrace> eval_traces;
  ManifestConfig manifest_gen;
  RewardParams reward;
  SimConfig sim;
};

AlignmentSetup make_alignment_setup() {
  AlignmentSetup setup;
  // Training sees rougher bandwidth than evaluation so the learned policy
  // carries a safety margin into the 2000 kbps evaluation profile.
  const SyntheticTraceProfile train_profile{1800.0, 1260.0, 12.0, 2400.0};
  const SyntheticTraceProfile eval_profile{2000.0, 900.0, 12.0, 2400.0};
  for (std::size_t i = 0; i < 10; ++i) {
    setup.train_traces.push_back(
        generate_synthetic_trace(train_profile, 500 + i, "train-" + std::to_string(i)));
    setup.eval_traces.push_back(
        generate_synthetic_trace(eval_profile, 900 + i, "eval-" + std::to_string(i)));
  }
  setup.manifest_gen.num_chunks = 200;
  setup.manifest_gen.size_noise = 0.05;
  setup.manifest_gen.interest.beta_a = 1.2;
  setup.manifest_gen.interest.beta_b = 2.4;
  setup.manifest_gen.interest.scene_length = 6;
  return setup;
}

VideoManifest alignment_manifest(const AlignmentSetup& setup, std::uint64_t seed) {
  ManifestConfig config = setup.manifest_gen;
  config.name = "m" + std::to_string(seed);
  return generate_manifest(config, seed);
}

DqnTrainResult train_alignment_agent(const AlignmentSetup& setup, WeightMode mode,
                                     std::uint64_t seed, std::size_t sessions) {
  DqnConfig config;
  config.sessions = sessions;
  config.hidden_dims = {64, 64};
  config.batch_size = 64;
  config.batches_per_update = 2;
  config.target_mix = 0.1;
  config.learning_rate = 1e-3;
  config.seed = seed;
  return dqn_train(
      [&setup](std::size_t session) {
        return Environment(alignment_manifest(setup, 2000 + session),
                           setup.train_traces[session % setup.train_traces.size()], setup.reward,
                           setup.sim);
      },
      config, mode);
}

void criteria_alignment_and_qoe(const std::string& scratch_dir) {
  Stopwatch watch;
  const AlignmentSetup setup = make_alignment_setup();
  const std::size_t train_sessions = 500;
  const DqnTrainResult coi_agent =
      train_alignment_agent(setup, WeightMode::kCoi, 11, train_sessions);
  const DqnTrainResult constant_agent =
      train_alignment_agent(setup, WeightMode::kConstant, 12, train_sessions);

  // The training curve itself should improve from early to late sessions.
  const std::size_t window = 50;
  const auto mean_of = [&](std::size_t begin) {
    double sum = 0.0;
    for (std::size_t i = begin; i < begin + window; ++i) sum += coi_agent.reward_history[i];
    return sum / static_cast<double>(window);
  };
  const bool learning_curve_up =
      mean_of(coi_agent.reward_history.size() - window) > mean_of(0);

  DqnPolicy coi_policy("coi", coi_agent.net, coi_agent.normalization, coi_agent.bitrates_kbps);
  DqnPolicy constant_policy("constant", constant_agent.net, constant_agent.normalization,
                            constant_agent.bitrates_kbps);
  BbaPolicy bba;
  RbaPolicy rba;
  MpcPolicy mpc(setup.reward);

  const std::size_t eval_sessions = 20;
  std::vector<SessionMetrics> runs;
  for (Policy* policy :
       std::initializer_list<Policy*>{&bba, &rba, &mpc, &coi_policy, &constant_policy}) {
    for (std::size_t s = 0; s < eval_sessions; ++s) {
      const VideoManifest manifest = alignment_manifest(setup, 9000 + s);
      SessionMetrics metrics =
          run_session(*policy, manifest, setup.eval_traces[s % setup.eval_traces.size()],
                      setup.reward, setup.sim);
      metrics.session_index = s;
      runs.push_back(std::move(metrics));
    }
  }
  const Summary summary = summarize_sessions(runs);

  // keep the artifacts inspectable
  if (!scratch_dir.empty()) {
    fs::create_directories(scratch_dir);
    std::ostringstream sessions_csv;
    write_sessions_csv(runs, sessions_csv);
    write_text_file((fs::path(scratch_dir) / "alignment_sessions.csv").string(),
                    sessions_csv.str());
    write_text_file((fs::path(scratch_dir) / "alignment_summary.json").string(),
                    summary_to_json(summary));
  }

  const auto spearman_of = [&](const std::string& method) {
    const auto pairs = pooled_weight_bitrate(runs, method);
    const CorrelationResult r = correlation_suite(pairs);
    return std::pair<bool, double>(r.defined, r.defined ? r.spearman : 0.0);
  };
  const auto [coi_defined, coi_rho] = spearman_of("coi");
  const auto [constant_defined, constant_rho] = spearman_of("constant");
  bool baselines_ok = true;
  for (const char* method : {"bba", "rba", "mpc"}) {
    const auto [defined, rho] = spearman_of(method);
    baselines_ok &= !defined || std::abs(rho) < 0.1;
  }

  const auto bins = bin_by_interest_level(pooled_weight_bitrate(runs, "coi"));
  double bottom_mean = 0.0;
  double top_mean = 0.0;
  bool have_bottom = false;
  bool have_top = false;
  for (const InterestBin& bin : bins) {
    if (bin.count == 0) continue;
    if (!have_bottom) {
      bottom_mean = bin.mean_bitrate_kbps;
      have_bottom = true;
    }
    top_mean = bin.mean_bitrate_kbps;
    have_top = true;
  }

  const bool c5_ok = coi_defined && coi_rho > 0.2 &&
                     (!constant_defined || std::abs(constant_rho) < 0.1) && baselines_ok &&
                     have_bottom && have_top && top_mean > bottom_mean && learning_curve_up;
  std::ostringstream c5_detail;
  c5_detail << "coi spearman " << coi_rho << ", constant " << constant_rho << ", top bin "
            << top_mean << " vs bottom " << bottom_mean << " kbps, curve "
            << (learning_curve_up ? "up" : "flat");
  report(5, c5_ok && watch.seconds() < 1800.0, "interest alignment", c5_detail.str(),
         watch.seconds());

  const auto method_summary = [&](const std::string& name) -> const MethodSummary& {
    for (const MethodSummary& m : summary.methods)
      if (m.method == name) return m;
    throw EvalError("method missing from summary: " + name);
  };
  const double coi_rebuffer = method_summary("coi").mean_rebuffer_s;
  const double mpc_rebuffer = method_summary("mpc").mean_rebuffer_s;
  const double coi_bitrate = method_summary("coi").mean_bitrate_kbps;
  const double rba_bitrate = method_summary("rba").mean_bitrate_kbps;
  const bool c6_ok = coi_rebuffer <= 2.0 * mpc_rebuffer && coi_bitrate >= rba_bitrate;
  std::ostringstream c6_detail;
  c6_detail << "rebuffer coi " << coi_rebuffer << " s vs 2x mpc " << 2.0 * mpc_rebuffer
            << " s; bitrate coi " << coi_bitrate << " vs rba " << rba_bitrate << " kbps";
  report(6, c6_ok, "objective qoe non-degradation", c6_detail.str(), watch.seconds());
}

// --- criterion 7: regressor noise floor -------------------------------------

void criterion_regressor_noise_floor() {
  Stopwatch watch;
  PlantedConfig planted;
  planted.num_samples = 4000;
  planted.feature_dim = 16;
  planted.label_noise_sigma = 0.14;
  const Dataset data = make_dataset(generate_planted_samples(planted, 707), 0.9, 708);

  RegressorConfig config;
  config.hidden_dims = {64, 32};
  config.batch_size = 32;
  config.epochs = 60;
  config.learning_rate = 2e-3;
  config.seed = 709;
  const RegressorResult result = train_regressor(data, config);
  const double test_mse = mean_squared_error(result.model, data, data.test_indices);

  std::ostringstream detail;
  detail << "test MSE " << test_mse << " with label noise sigma 0.14";
  report(7, test_mse >= 0.015 && test_mse <= 0.035 && watch.seconds() < 300.0,
         "regressor noise floor", detail.str(), watch.seconds());
}

// --- criterion 8: end-to-end determinism ------------------------------------

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  return status == -1 ? -1 : WEXITSTATUS(status);
}

void criterion_determinism(const std::string& cli) {
  Stopwatch watch;
  const fs::path work = fs::temp_directory_path() / "coi_acceptance_determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string w = work.string();
  bool ok = true;

  ok &= run_command(cli + " gen-traces --out " + w + "/traces --count 3 --mean 2000" +
                    " --amplitude 900 --duration 900 --seed 5 >/dev/null") == 0;
  write_text_file(w + "/config.json",
                  R"({"dqn": {"hidden_dims": [16, 16], "batch_size": 32,
                      "batches_per_update": 1, "replay_capacity": 2000},
                      "manifest_gen": {"num_chunks": 50}})");
  const std::string train = cli + " train-dqn --config " + w + "/config.json --traces " + w +
                            "/traces --sessions 3 --seed 7 --out ";
  ok &= run_command(train + w + "/a >/dev/null") == 0;
  ok &= run_command(train + w + "/b >/dev/null") == 0;
  ok &= read_text_file(w + "/a/dqn_model.json") == read_text_file(w + "/b/dqn_model.json");
  ok &= read_text_file(w + "/a/reward_history.csv") == read_text_file(w + "/b/reward_history.csv");

  const std::string evaluate = cli + " evaluate --config " + w + "/config.json --traces " + w +
                               "/traces --methods bba,rba,mpc,coi --sessions 3 --seed 9" +
                               " --coi-agent " + w + "/a/dqn_agent.json --out ";
  ok &= run_command(evaluate + w + "/e1 >/dev/null") == 0;
  ok &= run_command(evaluate + w + "/e2 >/dev/null") == 0;
  ok &= read_text_file(w + "/e1/summary.json") == read_text_file(w + "/e2/summary.json");
  ok &= read_text_file(w + "/e1/sessions.csv") == read_text_file(w + "/e2/sessions.csv");

  const std::string train_interest = cli + " train-interest --planted --samples 400 --dim 8" +
                                     " --epochs 3 --batch 16 --seed 11 --out ";
  ok &= run_command(train_interest + w + "/i1 >/dev/null") == 0;
  ok &= run_command(train_interest + w + "/i2 >/dev/null") == 0;
  ok &= read_text_file(w + "/i1/interest_model.json") ==
        read_text_file(w + "/i2/interest_model.json");

  report(8, ok, "end-to-end determinism",
         "checkpoints, reward histories, summaries byte-identical across reruns",
         watch.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: coi_acceptance <path-to-cli> [scratch-dir]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::string scratch = argc > 2 ? argv[2] : std::string();

  criterion_gradient_fidelity();
  criterion_simulator_oracle();
  criterion_policy_conformance();
  criterion_toy_convergence();
  criteria_alignment_and_qoe(scratch);
  criterion_regressor_noise_floor();
  criterion_determinism(cli);

  if (failures == 0) {
    std::cout << "acceptance: all criteria passed" << std::endl;
    return 0;
  }
  std::cout << "acceptance: " << failures << " criterion(s) failed" << std::endl;
  return 1;
}
