#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "frugal_snn/config.hpp"
#include "frugal_snn/encoder.hpp"
#include "frugal_snn/error.hpp"
#include "frugal_snn/eval.hpp"
#include "frugal_snn/pipeline.hpp"
#include "frugal_snn/plasticity.hpp"
#include "frugal_snn/signal.hpp"
#include "frugal_snn/stp.hpp"
#include "frugal_snn/synth.hpp"

namespace fs = std::filesystem;
using namespace frugal_snn;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("frugal-snn");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("FRUGAL_SNN_LOG");
  const std::string level = env ? env : "info";
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off")
    spdlog::warn("FRUGAL_SNN_LOG='{}' not recognised; using info", level);
  spdlog::set_level(parsed == spdlog::level::off && level != "off" ? spdlog::level::info : parsed);
}

/// Options shared by the commands that build a RunConfig.
struct CommonOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> neurons;
  std::string out;

  void attach(CLI::App* cmd, bool with_network) {
    cmd->add_option("--config", config, "Config file (INI)");
    cmd->add_option("--preset", preset, "artificial, vowel or neural")
        ->check(CLI::IsMember({"artificial", "vowel", "neural"}));
    if (with_network) {
      cmd->add_option("--seed", seed, "RNG seed");
      cmd->add_option("--epochs", epochs, "Training epochs")->check(CLI::PositiveNumber);
      cmd->add_option("--neurons", neurons, "Output neurons")->check(CLI::PositiveNumber);
    }
  }

  config::RunConfig build() const {
    std::optional<std::string> override;
    if (!preset.empty()) override = preset;
    config::RunConfig cfg = config.empty()
                                ? config::RunConfig::from_preset(override.value_or("artificial"))
                                : config::load_config(config, override);
    if (seed) cfg.network.rng_seed = *seed;
    if (epochs) cfg.network.epochs = *epochs;
    if (neurons) cfg.network.n_neurons = *neurons;
    if (!out.empty()) cfg.output.dir = out;
    cfg.validate();
    return cfg;
  }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(p.string() + ": cannot open file for writing");
  out << text;
}

// --- synth ---------------------------------------------------------------

struct SynthOptions {
  std::string generator;
  std::size_t patterns = 4;
  std::size_t trains = 240;
  std::size_t repeats = 0;  // 0: generator default
  std::uint64_t seed = 0;
  std::optional<double> duration_ms, gap_ms, timestep_ms, inner_fraction, density;
  std::string out;
};

int cmd_synth(const SynthOptions& o) {
  pipeline::prepare_output_dir(o.out);
  const fs::path dir = o.out;
  config::RunConfig run_cfg;
  json params;
  fs::path data_file;

  auto apply_common = [&](auto& p) {
    if (o.repeats) p.repeats = o.repeats;
    if (o.duration_ms) p.duration_ms = *o.duration_ms;
    if (o.gap_ms) p.gap_ms = *o.gap_ms;
    if (o.timestep_ms) p.timestep_ms = *o.timestep_ms;
    p.seed = o.seed;
  };
  auto emit_set = [&](const synth::SynthSet& set, const std::string& preset) {
    data_file = dir / "raster.csv";
    save_raster_csv(set.raster, data_file);
    save_raster_csv(set.truth.raster, dir / "truth.csv");
    run_cfg = config::RunConfig::from_preset(preset);
    run_cfg.input.path = "raster.csv";
    run_cfg.input.epoch_steps = set.epoch_steps;
    run_cfg.input.lead_steps = set.lead_steps;
    run_cfg.network.epochs = set.epochs;
    params["epoch_steps"] = set.epoch_steps;
    params["lead_steps"] = set.lead_steps;
    params["labels"] = set.truth.labels;
  };

  if (o.generator == "disjoint") {
    synth::DisjointParams p;
    apply_common(p);
    p.n_patterns = o.patterns;
    p.trains = o.trains;
    if (o.density) p.density = *o.density;
    emit_set(synth::make_disjoint_set(p), "artificial");
    params.update({{"patterns", p.n_patterns}, {"trains", p.trains}, {"repeats", p.repeats},
                   {"duration_ms", p.duration_ms}, {"gap_ms", p.gap_ms},
                   {"timestep_ms", p.timestep_ms}, {"density", p.density}});
  } else if (o.generator == "nested") {
    synth::NestedParams p;
    apply_common(p);
    p.trains = o.trains;
    if (o.density) p.density = *o.density;
    if (o.inner_fraction) p.inner_fraction = *o.inner_fraction;
    emit_set(synth::make_nested_set(p), "artificial");
    params.update({{"trains", p.trains}, {"repeats", p.repeats}, {"duration_ms", p.duration_ms},
                   {"gap_ms", p.gap_ms}, {"timestep_ms", p.timestep_ms},
                   {"density", p.density}, {"inner_fraction", p.inner_fraction}});
  } else if (o.generator == "vowel") {
    synth::VowelParams p;
    apply_common(p);
    emit_set(synth::make_vowel_analogue(p), "vowel");
    params.update({{"channels", p.channels}, {"patterns", p.n_patterns}, {"repeats", p.repeats},
                   {"duration_ms", p.duration_ms}, {"gap_ms", p.gap_ms},
                   {"timestep_ms", p.timestep_ms}, {"lead_ms", p.lead_ms},
                   {"noise_trains_per_block", p.noise_trains_per_block},
                   {"noise_rate", p.noise_rate}, {"drop_prob", p.drop_prob},
                   {"shift_sd", p.shift_sd}});
  } else if (o.generator == "propagating") {
    synth::PropagatingParams p;
    p.seed = o.seed;
    const auto set = synth::make_propagating_set(p);
    data_file = dir / "signal.csv";
    signals::save_signal(set.signal, data_file);
    save_raster_csv(set.truth.raster, dir / "truth.csv");
    run_cfg = config::RunConfig::from_preset("neural");
    run_cfg.input.kind = config::InputKind::signal;
    run_cfg.input.path = "signal.csv";
    params.update({{"channels", p.channels}, {"n_short", p.n_short}, {"n_long", p.n_long},
                   {"short_span", {p.short_span.low, p.short_span.high}},
                   {"long_span", {p.long_span.low, p.long_span.high}},
                   {"sample_period_ms", p.sample_period_ms},
                   {"channel_delay_ms", p.channel_delay_ms}, {"rise_ms", p.rise_ms},
                   {"hold_ms", p.hold_ms}, {"fall_ms", p.fall_ms}, {"gap_ms", p.gap_ms},
                   {"labels", set.truth.labels}});
  } else {
    throw ConfigError("unknown generator '" + o.generator +
                      "' (expected disjoint, nested, vowel or propagating)");
  }

  run_cfg.input.truth = "truth.csv";
  run_cfg.network.rng_seed = o.seed;
  write_text(dir / "run.ini", config::render_config(run_cfg));

  json m;
  m["tool"] = "frugal-snn";
  m["command"] = "synth";
  m["generator"] = o.generator;
  m["seed"] = o.seed;
  m["params"] = params;
  json arts = json::object();
  for (const auto& name : {data_file.filename().string(), std::string("truth.csv"), std::string("run.ini")})
    arts[name] = {{"path", name}, {"sha256", pipeline::sha256_file(dir / name)}};
  m["artifacts"] = arts;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
  spdlog::info("wrote {} set to {}", o.generator, dir.string());
  return 0;
}

// --- encode / stp ---------------------------------------------------------

int cmd_encode(const CommonOptions& common, const std::string& input, const std::string& output,
               std::optional<double> period) {
  auto cfg = common.build();
  cfg.input.kind = config::InputKind::signal;
  cfg.input.path = input;
  if (period) cfg.input.sample_period_ms = period;
  const auto raster = pipeline::load_input(cfg);
  save_raster_csv(raster, output);
  spdlog::info("encoded {} trains x {} steps, {} spikes -> {}", raster.trains(),
               raster.timesteps(), raster.event_count(), output);
  return 0;
}

int cmd_stp(const CommonOptions& common, const std::string& input, const std::string& out) {
  auto cfg = common.build();
  const auto raster = load_raster_csv(input);
  const auto res = stp::run(raster, cfg.stp);
  pipeline::prepare_output_dir(out);
  stp::save_mask_csv(res.mask, fs::path(out) / "stp_mask.csv");
  const auto masked = stp::apply_mask(raster, res.mask);
  save_raster_csv(masked, fs::path(out) / "masked_raster.csv");
  std::size_t kept = 0;
  for (auto m : res.mask) kept += m;
  if (res.stopped)
    spdlog::info("STP stopped at step {}", *res.state.stop_step);
  else
    spdlog::warn("STP stop level never reached; mask taken at end of data");
  spdlog::info("kept {} of {} trains, {} of {} spikes", kept, raster.trains(),
               masked.event_count(), raster.event_count());
  return 0;
}

// --- eval -----------------------------------------------------------------

int cmd_eval(const CommonOptions& common, const std::string& truth_path,
             const std::string& output_path, std::optional<double> window,
             std::size_t epoch_steps, std::size_t lead_steps, const std::string& out) {
  const auto cfg = common.build();
  const auto truth = load_raster_csv(truth_path);
  const auto output = load_raster_csv(output_path);
  const double w = window.value_or(cfg.coincidence_window_ms);
  const std::size_t block = epoch_steps ? epoch_steps : truth.timesteps() - std::min(lead_steps, truth.timesteps());
  if (block == 0) throw ConfigError("--epoch-steps: empty epoch");
  const auto outs = synth::split_epochs(output, block);
  std::vector<SpikeRaster> truths =
      truth.timesteps() == block ? std::vector<SpikeRaster>{truth}
                                 : synth::split_epochs(truth, block, lead_steps);
  if (outs.empty() || truths.empty())
    throw Error("eval: output (" + std::to_string(output.timesteps()) + " steps) or truth (" +
                std::to_string(truth.timesteps()) + " steps) shorter than one epoch of " +
                std::to_string(block));
  json j;
  j["coincidence_window_ms"] = w;
  j["epoch_steps"] = block;
  json rows = json::array();
  for (std::size_t e = 0; e < outs.size(); ++e) {
    const auto r = eval::evaluate(truths[e % truths.size()], outs[e], w, cfg.smoothing);
    json pairs = json::array();
    for (const auto& p : r.pairs) pairs.push_back(p ? json(*p) : json(nullptr));
    rows.push_back({{"epoch", e}, {"f_global", r.f_global}, {"pairs", pairs},
                    {"f_per_pair", r.f_per_pair}, {"distinct_firing", r.distinct_firing()},
                    {"confusion", r.confusion}});
    std::cout << "epoch " << e << "  F = " << r.f_global << "  distinct = " << r.distinct_firing()
              << '\n';
  }
  j["epochs"] = rows;
  if (!out.empty()) write_text(out, j.dump(2) + "\n");
  return 0;
}

// --- inspect --------------------------------------------------------------

int cmd_inspect(const std::string& weights, const std::string& thresholds,
                const std::string& raster) {
  if (weights.empty() && thresholds.empty() && raster.empty())
    throw ConfigError("inspect: give --weights, --thresholds or --raster");
  if (!weights.empty()) {
    const auto w = plasticity::load_weights_csv(weights);
    std::cout << "weights: " << w.trains() << " trains x " << w.neurons() << " neurons\n";
    for (std::size_t j = 0; j < w.neurons(); ++j) {
      double sum = 0.0;
      std::size_t strong = 0;
      for (std::size_t i = 0; i < w.trains(); ++i) {
        sum += std::abs(w.at(i, j));
        strong += std::abs(w.at(i, j)) > 0.5;
      }
      std::cout << "  neuron " << j << ": mean |w| = " << sum / static_cast<double>(w.trains())
                << ", |w| > 0.5 on " << strong << " trains\n";
    }
  }
  if (!thresholds.empty()) {
    std::ifstream in(thresholds);
    if (!in) throw Error(thresholds + ": cannot open file");
    std::map<std::string, std::string> last;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto a = line.find(',');
      const auto b = line.find(',', a + 1);
      if (a == std::string::npos || b == std::string::npos) continue;
      last[line.substr(a + 1, b - a - 1)] = line.substr(b + 1);
    }
    std::cout << "final thresholds:\n";
    for (const auto& [n, th] : last) std::cout << "  neuron " << n << ": " << th << '\n';
  }
  if (!raster.empty()) {
    const auto r = load_raster_csv(raster);
    const auto counts = r.train_counts();
    const auto active = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    std::cout << "raster: " << r.trains() << " trains x " << r.timesteps() << " steps of "
              << r.timestep_ms() << " ms, " << r.event_count() << " spikes, " << active
              << " active trains\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Unsupervised spiking network for temporal pattern learning"};
  app.name("frugal-snn");
  app.require_subcommand(1);

  SynthOptions so;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic data set");
  synth_cmd->add_option("generator", so.generator, "disjoint, nested, vowel or propagating")->required();
  synth_cmd->add_option("--patterns", so.patterns, "Patterns (disjoint)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--trains", so.trains, "Input trains (disjoint, nested)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--repeats", so.repeats, "Epochs of patterns")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", so.seed, "RNG seed");
  synth_cmd->add_option("--duration-ms", so.duration_ms, "Pattern duration");
  synth_cmd->add_option("--gap-ms", so.gap_ms, "Silence after each pattern");
  synth_cmd->add_option("--timestep-ms", so.timestep_ms, "Raster timestep");
  synth_cmd->add_option("--inner-fraction", so.inner_fraction, "Inner band width (nested)");
  synth_cmd->add_option("--density", so.density, "Spike probability inside a band");
  synth_cmd->add_option("--out", so.out, "Output directory")->required();

  CommonOptions enc_common;
  std::string enc_input, enc_output;
  std::optional<double> enc_period;
  auto* encode_cmd = app.add_subcommand("encode", "Preprocess and encode a signal CSV");
  enc_common.attach(encode_cmd, false);
  encode_cmd->add_option("--input", enc_input, "Signal CSV")->required();
  encode_cmd->add_option("--output", enc_output, "Raster CSV to write")->required();
  encode_cmd->add_option("--sample-period-ms", enc_period, "Override the sample period");

  CommonOptions stp_common;
  std::string stp_input, stp_out;
  auto* stp_cmd = app.add_subcommand("stp", "Compute the short-term plasticity mask of a raster");
  stp_common.attach(stp_cmd, false);
  stp_cmd->add_option("--input", stp_input, "Raster CSV")->required();
  stp_cmd->add_option("--out", stp_out, "Output directory")->required();

  CommonOptions train_common;
  std::string train_input;
  std::size_t train_epoch_steps = 0, train_lead = 0;
  bool train_stp = false;
  auto* train_cmd = app.add_subcommand("train", "Train on a raster without evaluation");
  train_common.attach(train_cmd, true);
  train_cmd->add_option("--input", train_input, "Raster CSV")->required();
  train_cmd->add_option("--epoch-steps", train_epoch_steps, "Split the input into epochs of this length");
  train_cmd->add_option("--lead-steps", train_lead, "Steps skipped before the first epoch");
  train_cmd->add_flag("--stp", train_stp, "Apply short-term plasticity first");
  train_cmd->add_option("--out", train_common.out, "Output directory")->required();

  CommonOptions eval_common;
  std::string eval_truth, eval_output, eval_out;
  std::optional<double> eval_window;
  std::size_t eval_epoch_steps = 0, eval_lead = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Score an output raster against ground truth");
  eval_common.attach(eval_cmd, false);
  eval_cmd->add_option("--truth", eval_truth, "Truth raster CSV")->required();
  eval_cmd->add_option("--output", eval_output, "Output raster CSV")->required();
  eval_cmd->add_option("--window-ms", eval_window, "Coincidence window");
  eval_cmd->add_option("--epoch-steps", eval_epoch_steps, "Epoch length of the output raster");
  eval_cmd->add_option("--lead-steps", eval_lead, "Truth steps preceding the first epoch");
  eval_cmd->add_option("--out", eval_out, "Metrics JSON to write");

  CommonOptions run_common;
  std::string manifest;
  auto* run_cmd = app.add_subcommand("run", "Full pipeline from a config file");
  run_common.attach(run_cmd, true);
  run_cmd->add_option("--out", run_common.out, "Output directory");
  run_cmd->add_option("--manifest", manifest, "Re-run the run recorded in this manifest");

  std::string in_weights, in_thresholds, in_raster;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarise weights, thresholds or rasters");
  inspect_cmd->add_option("--weights", in_weights, "Weight CSV");
  inspect_cmd->add_option("--thresholds", in_thresholds, "Threshold trace CSV");
  inspect_cmd->add_option("--raster", in_raster, "Raster CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth_cmd) return cmd_synth(so);
    if (*encode_cmd) return cmd_encode(enc_common, enc_input, enc_output, enc_period);
    if (*stp_cmd) return cmd_stp(stp_common, stp_input, stp_out);
    if (*train_cmd) {
      auto cfg = train_common.build();
      cfg.input.kind = config::InputKind::raster;
      cfg.input.path = train_input;
      cfg.input.truth.clear();
      cfg.input.epoch_steps = train_epoch_steps;
      cfg.input.lead_steps = train_lead;
      if (train_stp) cfg.stp_enabled = true;
      pipeline::run(cfg);
      return 0;
    }
    if (*eval_cmd)
      return cmd_eval(eval_common, eval_truth, eval_output, eval_window, eval_epoch_steps,
                      eval_lead, eval_out);
    if (*run_cmd) {
      if (!manifest.empty()) {
        if (run_common.out.empty()) throw ConfigError("run --manifest requires --out");
        pipeline::rerun_from_manifest(manifest, run_common.out);
        return 0;
      }
      if (run_common.config.empty()) throw ConfigError("run requires --config or --manifest");
      pipeline::run(run_common.build());
      return 0;
    }
    if (*inspect_cmd) return cmd_inspect(in_weights, in_thresholds, in_raster);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return 0;
}
