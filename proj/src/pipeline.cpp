#include "frugal_snn/pipeline.hpp"

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <memory>
#include <sstream>

#include "frugal_snn/encoder.hpp"
#include "frugal_snn/error.hpp"
#include "frugal_snn/plasticity.hpp"
#include "frugal_snn/synth.hpp"

namespace frugal_snn::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open file for writing");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open file");
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json optional_index(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void prepare_output_dir(const fs::path& dir) {
  if (fs::is_directory(dir)) return;
  if (fs::exists(dir)) throw Error("output path exists and is not a directory: " + dir.string());
  // A trailing separator leaves an empty filename; drop it before taking the parent.
  fs::path target = fs::absolute(dir).lexically_normal();
  if (target.filename().empty()) target = target.parent_path();
  const fs::path parent = target.parent_path();
  if (!fs::is_directory(parent))
    throw Error("cannot create output directory " + dir.string() + ": parent " +
                parent.string() + " does not exist");
  fs::create_directory(dir);
}

MultichannelSignal preprocess(const MultichannelSignal& signal, const config::SignalConfig& cfg) {
  MultichannelSignal out = signal;
  if (cfg.envelope) out = signals::multiunit_envelope(out, cfg.envelope_params);
  if (cfg.lowpass_hz > 0.0) out = signals::lowpass_smooth(out, cfg.lowpass_hz, cfg.lowpass_order);
  if (cfg.normalize) out = signals::normalize(out, cfg.normalize_mode);
  return out;
}

SpikeRaster load_input(const config::RunConfig& cfg) {
  if (cfg.input.path.empty()) throw ConfigError("input.path is required");
  if (cfg.input.kind == config::InputKind::raster)
    return stage("load", [&] { return load_raster_csv(cfg.input.path); });
  const auto sig = stage("load", [&] {
    return signals::load_signal(cfg.input.path, cfg.input.sample_period_ms);
  });
  const auto ready = stage("preprocess", [&] { return preprocess(sig, cfg.signal); });
  return stage("encode", [&] { return encoder::encode(ready, cfg.encoder); });
}

RunResult execute(const config::RunConfig& cfg, const SpikeRaster& input,
                  const std::optional<SpikeRaster>& truth) {
  cfg.validate();
  RunResult result;
  SpikeRaster net_input = input;
  if (cfg.stp_enabled) {
    result.stp = stage("stp", [&] { return stp::run(input, cfg.stp); });
    if (!result.stp->stopped)
      spdlog::warn("STP stop level never reached; mask taken at end of data");
    net_input = stage("stp", [&] { return stp::apply_mask(input, result.stp->mask); });
    std::size_t kept = 0;
    for (auto m : result.stp->mask) kept += m;
    spdlog::info("STP kept {} of {} trains, {} of {} spikes", kept, input.trains(),
                 net_input.event_count(), input.event_count());
  } else if (cfg.preset != "artificial") {
    spdlog::warn("STP skipped: preset '{}' normally filters its input", cfg.preset);
  }

  if (truth && (truth->timesteps() != input.timesteps() ||
                truth->timestep_ms() != input.timestep_ms()))
    throw StageError("eval", "truth raster shape (" + std::to_string(truth->timesteps()) +
                                 " timesteps) does not match the input (" +
                                 std::to_string(input.timesteps()) + ")");

  std::vector<SpikeRaster> epochs, truths;
  stage("split", [&] {
    const std::size_t lead = cfg.input.lead_steps;
    if (lead >= input.timesteps()) throw InvalidArgument("input.lead_steps covers the whole input");
    if (cfg.input.epoch_steps > 0) {
      epochs = synth::split_epochs(net_input, cfg.input.epoch_steps, lead);
      if (truth) truths = synth::split_epochs(*truth, cfg.input.epoch_steps, lead);
    } else {
      const auto end = static_cast<Timestep>(input.timesteps());
      epochs.push_back(net_input.slice(static_cast<Timestep>(lead), end));
      if (truth) truths.push_back(truth->slice(static_cast<Timestep>(lead), end));
    }
    if (epochs.empty()) throw InvalidArgument("input.epoch_steps exceeds the input length");
    return 0;
  });
  result.epoch_steps = epochs.front().timesteps();

  spdlog::info("training {} neurons for {} epochs on {} trains x {} steps ({} ms/step)",
               cfg.network.n_neurons, cfg.network.epochs, input.trains(),
               result.epoch_steps, input.timestep_ms());
  result.record = stage("train", [&] { return network::train(epochs, cfg.network); });

  if (truth) {
    stage("eval", [&] {
      for (std::size_t e = 0; e < result.record.epoch_outputs.size(); ++e) {
        result.reports.push_back(eval::evaluate(truths[e % truths.size()],
                                                result.record.epoch_outputs[e],
                                                cfg.coincidence_window_ms, cfg.smoothing));
        spdlog::debug("epoch {}: F = {}", e, result.reports.back().f_global);
      }
      return 0;
    });
    spdlog::info("final epoch F = {}", result.reports.back().f_global);
  }
  return result;
}

std::string metrics_json(const config::RunConfig& cfg, const RunResult& result) {
  json j;
  j["preset"] = cfg.preset;
  j["coincidence_window_ms"] = cfg.coincidence_window_ms;
  j["epoch_steps"] = result.epoch_steps;
  if (result.stp) {
    std::size_t kept = 0;
    for (auto m : result.stp->mask) kept += m;
    j["stp"] = {{"stopped", result.stp->stopped},
                {"stop_step", result.stp->state.stop_step ? json(*result.stp->state.stop_step)
                                                          : json(nullptr)},
                {"retained_trains", kept},
                {"trains", result.stp->mask.size()}};
  }
  json epochs = json::array();
  for (std::size_t e = 0; e < result.record.epoch_outputs.size(); ++e) {
    json row{{"epoch", e},
             {"output_spikes", result.record.epoch_outputs[e].event_count()},
             {"gap_spikes", result.record.gap_spikes[e]}};
    if (e < result.reports.size()) {
      const auto& r = result.reports[e];
      json pairs = json::array();
      for (const auto& p : r.pairs) pairs.push_back(optional_index(p));
      row["f_global"] = r.f_global;
      row["pairs"] = pairs;
      row["f_per_pair"] = r.f_per_pair;
      row["distinct_firing"] = r.distinct_firing();
      std::size_t truth_spikes = 0;
      for (auto c : r.truth_counts) truth_spikes += c;
      row["truth_spikes"] = truth_spikes;
    }
    epochs.push_back(std::move(row));
  }
  j["epochs"] = std::move(epochs);
  if (!result.reports.empty()) {
    const auto& r = result.reports.back();
    j["final"] = {{"f_global", r.f_global}, {"confusion", r.confusion}};
  }
  j["config"] = config::render_config(cfg);
  return j.dump(2) + "\n";
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open file for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest initialisation failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

fs::path run(const config::RunConfig& requested) {
  const auto started = std::chrono::steady_clock::now();
  // Absolute inputs and a neutral output dir make the snapshot independent of
  // where and into which directory the run happens.
  config::RunConfig cfg = requested;
  if (!cfg.input.path.empty()) cfg.input.path = fs::weakly_canonical(fs::absolute(cfg.input.path));
  if (!cfg.input.truth.empty()) cfg.input.truth = fs::weakly_canonical(fs::absolute(cfg.input.truth));
  const fs::path out = requested.output.dir;
  cfg.output.dir = ".";
  prepare_output_dir(out);

  const SpikeRaster input = load_input(cfg);
  std::optional<SpikeRaster> truth;
  if (!cfg.input.truth.empty()) truth = stage("load", [&] { return load_raster_csv(cfg.input.truth); });
  const RunResult result = execute(cfg, input, truth);

  std::map<std::string, fs::path> artifacts;
  auto emit = [&](const std::string& name, auto&& writer) {
    const fs::path p = out / name;
    if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    writer(p);
    artifacts[name] = p;
  };
  emit("config.ini", [&](const fs::path& p) { write_text(p, config::render_config(cfg)); });
  if (result.stp) emit("stp_mask.csv", [&](const fs::path& p) { stp::save_mask_csv(result.stp->mask, p); });
  emit("output_raster.csv", [&](const fs::path& p) { save_raster_csv(result.record.concatenated(), p); });
  emit("weights_initial.csv", [&](const fs::path& p) { plasticity::save_weights_csv(result.record.initial_weights, p); });
  emit("weights_final.csv", [&](const fs::path& p) { plasticity::save_weights_csv(result.record.weight_snapshots.back(), p); });
  if (cfg.output.weights_per_epoch)
    for (std::size_t e = 0; e < result.record.weight_snapshots.size(); ++e) {
      char name[64];
      std::snprintf(name, sizeof name, "weights/epoch_%03zu.csv", e);
      emit(name, [&](const fs::path& p) { plasticity::save_weights_csv(result.record.weight_snapshots[e], p); });
    }
  if (cfg.output.threshold_trace)
    emit("thresholds.csv", [&](const fs::path& p) { network::save_threshold_trace_csv(result.record.threshold_trace, p); });
  emit("metrics.json", [&](const fs::path& p) { write_text(p, metrics_json(cfg, result)); });

  json m;
  m["tool"] = "frugal-snn";
  m["command"] = "run";
  m["config"] = config::render_config(cfg);
  m["rng_seed"] = cfg.network.rng_seed;
  json inputs = json::object();
  inputs["input"] = {{"path", cfg.input.path.generic_string()}, {"sha256", sha256_file(cfg.input.path)}};
  if (truth) inputs["truth"] = {{"path", cfg.input.truth.generic_string()}, {"sha256", sha256_file(cfg.input.truth)}};
  m["inputs"] = inputs;
  json arts = json::object();
  for (const auto& [name, p] : artifacts) arts[name] = {{"path", name}, {"sha256", sha256_file(p)}};
  m["artifacts"] = arts;
  json series = json::array();
  for (const auto& r : result.reports) series.push_back(r.f_global);
  m["f_global"] = series;
  m["wall_clock_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const fs::path manifest = out / "manifest.json";
  write_text(manifest, m.dump(2) + "\n");
  spdlog::info("wrote {} artifacts to {}", artifacts.size() + 1, out.string());
  return manifest;
}

fs::path rerun_from_manifest(const fs::path& manifest, const fs::path& out_dir) {
  json m;
  try {
    m = json::parse(read_text(manifest));
  } catch (const json::exception& e) {
    throw ConfigError(manifest.string() + ": not a valid manifest: " + e.what());
  }
  if (!m.contains("config") || !m["config"].is_string())
    throw ConfigError(manifest.string() + ": manifest has no config snapshot");
  auto cfg = config::parse_config(m["config"].get<std::string>(), {});
  const json inputs = m.value("inputs", json::object());
  for (const auto& [name, entry] : inputs.items()) {
    const fs::path p = entry.at("path").get<std::string>();
    if (!fs::exists(p)) throw Error("manifest input '" + name + "' is missing: " + p.string());
    if (sha256_file(p) != entry.at("sha256").get<std::string>())
      throw Error("manifest input '" + name + "' changed since the recorded run: " + p.string());
  }
  cfg.output.dir = out_dir;
  return run(cfg);
}

}  // namespace frugal_snn::pipeline
