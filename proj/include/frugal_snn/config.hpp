#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "frugal_snn/encoder.hpp"
#include "frugal_snn/eval.hpp"
#include "frugal_snn/network.hpp"
#include "frugal_snn/signal.hpp"
#include "frugal_snn/stp.hpp"

namespace frugal_snn::config {

enum class InputKind { raster, signal };

struct InputConfig {
  InputKind kind = InputKind::raster;
  std::filesystem::path path;
  std::filesystem::path truth;                   ///< empty: no evaluation
  std::optional<double> sample_period_ms;        ///< signal period override
  std::size_t lead_steps = 0;                    ///< preamble skipped when splitting epochs
  std::size_t epoch_steps = 0;                   ///< 0: every epoch replays the whole input
};

struct SignalConfig {
  bool envelope = false;  ///< treat input as raw samples and extract the multiunit envelope
  signals::EnvelopeParams envelope_params;
  double lowpass_hz = 0.0;  ///< 0 disables smoothing
  unsigned lowpass_order = 2;
  bool normalize = true;
  signals::NormalizeMode normalize_mode = signals::NormalizeMode::per_channel;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  bool weights_per_epoch = true;
  bool threshold_trace = true;
};

/// Everything a run needs. Preset values are the defaults; every field can be
/// overridden from a config file or the command line.
struct RunConfig {
  std::string preset = "artificial";
  InputConfig input;
  SignalConfig signal;
  encoder::EncoderParams encoder;
  bool stp_enabled = false;
  stp::StpParams stp;
  network::NetworkConfig network;
  double coincidence_window_ms = 400.0;
  eval::SmoothingParams smoothing;
  OutputConfig output;

  /// Defaults of a named preset; throws ConfigError for an unknown name.
  static RunConfig from_preset(std::string_view name);
  void validate() const;
};

/// Reads a sectioned key-value (INI) file. The `[run] preset` key, or
/// `preset_override` when given, selects the defaults; every other key
/// overrides one field. Unknown sections or keys and malformed values raise
/// ConfigError naming the key path (`section.key`). Relative input paths
/// are resolved against the config file's directory.
RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::string> preset_override = {});

/// Same, from INI text; relative paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       std::optional<std::string> preset_override = {});

/// Full INI rendering of every field; parse_config reads it back unchanged.
std::string render_config(const RunConfig& cfg);

}  // namespace frugal_snn::config
