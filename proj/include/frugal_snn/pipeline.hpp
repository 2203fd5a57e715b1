#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frugal_snn/config.hpp"
#include "frugal_snn/error.hpp"
#include "frugal_snn/eval.hpp"
#include "frugal_snn/network.hpp"
#include "frugal_snn/raster.hpp"
#include "frugal_snn/stp.hpp"

namespace frugal_snn::pipeline {

/// Failure inside one pipeline stage; what() starts with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Signal preprocessing in order: envelope extraction, low-pass smoothing,
/// normalization. Normalization comes last so the encoder sees [0, 1].
MultichannelSignal preprocess(const MultichannelSignal& signal, const config::SignalConfig& cfg);

/// Loads the configured input and, for signals, preprocesses and encodes it.
SpikeRaster load_input(const config::RunConfig& cfg);

struct RunResult {
  std::optional<stp::StpResult> stp;        ///< set when STP ran
  network::OutputRecord record;
  std::vector<eval::MatchReport> reports;   ///< per epoch, empty without truth
  std::size_t epoch_steps = 0;
};

/// STP (if enabled) over the whole input, then training over the configured
/// epochs, then per-epoch evaluation against `truth` when given.
RunResult execute(const config::RunConfig& cfg, const SpikeRaster& input,
                  const std::optional<SpikeRaster>& truth);

/// Loads inputs, executes and writes every artifact plus `manifest.json`
/// into cfg.output.dir. Returns the manifest path.
std::filesystem::path run(const config::RunConfig& cfg);

/// Re-executes the run recorded in a manifest into `out_dir`, after checking
/// that the input files still match their recorded digests.
std::filesystem::path rerun_from_manifest(const std::filesystem::path& manifest,
                                          const std::filesystem::path& out_dir);

/// Creates `dir` when its parent exists; throws naming the path otherwise.
void prepare_output_dir(const std::filesystem::path& dir);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Metrics JSON: one entry per epoch plus the final confusion matrix.
std::string metrics_json(const config::RunConfig& cfg, const RunResult& result);

}  // namespace frugal_snn::pipeline
