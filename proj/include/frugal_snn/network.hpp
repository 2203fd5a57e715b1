#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frugal_snn/lts.hpp"
#include "frugal_snn/plasticity.hpp"
#include "frugal_snn/raster.hpp"

namespace frugal_snn::network {

struct NetworkConfig {
  std::size_t n_neurons = 10;
  lts::LtsParams lts;
  plasticity::StdpParams stdp;
  plasticity::IpParams ip;
  std::size_t epochs = 50;
  std::uint64_t rng_seed = 0;
  std::string preset = "artificial";
  /// Silent steps appended after every epoch: ceil(gap_tau_multiple * tau_m / dt).
  double gap_tau_multiple = 10.0;

  /// Neuron, plasticity and runner defaults of a named preset.
  static NetworkConfig from_preset(std::string_view name);
  void validate() const;
};

/// I[j] = sum over spiking trains i of w(i, j).
std::vector<double> stimulus_current(const plasticity::SynapseMatrix& w,
                                     std::span<const TrainIndex> spiking);

/// Candidates have v >= th. Returns the candidate with the largest last_dv,
/// lowest index on ties, or nothing when no neuron crossed.
std::optional<std::size_t> wta_select(std::span<const lts::LtsNeuronState> states);

struct ThresholdEvent {
  std::uint64_t t;  ///< stream timestep, counted across epochs and gaps
  std::uint32_t neuron;
  double th;
};

struct EpochResult {
  SpikeRaster output;         ///< neurons x epoch timesteps
  std::size_t gap_spikes = 0; ///< output spikes fired during the trailing gap
};

/// Streaming simulator. Neuron state, weights, thresholds and the plasticity
/// window persist across calls, so consecutive epochs form one stream.
class Network {
 public:
  /// Fresh network: seeded random weights, every threshold at th_min. The
  /// integration step is the raster timestep.
  Network(const NetworkConfig& cfg, std::size_t trains, double timestep_ms);
  /// Network resuming from given weights and thresholds.
  Network(const NetworkConfig& cfg, plasticity::SynapseMatrix weights,
          std::vector<double> thresholds, double timestep_ms);

  /// Advances one timestep and returns the firing neuron, if any. With
  /// learning on, the winner triggers classical STDP, lateral STDP and IP
  /// (in that order) before all neurons are reset.
  std::optional<std::size_t> step(std::span<const TrainIndex> spiking, bool learning);

  /// Runs the raster followed by the inter-epoch gap.
  EpochResult run_epoch(const SpikeRaster& raster, bool learning);

  std::size_t gap_steps() const noexcept { return gap_steps_; }
  const plasticity::SynapseMatrix& weights() const noexcept { return w_; }
  const std::vector<lts::LtsNeuronState>& states() const noexcept { return states_; }
  std::vector<double> thresholds() const;
  const std::vector<ThresholdEvent>& threshold_trace() const noexcept { return trace_; }
  const lts::LtsParams& lts_params() const noexcept { return lts_; }
  std::uint64_t stream_time() const noexcept { return now_; }

 private:
  void push_window(std::span<const TrainIndex> spiking);

  NetworkConfig cfg_;
  lts::LtsParams lts_;
  plasticity::SynapseMatrix w_;
  std::vector<lts::LtsNeuronState> states_;
  std::size_t window_steps_;
  std::size_t gap_steps_;
  std::deque<std::vector<TrainIndex>> window_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint8_t> flags_;
  std::vector<double> current_;
  std::vector<ThresholdEvent> trace_;
  std::uint64_t now_ = 0;
};

struct OutputRecord {
  std::vector<SpikeRaster> epoch_outputs;  ///< one neurons x timesteps raster per epoch
  std::vector<std::size_t> gap_spikes;     ///< per epoch
  plasticity::SynapseMatrix initial_weights;
  std::vector<plasticity::SynapseMatrix> weight_snapshots;  ///< after each epoch
  std::vector<std::vector<double>> thresholds;              ///< after each epoch
  std::vector<ThresholdEvent> threshold_trace;

  /// Every epoch's output laid end to end.
  SpikeRaster concatenated() const;
};

/// Learns over cfg.epochs presentations of the raster.
OutputRecord train(const SpikeRaster& raster, const NetworkConfig& cfg);

/// Learns over cfg.epochs epochs, epoch k presenting epochs[k % size].
/// All rasters must share train count and timestep.
OutputRecord train(std::span<const SpikeRaster> epochs, const NetworkConfig& cfg);

/// Threshold trace CSV `t,neuron,th`.
void save_threshold_trace_csv(std::span<const ThresholdEvent> trace,
                              const std::filesystem::path& path);

}  // namespace frugal_snn::network
