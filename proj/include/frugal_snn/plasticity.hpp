#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "frugal_snn/lts.hpp"
#include "frugal_snn/raster.hpp"

namespace frugal_snn::plasticity {

struct StdpParams {
  double w_ltp = -0.1;                     ///< winner, train active in window
  double w_ltd = 0.06;                     ///< winner, train silent in window
  double w_lateral_potentiation = -0.001;  ///< winner, active trains only
  double w_lateral_inhibition = 0.0002;    ///< every other neuron, active trains only
  double t_stdp_ms = 500.0;

  void validate() const;
  static StdpParams preset(std::string_view name);

  friend bool operator==(const StdpParams&, const StdpParams&) = default;
};

struct IpParams {
  double f_th_post = 0.01;   ///< relative threshold decrease per output spike
  double dth_pair = 0.001;   ///< increase per windowed presynaptic spike, scaled by |w|
  double th_min = lts::kThresholdMin;
  double th_max = lts::kThresholdMax;

  void validate() const;
  static IpParams preset(std::string_view name);

  friend bool operator==(const IpParams&, const IpParams&) = default;
};

/// Weights from input trains to neurons, row-major by train. Every entry
/// stays in [-1, 0].
class SynapseMatrix {
 public:
  SynapseMatrix() = default;
  SynapseMatrix(std::size_t trains, std::size_t neurons, double value = 0.0);

  /// Uniform on the open interval (-1, 0), reproducible from the seed.
  static SynapseMatrix random(std::size_t trains, std::size_t neurons, std::uint64_t seed);

  std::size_t trains() const noexcept { return trains_; }
  std::size_t neurons() const noexcept { return neurons_; }

  double at(std::size_t train, std::size_t neuron) const { return w_[train * neurons_ + neuron]; }
  double& at(std::size_t train, std::size_t neuron) { return w_[train * neurons_ + neuron]; }
  std::span<const double> row(std::size_t train) const {
    return {w_.data() + train * neurons_, neurons_};
  }
  const std::vector<double>& data() const noexcept { return w_; }

  /// Clamps every entry into [-1, 0].
  void clip();

  friend bool operator==(const SynapseMatrix&, const SynapseMatrix&) = default;

 private:
  std::size_t trains_ = 0;
  std::size_t neurons_ = 0;
  std::vector<double> w_;
};

/// Number of timesteps covered by the window (t_post - T, t_post].
std::size_t window_steps(double t_stdp_ms, double timestep_ms);

/// Spikes per train inside (t_post - T, t_post].
std::vector<std::uint32_t> window_counts(const SpikeRaster& raster, Timestep t_post,
                                         double t_stdp_ms);

/// flag[i] = 1 iff train i spiked inside (t_post - T, t_post].
std::vector<std::uint8_t> recent_activity(const SpikeRaster& raster, Timestep t_post,
                                          double t_stdp_ms);

/// Winner column: active trains += w_ltp, silent trains += w_ltd, then clip.
void apply_classical_stdp(SynapseMatrix& w, std::size_t winner,
                          std::span<const std::uint8_t> flags, const StdpParams& p);

/// Active trains only: winner += w_lateral_potentiation, every other neuron
/// += w_lateral_inhibition, then clip. Silent trains are untouched.
void apply_lateral_stdp(SynapseMatrix& w, std::size_t winner,
                        std::span<const std::uint8_t> flags, const StdpParams& p);

/// th -= f_th_post * th; then th += dth_pair * |w(i, winner)| once per
/// windowed spike of train i; then clip to [th_min, th_max]. Returns the new
/// threshold.
double apply_ip(lts::LtsNeuronState& state, const SynapseMatrix& w, std::size_t winner,
                std::span<const std::uint32_t> counts, const IpParams& p);

/// Same, with the window counts taken from the raster.
double apply_ip(lts::LtsNeuronState& state, const SynapseMatrix& w, std::size_t winner,
                const SpikeRaster& raster, Timestep t_post, const IpParams& p,
                double t_stdp_ms);

/// Weight CSV: header `train,0,1,...,N-1`, one row per input train.
void save_weights_csv(const SynapseMatrix& w, const std::filesystem::path& path);
SynapseMatrix load_weights_csv(const std::filesystem::path& path);

}  // namespace frugal_snn::plasticity
