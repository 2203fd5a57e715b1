#include "frugal_snn/network.hpp"

#include <algorithm>
#include <cmath>

#include "csv_util.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn::network {

NetworkConfig NetworkConfig::from_preset(std::string_view name) {
  NetworkConfig cfg;
  cfg.lts = lts::LtsParams::preset(name);
  cfg.stdp = plasticity::StdpParams::preset(name);
  cfg.ip = plasticity::IpParams::preset(name);
  cfg.preset = std::string(name);
  if (name == "vowel") {
    cfg.n_neurons = 11;
    cfg.epochs = 20;
  } else if (name == "neural") {
    cfg.n_neurons = 5;
    cfg.epochs = 10;
  }
  return cfg;
}

void NetworkConfig::validate() const {
  if (n_neurons == 0) throw ConfigError("network.neurons must be >= 1");
  if (epochs == 0) throw ConfigError("network.epochs must be >= 1");
  if (!(gap_tau_multiple >= 0.0)) throw ConfigError("network.gap_tau_multiple must be >= 0");
  lts.validate();
  stdp.validate();
  ip.validate();
}

std::vector<double> stimulus_current(const plasticity::SynapseMatrix& w,
                                     std::span<const TrainIndex> spiking) {
  std::vector<double> current(w.neurons(), 0.0);
  for (auto i : spiking) {
    if (i >= w.trains()) throw InvalidArgument("stimulus_current: train index out of range");
    const auto row = w.row(i);
    for (std::size_t j = 0; j < current.size(); ++j) current[j] += row[j];
  }
  return current;
}

std::optional<std::size_t> wta_select(std::span<const lts::LtsNeuronState> states) {
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (!(states[j].v >= states[j].th)) continue;
    if (!best || states[j].last_dv > states[*best].last_dv) best = j;
  }
  return best;
}

Network::Network(const NetworkConfig& cfg, std::size_t trains, double timestep_ms)
    : Network(cfg, plasticity::SynapseMatrix::random(trains, cfg.n_neurons, cfg.rng_seed),
              std::vector<double>(cfg.n_neurons, cfg.ip.th_min), timestep_ms) {}

Network::Network(const NetworkConfig& cfg, plasticity::SynapseMatrix weights,
                 std::vector<double> thresholds, double timestep_ms)
    : cfg_(cfg), lts_(cfg.lts), w_(std::move(weights)) {
  cfg_.validate();
  if (w_.trains() == 0) throw InvalidArgument("Network: raster has zero trains");
  if (w_.neurons() != cfg.n_neurons || thresholds.size() != cfg.n_neurons)
    throw InvalidArgument("Network: weight/threshold shape does not match neuron count");
  lts_.dt_ms = timestep_ms;
  lts_.validate();
  states_.resize(cfg.n_neurons);
  for (std::size_t j = 0; j < states_.size(); ++j) {
    states_[j].th = std::clamp(thresholds[j], cfg.ip.th_min, cfg.ip.th_max);
    trace_.push_back({0, static_cast<std::uint32_t>(j), states_[j].th});
  }
  window_steps_ = plasticity::window_steps(cfg.stdp.t_stdp_ms, timestep_ms);
  gap_steps_ = static_cast<std::size_t>(
      std::ceil(cfg.gap_tau_multiple * cfg.lts.tau_m_ms / timestep_ms - 1e-9));
  counts_.assign(w_.trains(), 0);
  flags_.assign(w_.trains(), 0);
  current_.assign(cfg.n_neurons, 0.0);
}

std::vector<double> Network::thresholds() const {
  std::vector<double> th(states_.size());
  for (std::size_t j = 0; j < th.size(); ++j) th[j] = states_[j].th;
  return th;
}

void Network::push_window(std::span<const TrainIndex> spiking) {
  if (window_.size() == window_steps_) {
    for (auto i : window_.front()) --counts_[i];
    window_.pop_front();
  }
  window_.emplace_back(spiking.begin(), spiking.end());
  for (auto i : spiking) ++counts_[i];
}

std::optional<std::size_t> Network::step(std::span<const TrainIndex> spiking, bool learning) {
  for (auto i : spiking)
    if (i >= w_.trains()) throw InvalidArgument("Network::step: train index out of range");
  push_window(spiking);

  std::fill(current_.begin(), current_.end(), 0.0);
  for (auto i : spiking) {
    const auto row = w_.row(i);
    for (std::size_t j = 0; j < current_.size(); ++j) current_[j] += row[j];
  }
  for (std::size_t j = 0; j < states_.size(); ++j) lts::step(states_[j], current_[j], lts_);

  const auto winner = wta_select(states_);
  if (winner) {
    if (learning) {
      for (std::size_t i = 0; i < counts_.size(); ++i) flags_[i] = counts_[i] > 0 ? 1 : 0;
      plasticity::apply_classical_stdp(w_, *winner, flags_, cfg_.stdp);
      plasticity::apply_lateral_stdp(w_, *winner, flags_, cfg_.stdp);
      const double before = states_[*winner].th;
      plasticity::apply_ip(states_[*winner], w_, *winner, counts_, cfg_.ip);
      if (states_[*winner].th != before)
        trace_.push_back({now_, static_cast<std::uint32_t>(*winner), states_[*winner].th});
    }
    for (auto& s : states_) lts::reset(s);
  }
  ++now_;
  return winner;
}

EpochResult Network::run_epoch(const SpikeRaster& raster, bool learning) {
  if (raster.trains() != w_.trains())
    throw InvalidArgument("run_epoch: raster has " + std::to_string(raster.trains()) +
                          " trains, network expects " + std::to_string(w_.trains()));
  if (raster.timestep_ms() != lts_.dt_ms)
    throw InvalidArgument("run_epoch: raster timestep differs from the network step");
  std::vector<SpikeEvent> fired;
  for (Timestep t = 0; t < raster.timesteps(); ++t)
    if (auto j = step(raster.spikes_at(t), learning))
      fired.push_back({static_cast<TrainIndex>(*j), t});
  EpochResult result;
  for (std::size_t k = 0; k < gap_steps_; ++k)
    if (step({}, learning)) ++result.gap_spikes;
  result.output = SpikeRaster::from_events(states_.size(), raster.timesteps(),
                                           raster.timestep_ms(), std::move(fired));
  return result;
}

SpikeRaster OutputRecord::concatenated() const {
  if (epoch_outputs.empty()) return {};
  SpikeRaster all = epoch_outputs.front();
  for (std::size_t e = 1; e < epoch_outputs.size(); ++e) all = all.concat(epoch_outputs[e]);
  return all;
}

OutputRecord train(const SpikeRaster& raster, const NetworkConfig& cfg) {
  return train(std::span<const SpikeRaster>(&raster, 1), cfg);
}

OutputRecord train(std::span<const SpikeRaster> epochs, const NetworkConfig& cfg) {
  if (epochs.empty()) throw InvalidArgument("train: no input rasters");
  const auto& first = epochs.front();
  if (first.trains() == 0) throw InvalidArgument("train: raster has zero trains");
  for (const auto& r : epochs)
    if (r.trains() != first.trains() || r.timestep_ms() != first.timestep_ms())
      throw InvalidArgument("train: epoch rasters differ in train count or timestep");

  Network net(cfg, first.trains(), first.timestep_ms());
  OutputRecord rec;
  rec.initial_weights = net.weights();
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    auto result = net.run_epoch(epochs[e % epochs.size()], true);
    rec.epoch_outputs.push_back(std::move(result.output));
    rec.gap_spikes.push_back(result.gap_spikes);
    rec.weight_snapshots.push_back(net.weights());
    rec.thresholds.push_back(net.thresholds());
  }
  rec.threshold_trace = net.threshold_trace();
  return rec;
}

void save_threshold_trace_csv(std::span<const ThresholdEvent> trace,
                              const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "t,neuron,th\n";
  for (const auto& e : trace)
    out << e.t << ',' << e.neuron << ',' << detail::format_double(e.th) << '\n';
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace frugal_snn::network
