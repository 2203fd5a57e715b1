#include "frugal_snn/stp.hpp"

#include <algorithm>
#include <string>

#include "csv_util.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn::stp {

void step(StpState& state, std::span<const TrainIndex> spiking, double dt_ms,
          const StpParams& params) {
  if (state.stopped) throw InvalidArgument("stp::step: STP already stopped");
  const double rate = dt_ms / params.tau_ms;
  std::vector<double>& w = state.w;
  // Both terms read the pre-step weight; `spiking` is sorted ascending.
  std::size_t next = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double old = w[i];
    w[i] = old + rate * (1.0 - old);
    if (next < spiking.size() && spiking[next] == i) {
      w[i] -= old * params.f_d;
      ++next;
    }
  }
  if (next != spiking.size()) throw InvalidArgument("stp::step: train index out of range");
  for (double v : w) {
    if (v < params.stop_level) {
      state.stopped = true;
      break;
    }
  }
}

TrainMask finalize(const StpState& state, const SpikeRaster& raster,
                   const StpParams& params, bool end_of_data) {
  if (!state.stopped && !end_of_data)
    throw InvalidArgument(
        "stp::finalize: stop condition not reached and data not exhausted");
  if (state.w.size() != raster.trains())
    throw InvalidArgument("stp::finalize: weight count does not match raster trains");
  if (params.block_size == 0) throw InvalidArgument("stp::finalize: block_size must be >= 1");

  constexpr double slack = 1e-9;
  TrainMask mask(state.w.size());
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = state.w[i] >= params.retain_threshold - slack ? 1 : 0;

  const auto counts = raster.train_counts();
  for (std::size_t begin = 0; begin < mask.size(); begin += params.block_size) {
    const std::size_t end = std::min(begin + params.block_size, mask.size());
    double total = 0.0, kept = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double amount = params.group_basis == GroupBasis::spikes
                                ? static_cast<double>(counts[i])
                                : (counts[i] > 0 ? 1.0 : 0.0);
      total += amount;
      if (mask[i]) kept += amount;
    }
    if (total > 0.0 && kept < params.group_fraction * total)
      for (std::size_t i = begin; i < end; ++i) mask[i] = 0;
  }
  return mask;
}

SpikeRaster apply_mask(const SpikeRaster& raster, std::span<const std::uint8_t> mask) {
  if (mask.size() != raster.trains())
    throw InvalidArgument("stp::apply_mask: mask length " + std::to_string(mask.size()) +
                          " does not match " + std::to_string(raster.trains()) + " trains");
  std::vector<SpikeEvent> kept;
  kept.reserve(raster.event_count());
  for (Timestep t = 0; t < raster.timesteps(); ++t)
    for (auto i : raster.spikes_at(t))
      if (mask[i]) kept.push_back({i, t});
  return SpikeRaster::from_events(raster.trains(), raster.timesteps(),
                                  raster.timestep_ms(), std::move(kept));
}

StpResult run(const SpikeRaster& raster, const StpParams& params) {
  StpResult result{StpState(raster.trains()), {}, false};
  for (Timestep t = 0; t < raster.timesteps(); ++t) {
    step(result.state, raster.spikes_at(t), raster.timestep_ms(), params);
    if (result.state.stopped) {
      result.state.stop_step = t;
      break;
    }
  }
  result.stopped = result.state.stopped;
  result.mask = finalize(result.state, raster, params, /*end_of_data=*/true);
  return result;
}

void save_mask_csv(std::span<const std::uint8_t> mask, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "train,mask\n";
  for (std::size_t i = 0; i < mask.size(); ++i)
    out << i << ',' << (mask[i] ? 1 : 0) << '\n';
  if (!out) throw Error(path.string() + ": write failed");
}

TrainMask load_mask_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  const std::string name = path.string();
  TrainMask mask;
  std::string line;
  std::size_t row = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++row;
    const auto view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto f = detail::split_fields(view);
    if (!header) {
      if (f.size() != 2 || f[0] != "train" || f[1] != "mask")
        throw ParseError(name, row, 0, "expected header 'train,mask'");
      header = true;
      continue;
    }
    if (f.size() != 2) throw ParseError(name, row, 0, "expected 2 columns");
    const auto i = detail::to_uint(f[0]);
    const auto m = detail::to_uint(f[1]);
    if (!i || *i != mask.size())
      throw ParseError(name, row, 1, "train indices must be 0, 1, 2, ... in order");
    if (!m || *m > 1) throw ParseError(name, row, 2, "mask must be 0 or 1");
    mask.push_back(static_cast<std::uint8_t>(*m));
  }
  if (!header) throw ParseError(name, 0, 0, "missing header 'train,mask'");
  return mask;
}

}  // namespace frugal_snn::stp
