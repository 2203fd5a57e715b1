#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "frugal_snn/raster.hpp"

namespace frugal_snn::stp {

/// How the per-channel retention check measures what survived the mask.
enum class GroupBasis {
  spikes,  ///< retained spikes vs. the block's pre-mask spike count
  trains,  ///< retained trains vs. the block's spiking trains
};

struct StpParams {
  double tau_ms = 2000.0;
  double f_d = 0.003;           ///< depression per spiking timestep
  double stop_level = 0.75;     ///< STP stops once any weight drops below this
  double retain_threshold = 0.92;
  double group_fraction = 0.60;
  std::size_t block_size = 24;  ///< trains per encoded channel
  GroupBasis group_basis = GroupBasis::spikes;
};

/// Depression weight per input train; all start at 1.
struct StpState {
  explicit StpState(std::size_t trains) : w(trains, 1.0) {}

  std::vector<double> w;
  bool stopped = false;
  std::optional<Timestep> stop_step;  ///< timestep whose update triggered the stop
};

/// Train mask: 1 keeps a train, 0 removes it.
using TrainMask = std::vector<std::uint8_t>;

/// One Euler step over every train from pre-step weights:
///   w += dt * (1 - w) / tau            (silent train)
///   w += dt * (1 - w) / tau - w * f_d  (spiking train)
/// Sets `stopped` when any weight falls below stop_level. Throws if already
/// stopped.
void step(StpState& state, std::span<const TrainIndex> spiking, double dt_ms,
          const StpParams& params);

/// Binarizes the frozen weights (w >= retain_threshold, 1e-9 slack) and then
/// clears every channel block that kept less than group_fraction of its
/// activity. Requires a stopped state unless `end_of_data` is set.
TrainMask finalize(const StpState& state, const SpikeRaster& raster,
                   const StpParams& params, bool end_of_data = false);

/// Removes events on masked-out trains.
SpikeRaster apply_mask(const SpikeRaster& raster, std::span<const std::uint8_t> mask);

struct StpResult {
  StpState state;
  TrainMask mask;
  bool stopped = false;  ///< false when the data ended before the stop rule fired
};

/// Steps STP through the raster until the stop rule fires (or the data
/// ends) and finalizes the mask. The remainder of the raster is not used to
/// update weights.
StpResult run(const SpikeRaster& raster, const StpParams& params);

/// Mask CSV: header `train,mask`, one row per train.
void save_mask_csv(std::span<const std::uint8_t> mask, const std::filesystem::path& path);
TrainMask load_mask_csv(const std::filesystem::path& path);

}  // namespace frugal_snn::stp
