#pragma once

#include <cstddef>

#include "frugal_snn/raster.hpp"
#include "frugal_snn/signal.hpp"

namespace frugal_snn::encoder {

struct EncoderParams {
  std::size_t fields = 20;  ///< receptive fields spanning [0, 1]
  std::size_t halo = 2;     ///< extra spikes on each side of the active field

  std::size_t trains_per_channel() const noexcept { return fields + 2 * halo; }
  std::size_t spikes_per_step() const noexcept { return 2 * halo + 1; }
};

/// Receptive field hit by a value in [0, 1]: half-open bins, 1.0 clamped
/// into the top field.
std::size_t field_index(double value, std::size_t fields);

/// Each channel becomes a block of fields + 2*halo trains. A value in field k
/// spikes trains k .. k + 2*halo of its block, so the field centre sits at
/// train k + halo and the neighbourhood never leaves the block. One raster
/// timestep per sample; blocks are concatenated in channel order.
SpikeRaster encode(const MultichannelSignal& signal, const EncoderParams& params = {});

}  // namespace frugal_snn::encoder
