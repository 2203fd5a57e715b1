#include "frugal_snn/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frugal_snn/error.hpp"

namespace frugal_snn::encoder {

std::size_t field_index(double value, std::size_t fields) {
  if (!(value >= 0.0 && value <= 1.0))
    throw InvalidArgument("encode: value " + std::to_string(value) +
                          " outside [0, 1]");
  const auto k = static_cast<std::size_t>(std::floor(value * static_cast<double>(fields)));
  return std::min(k, fields - 1);
}

SpikeRaster encode(const MultichannelSignal& signal, const EncoderParams& params) {
  if (params.fields == 0) throw InvalidArgument("encode: fields must be >= 1");
  const std::size_t block = params.trains_per_channel();
  const std::size_t width = params.spikes_per_step();
  std::vector<SpikeEvent> events;
  events.reserve(signal.channels() * signal.samples() * width);
  for (std::size_t c = 0; c < signal.channels(); ++c) {
    const auto ch = signal.channel(c);
    for (std::size_t t = 0; t < ch.size(); ++t) {
      const std::size_t k = field_index(ch[t], params.fields);
      for (std::size_t j = 0; j < width; ++j)
        events.push_back({static_cast<TrainIndex>(c * block + k + j),
                          static_cast<Timestep>(t)});
    }
  }
  return SpikeRaster::from_events(signal.channels() * block, signal.samples(),
                                  signal.sample_period_ms(), std::move(events));
}

}  // namespace frugal_snn::encoder
