#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace frugal_snn {

using TrainIndex = std::uint32_t;
using Timestep = std::uint32_t;

struct SpikeEvent {
  TrainIndex train;
  Timestep t;

  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

/// Binary spike matrix (trains x timesteps) stored sparsely, grouped by
/// timestep. Events are unique and kept sorted by (t, train).
class SpikeRaster {
 public:
  SpikeRaster() = default;
  SpikeRaster(std::size_t trains, std::size_t timesteps, double timestep_ms);

  /// Builds a raster from arbitrary events. Duplicates are merged; an event
  /// outside the bounds throws InvalidArgument.
  static SpikeRaster from_events(std::size_t trains, std::size_t timesteps,
                                 double timestep_ms,
                                 std::vector<SpikeEvent> events);

  /// Builds a raster from a dense train-major matrix (dense[i * timesteps + t]).
  static SpikeRaster from_dense(std::size_t trains, std::size_t timesteps,
                                double timestep_ms,
                                std::span<const std::uint8_t> dense);

  std::size_t trains() const noexcept { return trains_; }
  std::size_t timesteps() const noexcept { return offsets_.size() - 1; }
  double timestep_ms() const noexcept { return timestep_ms_; }
  std::size_t event_count() const noexcept { return spike_trains_.size(); }
  bool empty() const noexcept { return spike_trains_.empty(); }

  /// Trains spiking at timestep t, ascending.
  std::span<const TrainIndex> spikes_at(Timestep t) const;
  bool contains(TrainIndex train, Timestep t) const;

  std::vector<SpikeEvent> events() const;
  std::vector<std::uint8_t> dense() const;
  std::vector<std::size_t> train_counts() const;
  /// Spike times of one train, ascending.
  std::vector<Timestep> train_times(TrainIndex train) const;
  /// Spike times of every train, computed in one pass.
  std::vector<std::vector<Timestep>> all_train_times() const;

  /// Sub-range [begin, end) of timesteps, re-based to start at 0.
  SpikeRaster slice(Timestep begin, Timestep end) const;
  /// Timesteps of `other` appended after this raster. Train counts and
  /// timestep_ms must agree.
  SpikeRaster concat(const SpikeRaster& other) const;
  /// Union of events of two rasters with identical shape.
  SpikeRaster merge(const SpikeRaster& other) const;

  friend bool operator==(const SpikeRaster&, const SpikeRaster&) = default;

 private:
  std::size_t trains_ = 0;
  double timestep_ms_ = 1.0;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<TrainIndex> spike_trains_;
};

/// Event CSV: optional `# timestep_ms=<v>`, `# trains=<n>`, `# timesteps=<n>`
/// comment lines, then header `t,train`, then one row per event.
void save_raster_csv(const SpikeRaster& raster,
                     const std::filesystem::path& path);
SpikeRaster load_raster_csv(const std::filesystem::path& path);

}  // namespace frugal_snn
