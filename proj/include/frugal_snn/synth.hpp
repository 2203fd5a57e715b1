#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "frugal_snn/raster.hpp"
#include "frugal_snn/signal.hpp"

namespace frugal_snn::synth {

/// Half-open train range [low, high).
struct Band {
  TrainIndex low = 0;
  TrainIndex high = 0;

  std::size_t width() const noexcept { return high - low; }
  bool contains(TrainIndex i) const noexcept { return i >= low && i < high; }
  friend bool operator==(const Band&, const Band&) = default;
};

struct PatternSpec {
  std::string id;
  Band band;
  double duration_ms = 500.0;
  double density = 1.0;  ///< per train and timestep; 1 means every slot spikes
};

/// One truth train per pattern, one truth spike at the final active
/// timestep of every occurrence.
struct GroundTruth {
  SpikeRaster raster;
  std::vector<std::string> labels;
};

/// A generated raster laid out as `lead_steps` of preamble followed by
/// equal-length epochs.
struct SynthSet {
  SpikeRaster raster;
  GroundTruth truth;
  std::vector<PatternSpec> patterns;
  std::size_t lead_steps = 0;
  std::size_t epoch_steps = 0;
  std::size_t epochs = 0;

  std::vector<SpikeRaster> epoch_rasters() const;
  std::vector<SpikeRaster> epoch_truths() const;
};

/// Slices `raster` into consecutive blocks of `epoch_steps` after skipping
/// `lead_steps`. A trailing partial block is dropped.
std::vector<SpikeRaster> split_epochs(const SpikeRaster& raster, std::size_t epoch_steps,
                                      std::size_t lead_steps = 0);

/// Every epoch shows each pattern once in a seeded random order. Each slot
/// is the pattern followed by `gap_ms` of silence.
SynthSet make_pattern_set(std::vector<PatternSpec> patterns, std::size_t trains,
                          std::size_t repeats, double gap_ms, double timestep_ms,
                          std::uint64_t seed);

struct DisjointParams {
  std::size_t n_patterns = 4;
  std::size_t trains = 240;
  double duration_ms = 500.0;
  double gap_ms = 500.0;
  std::size_t repeats = 50;
  double timestep_ms = 3.0;
  double density = 1.0;
  std::uint64_t seed = 0;
};

/// Equal disjoint bands of trains / n_patterns; the band-to-pattern
/// assignment is permuted by the seed.
SynthSet make_disjoint_set(const DisjointParams& p);

struct NestedParams {
  std::size_t trains = 240;
  double duration_ms = 500.0;
  double gap_ms = 500.0;
  std::size_t repeats = 50;
  double timestep_ms = 3.0;
  double density = 1.0;
  double inner_fraction = 0.25;  ///< inner band width relative to its outer band
  std::uint64_t seed = 0;
};

/// Patterns A, B, C, D with B strictly inside A and D strictly inside C.
/// A and C split the trains in two halves; each inner band sits at a seeded
/// offset inside its outer band.
SynthSet make_nested_set(const NestedParams& p);

/// Drops each spike with drop_prob, then moves it by round(N(0, shift_sd))
/// timesteps clamped into the raster. A spike landing on an occupied slot of
/// its train moves to the nearest free slot, so with drop_prob = 0 the spike
/// count is preserved.
SpikeRaster add_jitter(const SpikeRaster& raster, double drop_prob, double shift_sd,
                       std::uint64_t seed);

struct VowelParams {
  std::size_t channels = 24;
  std::size_t fields = 20;
  std::size_t halo = 2;
  std::size_t n_patterns = 11;
  std::size_t active_channels = 24;  ///< channels driven by each pattern
  std::size_t repeats = 20;
  double timestep_ms = 2.0;
  double duration_ms = 400.0;
  double gap_ms = 400.0;
  double lead_ms = 2000.0;
  std::size_t noise_trains_per_block = 2;
  double noise_rate = 0.6;  ///< per noisy train and timestep
  double drop_prob = 0.1;
  double shift_sd = 2.0;    ///< timesteps
  std::uint64_t seed = 0;
};

/// Raster-level stand-in for encoded vowel recordings. Each pattern drives
/// a seeded subset of `active_channels` channels along linear value
/// trajectories, encoded with the
/// receptive-field geometry (five neighbouring trains per step); silence
/// emits nothing. Pattern spikes are jittered. A few trains per channel
/// carry background noise for the whole recording, including a silent
/// lead-in long enough for short-term depression to flag them.
SynthSet make_vowel_analogue(const VowelParams& p);

/// Half-open channel range [low, high).
struct ChannelSpan {
  std::size_t low = 0;
  std::size_t high = 0;
  std::size_t size() const noexcept { return high - low; }
};

struct PropagatingParams {
  std::size_t channels = 30;
  ChannelSpan short_span{18, 30};
  ChannelSpan long_span{0, 30};
  std::size_t n_short = 3;
  std::size_t n_long = 9;
  double sample_period_ms = 10.0;
  double channel_delay_ms = 30.0;  ///< onset step between neighbouring channels
  double rise_ms = 300.0;          ///< raised-cosine rise of each channel
  double hold_ms = 300.0;          ///< plateau after the last channel has risen
  double fall_ms = 20.0;           ///< common raised-cosine fall
  double lead_ms = 3000.0;
  double gap_ms = 9000.0;
  double gap_jitter_ms = 2000.0;
  std::uint64_t seed = 0;
};

struct PropagatingSet {
  MultichannelSignal signal;
  GroundTruth truth;  ///< train 0: short pattern, train 1: long pattern
};

/// Envelope-like signal in which activity is recruited channel by channel.
/// The short pattern recruits its span from the high channel index down,
/// the long pattern recruits its span from the low index up. Every recruited
/// channel rises along a raised cosine, holds, and all channels of the
/// occurrence fall together, so the input to the network ends abruptly.
/// The baseline is exactly zero and occurrences are separated by at least
/// gap_ms of silence.
PropagatingSet make_propagating_set(const PropagatingParams& p);

}  // namespace frugal_snn::synth
