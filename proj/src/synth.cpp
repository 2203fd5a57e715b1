#include "frugal_snn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "frugal_snn/error.hpp"

namespace frugal_snn::synth {

namespace {

std::size_t to_steps(double ms, double timestep_ms) {
  return static_cast<std::size_t>(std::llround(ms / timestep_ms));
}

// Independent engine per purpose so that changing one knob does not reshuffle
// every other random draw.
std::mt19937_64 engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<SpikeRaster> split_epochs(const SpikeRaster& raster, std::size_t epoch_steps,
                                      std::size_t lead_steps) {
  if (epoch_steps == 0) throw InvalidArgument("split_epochs: epoch_steps must be >= 1");
  std::vector<SpikeRaster> out;
  for (std::size_t t = lead_steps; t + epoch_steps <= raster.timesteps(); t += epoch_steps)
    out.push_back(raster.slice(static_cast<Timestep>(t), static_cast<Timestep>(t + epoch_steps)));
  return out;
}

std::vector<SpikeRaster> SynthSet::epoch_rasters() const {
  return split_epochs(raster, epoch_steps, lead_steps);
}

std::vector<SpikeRaster> SynthSet::epoch_truths() const {
  return split_epochs(truth.raster, epoch_steps, lead_steps);
}

SynthSet make_pattern_set(std::vector<PatternSpec> patterns, std::size_t trains,
                          std::size_t repeats, double gap_ms, double timestep_ms,
                          std::uint64_t seed) {
  if (patterns.empty()) throw InvalidArgument("make_pattern_set: no patterns");
  if (!(timestep_ms > 0.0)) throw InvalidArgument("make_pattern_set: timestep must be positive");
  if (gap_ms < 0.0) throw InvalidArgument("make_pattern_set: gap must be >= 0");
  std::vector<std::size_t> length(patterns.size());
  std::size_t epoch_steps = 0;
  const std::size_t gap = to_steps(gap_ms, timestep_ms);
  for (std::size_t k = 0; k < patterns.size(); ++k) {
    const auto& p = patterns[k];
    if (p.band.low >= p.band.high || p.band.high > trains)
      throw InvalidArgument("pattern '" + p.id + "': band [" + std::to_string(p.band.low) +
                            ", " + std::to_string(p.band.high) + ") outside " +
                            std::to_string(trains) + " trains");
    if (!(p.duration_ms > 0.0)) throw InvalidArgument("pattern '" + p.id + "': duration must be > 0");
    if (!(p.density > 0.0 && p.density <= 1.0))
      throw InvalidArgument("pattern '" + p.id + "': density must lie in (0, 1]");
    length[k] = std::max<std::size_t>(1, to_steps(p.duration_ms, timestep_ms));
    epoch_steps += length[k] + gap;
  }
  const std::size_t total = epoch_steps * repeats;

  auto order_rng = engine(seed, 1);
  auto density_rng = engine(seed, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SpikeEvent> events, truth;
  std::vector<std::size_t> order(patterns.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), order_rng);
    std::size_t t0 = r * epoch_steps;
    for (auto k : order) {
      const auto& p = patterns[k];
      for (std::size_t s = 0; s < length[k]; ++s)
        for (TrainIndex i = p.band.low; i < p.band.high; ++i)
          if (p.density >= 1.0 || unit(density_rng) < p.density)
            events.push_back({i, static_cast<Timestep>(t0 + s)});
      truth.push_back({static_cast<TrainIndex>(k), static_cast<Timestep>(t0 + length[k] - 1)});
      t0 += length[k] + gap;
    }
  }

  SynthSet set;
  set.raster = SpikeRaster::from_events(trains, total, timestep_ms, std::move(events));
  set.truth.raster =
      SpikeRaster::from_events(patterns.size(), total, timestep_ms, std::move(truth));
  for (const auto& p : patterns) set.truth.labels.push_back(p.id);
  set.patterns = std::move(patterns);
  set.epoch_steps = epoch_steps;
  set.epochs = repeats;
  return set;
}

SynthSet make_disjoint_set(const DisjointParams& p) {
  if (p.n_patterns == 0) throw InvalidArgument("make_disjoint_set: n_patterns must be >= 1");
  const std::size_t width = p.trains / p.n_patterns;
  if (width == 0)
    throw InvalidArgument("make_disjoint_set: " + std::to_string(p.n_patterns) +
                          " bands do not fit in " + std::to_string(p.trains) + " trains");
  std::vector<std::size_t> slot(p.n_patterns);
  std::iota(slot.begin(), slot.end(), std::size_t{0});
  auto rng = engine(p.seed, 0);
  std::shuffle(slot.begin(), slot.end(), rng);
  std::vector<PatternSpec> patterns;
  for (std::size_t k = 0; k < p.n_patterns; ++k) {
    const auto low = static_cast<TrainIndex>(slot[k] * width);
    patterns.push_back({"P" + std::to_string(k), {low, static_cast<TrainIndex>(low + width)},
                        p.duration_ms, p.density});
  }
  return make_pattern_set(std::move(patterns), p.trains, p.repeats, p.gap_ms, p.timestep_ms,
                          p.seed);
}

SynthSet make_nested_set(const NestedParams& p) {
  const std::size_t outer = p.trains / 2;
  const auto inner = static_cast<std::size_t>(std::llround(p.inner_fraction * static_cast<double>(outer)));
  if (outer < 2 || inner == 0 || inner >= outer)
    throw InvalidArgument("make_nested_set: need 0 < inner band < outer band (trains " +
                          std::to_string(p.trains) + ", inner_fraction " +
                          std::to_string(p.inner_fraction) + ")");
  auto rng = engine(p.seed, 0);
  std::uniform_int_distribution<std::size_t> offset(0, outer - inner);
  const bool swap = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  const std::size_t a_low = swap ? outer : 0;
  const std::size_t c_low = swap ? 0 : outer;
  const std::size_t b_low = a_low + offset(rng);
  const std::size_t d_low = c_low + offset(rng);
  auto band = [](std::size_t low, std::size_t width) {
    return Band{static_cast<TrainIndex>(low), static_cast<TrainIndex>(low + width)};
  };
  std::vector<PatternSpec> patterns{
      {"A", band(a_low, outer), p.duration_ms, p.density},
      {"B", band(b_low, inner), p.duration_ms, p.density},
      {"C", band(c_low, outer), p.duration_ms, p.density},
      {"D", band(d_low, inner), p.duration_ms, p.density},
  };
  return make_pattern_set(std::move(patterns), p.trains, p.repeats, p.gap_ms, p.timestep_ms,
                          p.seed);
}

SpikeRaster add_jitter(const SpikeRaster& raster, double drop_prob, double shift_sd,
                       std::uint64_t seed) {
  if (!(drop_prob >= 0.0 && drop_prob < 1.0))
    throw InvalidArgument("add_jitter: drop_prob must lie in [0, 1)");
  if (!(shift_sd >= 0.0)) throw InvalidArgument("add_jitter: shift_sd must be >= 0");
  if (raster.timesteps() == 0) return raster;
  auto rng = engine(seed, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, shift_sd > 0.0 ? shift_sd : 1.0);
  const auto last = static_cast<long long>(raster.timesteps()) - 1;

  std::vector<std::set<Timestep>> occupied(raster.trains());
  std::vector<SpikeEvent> out;
  out.reserve(raster.event_count());
  for (const auto& e : raster.events()) {
    if (drop_prob > 0.0 && unit(rng) < drop_prob) continue;
    long long t = e.t;
    if (shift_sd > 0.0) t += std::llround(normal(rng));
    t = std::clamp(t, 0LL, last);
    auto& taken = occupied[e.train];
    if (taken.count(static_cast<Timestep>(t))) {
      // Nearest free slot, earlier side first on equal distance.
      for (long long d = 1;; ++d) {
        if (t - d >= 0 && !taken.count(static_cast<Timestep>(t - d))) {
          t -= d;
          break;
        }
        if (t + d <= last && !taken.count(static_cast<Timestep>(t + d))) {
          t += d;
          break;
        }
      }
    }
    taken.insert(static_cast<Timestep>(t));
    out.push_back({e.train, static_cast<Timestep>(t)});
  }
  return SpikeRaster::from_events(raster.trains(), raster.timesteps(), raster.timestep_ms(),
                                  std::move(out));
}

SynthSet make_vowel_analogue(const VowelParams& p) {
  if (p.channels == 0 || p.fields == 0 || p.n_patterns == 0)
    throw InvalidArgument("make_vowel_analogue: channels, fields and patterns must be >= 1");
  const std::size_t block = p.fields + 2 * p.halo;
  if (p.noise_trains_per_block > block)
    throw InvalidArgument("make_vowel_analogue: more noisy trains than trains per channel");
  if (!(p.noise_rate >= 0.0 && p.noise_rate <= 1.0))
    throw InvalidArgument("make_vowel_analogue: noise_rate must lie in [0, 1]");
  const std::size_t trains = p.channels * block;
  const std::size_t length = std::max<std::size_t>(2, to_steps(p.duration_ms, p.timestep_ms));
  const std::size_t lead = to_steps(p.lead_ms, p.timestep_ms);

  // Start and end value per pattern and channel.
  auto shape_rng = engine(p.seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (p.active_channels == 0 || p.active_channels > p.channels)
    throw InvalidArgument("make_vowel_analogue: active_channels must lie in [1, channels]");
  std::vector<std::vector<std::pair<double, double>>> ramps(p.n_patterns);
  std::vector<std::vector<std::size_t>> driven(p.n_patterns);
  std::vector<std::size_t> all(p.channels);
  for (std::size_t k = 0; k < p.n_patterns; ++k) {
    for (std::size_t c = 0; c < p.channels; ++c) {
      const double a = unit(shape_rng);
      ramps[k].emplace_back(a, unit(shape_rng));
    }
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), shape_rng);
    driven[k].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(p.active_channels));
    std::sort(driven[k].begin(), driven[k].end());
  }

  std::vector<PatternSpec> specs;
  for (std::size_t k = 0; k < p.n_patterns; ++k)
    specs.push_back({"V" + std::to_string(k),
                     {0, static_cast<TrainIndex>(trains)},
                     static_cast<double>(length) * p.timestep_ms,
                     1.0});
  // Reuse the slot layout and truth of the generic generator, then replace
  // the band-filling spikes with encoded trajectories.
  SynthSet layout = make_pattern_set(specs, trains, p.repeats, p.gap_ms, p.timestep_ms, p.seed);
  const std::size_t epoch_total = layout.raster.timesteps();
  const std::size_t total = lead + epoch_total;

  std::vector<SpikeEvent> pattern_events;
  std::vector<SpikeEvent> truth;
  for (const auto& e : layout.truth.raster.events()) {
    const std::size_t end = lead + e.t;
    truth.push_back({e.train, static_cast<Timestep>(end)});
    const auto& ramp = ramps[e.train];
    for (std::size_t s = 0; s < length; ++s) {
      const double frac = static_cast<double>(s) / static_cast<double>(length - 1);
      const auto t = static_cast<Timestep>(end + 1 - length + s);
      for (auto c : driven[e.train]) {
        const double v = ramp[c].first + (ramp[c].second - ramp[c].first) * frac;
        const std::size_t k = std::min(static_cast<std::size_t>(v * static_cast<double>(p.fields)),
                                       p.fields - 1);
        for (std::size_t n = 0; n <= 2 * p.halo; ++n)
          pattern_events.push_back({static_cast<TrainIndex>(c * block + k + n), t});
      }
    }
  }
  SpikeRaster patterns_raster =
      SpikeRaster::from_events(trains, total, p.timestep_ms, std::move(pattern_events));
  patterns_raster = add_jitter(patterns_raster, p.drop_prob, p.shift_sd, p.seed);

  auto noise_rng = engine(p.seed, 4);
  std::vector<TrainIndex> noisy;
  std::vector<std::size_t> local(block);
  for (std::size_t c = 0; c < p.channels; ++c) {
    std::iota(local.begin(), local.end(), std::size_t{0});
    std::shuffle(local.begin(), local.end(), noise_rng);
    for (std::size_t n = 0; n < p.noise_trains_per_block; ++n)
      noisy.push_back(static_cast<TrainIndex>(c * block + local[n]));
  }
  std::sort(noisy.begin(), noisy.end());
  std::vector<SpikeEvent> noise_events;
  for (std::size_t t = 0; t < total; ++t)
    for (auto i : noisy)
      if (unit(noise_rng) < p.noise_rate) noise_events.push_back({i, static_cast<Timestep>(t)});
  const auto noise_raster =
      SpikeRaster::from_events(trains, total, p.timestep_ms, std::move(noise_events));

  SynthSet set;
  set.raster = patterns_raster.merge(noise_raster);
  set.truth.raster =
      SpikeRaster::from_events(p.n_patterns, total, p.timestep_ms, std::move(truth));
  set.truth.labels = layout.truth.labels;
  set.patterns = std::move(layout.patterns);
  set.lead_steps = lead;
  set.epoch_steps = layout.epoch_steps;
  set.epochs = layout.epochs;
  return set;
}

PropagatingSet make_propagating_set(const PropagatingParams& p) {
  auto check_span = [&](const ChannelSpan& s, const char* name) {
    if (s.low >= s.high || s.high > p.channels)
      throw InvalidArgument(std::string("make_propagating_set: ") + name + " [" +
                            std::to_string(s.low) + ", " + std::to_string(s.high) +
                            ") is empty or exceeds " + std::to_string(p.channels) +
                            " channels");
  };
  check_span(p.short_span, "short_span");
  check_span(p.long_span, "long_span");
  if (!(p.sample_period_ms > 0.0))
    throw InvalidArgument("make_propagating_set: sample period must be positive");
  const std::size_t delay = to_steps(p.channel_delay_ms, p.sample_period_ms);
  const std::size_t rise = std::max<std::size_t>(1, to_steps(p.rise_ms, p.sample_period_ms));
  const std::size_t hold = to_steps(p.hold_ms, p.sample_period_ms);
  const std::size_t fall = std::max<std::size_t>(1, to_steps(p.fall_ms, p.sample_period_ms));
  const std::size_t gap = to_steps(p.gap_ms, p.sample_period_ms);
  const std::size_t jitter = to_steps(p.gap_jitter_ms, p.sample_period_ms);
  const std::size_t lead = to_steps(p.lead_ms, p.sample_period_ms);

  auto rng = engine(p.seed, 0);
  std::vector<int> order(p.n_short, 0);
  order.insert(order.end(), p.n_long, 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<std::size_t> extra(0, jitter);

  auto span_of = [&](int kind) { return kind == 0 ? p.short_span : p.long_span; };
  // Samples from the first onset to the last nonzero sample.
  auto length_of = [&](int kind) { return (span_of(kind).size() - 1) * delay + rise + hold + fall - 1; };

  std::vector<std::size_t> starts;
  std::size_t t = lead;
  for (int kind : order) {
    starts.push_back(t);
    t += length_of(kind) + 1 + gap + extra(rng);
  }
  const std::size_t total = t;

  MultichannelSignal sig(p.channels, total, p.sample_period_ms);
  std::vector<SpikeEvent> truth;
  const double pi = std::numbers::pi;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int kind = order[k];
    const auto span = span_of(kind);
    const std::size_t fall_start = starts[k] + (span.size() - 1) * delay + rise + hold;
    for (std::size_t c = span.low; c < span.high; ++c) {
      // Short recruits high to low channel index, long low to high.
      const std::size_t pos = kind == 0 ? span.high - 1 - c : c - span.low;
      const std::size_t onset = starts[k] + pos * delay;
      for (std::size_t s = onset + 1; s < fall_start; ++s) {
        const double x = static_cast<double>(s - onset) / static_cast<double>(rise);
        sig.at(c, s) = x >= 1.0 ? 1.0 : 0.5 * (1.0 - std::cos(pi * x));
      }
      for (std::size_t s = 0; s < fall; ++s)
        sig.at(c, fall_start + s) =
            0.5 * (1.0 + std::cos(pi * static_cast<double>(s) / static_cast<double>(fall)));
    }
    truth.push_back({static_cast<TrainIndex>(kind),
                     static_cast<Timestep>(starts[k] + length_of(kind))});
  }
  PropagatingSet set;
  set.signal = std::move(sig);
  set.truth.raster = SpikeRaster::from_events(2, total, p.sample_period_ms, std::move(truth));
  set.truth.labels = {"short", "long"};
  return set;
}

}  // namespace frugal_snn::synth
