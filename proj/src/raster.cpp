#include "frugal_snn/raster.hpp"

#include <algorithm>
#include <string>

#include "csv_util.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn {

SpikeRaster::SpikeRaster(std::size_t trains, std::size_t timesteps,
                         double timestep_ms)
    : trains_(trains), timestep_ms_(timestep_ms), offsets_(timesteps + 1, 0) {
  if (!(timestep_ms > 0.0))
    throw InvalidArgument("SpikeRaster: timestep_ms must be positive");
}

SpikeRaster SpikeRaster::from_events(std::size_t trains, std::size_t timesteps,
                                     double timestep_ms,
                                     std::vector<SpikeEvent> events) {
  SpikeRaster r(trains, timesteps, timestep_ms);
  for (const auto& e : events) {
    if (e.train >= trains || e.t >= timesteps)
      throw InvalidArgument("SpikeRaster: event (train " +
                            std::to_string(e.train) + ", t " +
                            std::to_string(e.t) + ") out of bounds");
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.t != b.t ? a.t < b.t : a.train < b.train;
  });
  events.erase(std::unique(events.begin(), events.end()), events.end());

  r.spike_trains_.reserve(events.size());
  for (const auto& e : events) {
    r.spike_trains_.push_back(e.train);
    ++r.offsets_[e.t + 1];
  }
  for (std::size_t t = 1; t < r.offsets_.size(); ++t)
    r.offsets_[t] += r.offsets_[t - 1];
  return r;
}

SpikeRaster SpikeRaster::from_dense(std::size_t trains, std::size_t timesteps,
                                    double timestep_ms,
                                    std::span<const std::uint8_t> dense) {
  if (dense.size() != trains * timesteps)
    throw InvalidArgument("SpikeRaster::from_dense: size mismatch");
  SpikeRaster r(trains, timesteps, timestep_ms);
  for (std::size_t t = 0; t < timesteps; ++t) {
    for (std::size_t i = 0; i < trains; ++i) {
      if (dense[i * timesteps + t]) r.spike_trains_.push_back(static_cast<TrainIndex>(i));
    }
    r.offsets_[t + 1] = static_cast<std::uint32_t>(r.spike_trains_.size());
  }
  return r;
}

std::span<const TrainIndex> SpikeRaster::spikes_at(Timestep t) const {
  if (t >= timesteps()) throw InvalidArgument("SpikeRaster: timestep out of range");
  return {spike_trains_.data() + offsets_[t], offsets_[t + 1] - offsets_[t]};
}

bool SpikeRaster::contains(TrainIndex train, Timestep t) const {
  const auto s = spikes_at(t);
  return std::binary_search(s.begin(), s.end(), train);
}

std::vector<SpikeEvent> SpikeRaster::events() const {
  std::vector<SpikeEvent> out;
  out.reserve(event_count());
  for (Timestep t = 0; t < timesteps(); ++t)
    for (auto i : spikes_at(t)) out.push_back({i, t});
  return out;
}

std::vector<std::uint8_t> SpikeRaster::dense() const {
  std::vector<std::uint8_t> out(trains_ * timesteps(), 0);
  for (Timestep t = 0; t < timesteps(); ++t)
    for (auto i : spikes_at(t)) out[i * timesteps() + t] = 1;
  return out;
}

std::vector<std::size_t> SpikeRaster::train_counts() const {
  std::vector<std::size_t> counts(trains_, 0);
  for (auto i : spike_trains_) ++counts[i];
  return counts;
}

std::vector<Timestep> SpikeRaster::train_times(TrainIndex train) const {
  std::vector<Timestep> out;
  for (Timestep t = 0; t < timesteps(); ++t)
    if (contains(train, t)) out.push_back(t);
  return out;
}

std::vector<std::vector<Timestep>> SpikeRaster::all_train_times() const {
  std::vector<std::vector<Timestep>> out(trains_);
  for (Timestep t = 0; t < timesteps(); ++t)
    for (auto i : spikes_at(t)) out[i].push_back(t);
  return out;
}

SpikeRaster SpikeRaster::slice(Timestep begin, Timestep end) const {
  if (begin > end || end > timesteps())
    throw InvalidArgument("SpikeRaster::slice: bad range");
  SpikeRaster r(trains_, end - begin, timestep_ms_);
  r.spike_trains_.assign(spike_trains_.begin() + offsets_[begin],
                         spike_trains_.begin() + offsets_[end]);
  for (Timestep t = begin; t <= end; ++t)
    r.offsets_[t - begin] = offsets_[t] - offsets_[begin];
  return r;
}

SpikeRaster SpikeRaster::concat(const SpikeRaster& other) const {
  if (other.trains_ != trains_ || other.timestep_ms_ != timestep_ms_)
    throw InvalidArgument("SpikeRaster::concat: shape mismatch");
  SpikeRaster r = *this;
  const auto base = static_cast<std::uint32_t>(spike_trains_.size());
  r.spike_trains_.insert(r.spike_trains_.end(), other.spike_trains_.begin(),
                         other.spike_trains_.end());
  for (std::size_t t = 1; t < other.offsets_.size(); ++t)
    r.offsets_.push_back(base + other.offsets_[t]);
  return r;
}

SpikeRaster SpikeRaster::merge(const SpikeRaster& other) const {
  if (other.trains_ != trains_ || other.timesteps() != timesteps())
    throw InvalidArgument("SpikeRaster::merge: shape mismatch");
  auto ev = events();
  auto more = other.events();
  ev.insert(ev.end(), more.begin(), more.end());
  return from_events(trains_, timesteps(), timestep_ms_, std::move(ev));
}

void save_raster_csv(const SpikeRaster& raster,
                     const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "# timestep_ms=" << detail::format_double(raster.timestep_ms()) << '\n'
      << "# trains=" << raster.trains() << '\n'
      << "# timesteps=" << raster.timesteps() << '\n'
      << "t,train\n";
  for (Timestep t = 0; t < raster.timesteps(); ++t)
    for (auto i : raster.spikes_at(t)) out << t << ',' << i << '\n';
  if (!out) throw Error(path.string() + ": write failed");
}

SpikeRaster load_raster_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  const std::string name = path.string();
  double timestep_ms = 1.0;
  std::optional<std::uint64_t> trains, timesteps;
  std::vector<SpikeEvent> events;
  bool header_seen = false;
  std::uint64_t max_train = 0, max_t = 0;

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (auto v = detail::comment_value(view, "timestep_ms")) {
        auto d = detail::to_double(*v);
        if (!d || *d <= 0) throw ParseError(name, row, 0, "bad timestep_ms");
        timestep_ms = *d;
      } else if (auto v = detail::comment_value(view, "trains")) {
        trains = detail::to_uint(*v);
        if (!trains) throw ParseError(name, row, 0, "bad trains count");
      } else if (auto v = detail::comment_value(view, "timesteps")) {
        timesteps = detail::to_uint(*v);
        if (!timesteps) throw ParseError(name, row, 0, "bad timesteps count");
      }
      continue;
    }
    const auto fields = detail::split_fields(view);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "t" || fields[1] != "train")
        throw ParseError(name, row, 0, "expected header 't,train'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 2)
      throw ParseError(name, row, 0,
                       "expected 2 columns, found " + std::to_string(fields.size()));
    const auto t = detail::to_uint(fields[0]);
    if (!t) throw ParseError(name, row, 1, "non-integer timestep '" + std::string(fields[0]) + "'");
    const auto i = detail::to_uint(fields[1]);
    if (!i) throw ParseError(name, row, 2, "non-integer train '" + std::string(fields[1]) + "'");
    max_t = std::max(max_t, *t);
    max_train = std::max(max_train, *i);
    events.push_back({static_cast<TrainIndex>(*i), static_cast<Timestep>(*t)});
  }
  if (!header_seen) throw ParseError(name, 0, 0, "missing header 't,train'");

  const std::size_t n_trains = trains ? *trains : (events.empty() ? 0 : max_train + 1);
  const std::size_t n_steps = timesteps ? *timesteps : (events.empty() ? 0 : max_t + 1);
  if (!events.empty() && (max_train >= n_trains || max_t >= n_steps))
    throw ParseError(name, 0, 0, "event outside declared raster bounds");
  return SpikeRaster::from_events(n_trains, n_steps, timestep_ms, std::move(events));
}

}  // namespace frugal_snn
