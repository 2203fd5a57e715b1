#include "frugal_snn/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "csv_util.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn::plasticity {

void StdpParams::validate() const {
  for (double x : {w_ltp, w_ltd, w_lateral_potentiation, w_lateral_inhibition, t_stdp_ms})
    if (!std::isfinite(x)) throw ConfigError("stdp: parameters must be finite");
  if (!(t_stdp_ms > 0.0)) throw ConfigError("stdp.t_stdp_ms must be > 0");
}

StdpParams StdpParams::preset(std::string_view name) {
  StdpParams p;
  if (name == "artificial" || name == "vowel") {
    p.t_stdp_ms = 500.0;
  } else if (name == "neural") {
    p.t_stdp_ms = 8000.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) +
                      "' (expected artificial, vowel or neural)");
  }
  return p;
}

void IpParams::validate() const {
  for (double x : {f_th_post, dth_pair, th_min, th_max})
    if (!std::isfinite(x)) throw ConfigError("ip: parameters must be finite");
  if (!(f_th_post > 0.0 && f_th_post < 1.0))
    throw ConfigError("ip.f_th_post must lie in (0, 1)");
  if (dth_pair < 0.0) throw ConfigError("ip.dth_pair must be >= 0");
  if (!(th_min < th_max)) throw ConfigError("ip.th_min must be < ip.th_max");
}

IpParams IpParams::preset(std::string_view name) {
  if (name == "artificial") return {0.01, 0.001};
  if (name == "vowel") return {0.01, 0.006};
  if (name == "neural") return {0.5, 0.05};
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected artificial, vowel or neural)");
}

SynapseMatrix::SynapseMatrix(std::size_t trains, std::size_t neurons, double value)
    : trains_(trains), neurons_(neurons), w_(trains * neurons, value) {
  if (value < -1.0 || value > 0.0)
    throw InvalidArgument("SynapseMatrix: initial value outside [-1, 0]");
}

SynapseMatrix SynapseMatrix::random(std::size_t trains, std::size_t neurons,
                                    std::uint64_t seed) {
  SynapseMatrix m(trains, neurons);
  std::mt19937_64 rng(seed);
  // 53 random mantissa bits; u in [0, 1), redrawn at 0 so -u is in (-1, 0).
  for (auto& x : m.w_) {
    double u = 0.0;
    while (u == 0.0) u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = -u;
  }
  return m;
}

void SynapseMatrix::clip() {
  for (auto& x : w_) x = std::clamp(x, -1.0, 0.0);
}

std::size_t window_steps(double t_stdp_ms, double timestep_ms) {
  if (!(t_stdp_ms > 0.0) || !(timestep_ms > 0.0))
    throw InvalidArgument("window_steps: durations must be positive");
  return static_cast<std::size_t>(std::ceil(t_stdp_ms / timestep_ms - 1e-9));
}

std::vector<std::uint32_t> window_counts(const SpikeRaster& raster, Timestep t_post,
                                         double t_stdp_ms) {
  if (t_post >= raster.timesteps())
    throw InvalidArgument("window_counts: t_post outside raster");
  const std::size_t steps = window_steps(t_stdp_ms, raster.timestep_ms());
  const Timestep first = steps > t_post ? 0 : static_cast<Timestep>(t_post + 1 - steps);
  std::vector<std::uint32_t> counts(raster.trains(), 0);
  for (Timestep t = first; t <= t_post; ++t)
    for (auto i : raster.spikes_at(t)) ++counts[i];
  return counts;
}

std::vector<std::uint8_t> recent_activity(const SpikeRaster& raster, Timestep t_post,
                                          double t_stdp_ms) {
  const auto counts = window_counts(raster, t_post, t_stdp_ms);
  std::vector<std::uint8_t> flags(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) flags[i] = counts[i] > 0 ? 1 : 0;
  return flags;
}

namespace {

void check(const SynapseMatrix& w, std::size_t winner, std::size_t n_flags) {
  if (winner >= w.neurons()) throw InvalidArgument("plasticity: winner index out of range");
  if (n_flags != w.trains()) throw InvalidArgument("plasticity: flag count != train count");
}

}  // namespace

void apply_classical_stdp(SynapseMatrix& w, std::size_t winner,
                          std::span<const std::uint8_t> flags, const StdpParams& p) {
  check(w, winner, flags.size());
  for (std::size_t i = 0; i < w.trains(); ++i) {
    double& x = w.at(i, winner);
    x = std::clamp(x + (flags[i] ? p.w_ltp : p.w_ltd), -1.0, 0.0);
  }
}

void apply_lateral_stdp(SynapseMatrix& w, std::size_t winner,
                        std::span<const std::uint8_t> flags, const StdpParams& p) {
  check(w, winner, flags.size());
  for (std::size_t i = 0; i < w.trains(); ++i) {
    if (!flags[i]) continue;
    for (std::size_t j = 0; j < w.neurons(); ++j) {
      double& x = w.at(i, j);
      x = std::clamp(x + (j == winner ? p.w_lateral_potentiation : p.w_lateral_inhibition),
                     -1.0, 0.0);
    }
  }
}

double apply_ip(lts::LtsNeuronState& state, const SynapseMatrix& w, std::size_t winner,
                std::span<const std::uint32_t> counts, const IpParams& p) {
  if (winner >= w.neurons()) throw InvalidArgument("apply_ip: winner index out of range");
  if (counts.size() != w.trains()) throw InvalidArgument("apply_ip: count size != train count");
  double th = state.th - p.f_th_post * state.th;
  double pairing = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i]) pairing += static_cast<double>(counts[i]) * std::abs(w.at(i, winner));
  th += p.dth_pair * pairing;
  state.th = std::clamp(th, p.th_min, p.th_max);
  return state.th;
}

double apply_ip(lts::LtsNeuronState& state, const SynapseMatrix& w, std::size_t winner,
                const SpikeRaster& raster, Timestep t_post, const IpParams& p,
                double t_stdp_ms) {
  const auto counts = window_counts(raster, t_post, t_stdp_ms);
  return apply_ip(state, w, winner, counts, p);
}

void save_weights_csv(const SynapseMatrix& w, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "train";
  for (std::size_t j = 0; j < w.neurons(); ++j) out << ',' << j;
  out << '\n';
  for (std::size_t i = 0; i < w.trains(); ++i) {
    out << i;
    for (double x : w.row(i)) out << ',' << detail::format_double(x);
    out << '\n';
  }
  if (!out) throw Error(path.string() + ": write failed");
}

SynapseMatrix load_weights_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  const std::string name = path.string();
  std::size_t neurons = 0;
  bool header = false;
  std::vector<double> values;
  std::size_t trains = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto f = detail::split_fields(view);
    if (!header) {
      if (f.empty() || f[0] != "train") throw ParseError(name, row, 1, "expected 'train' column");
      for (std::size_t k = 1; k < f.size(); ++k) {
        const auto j = detail::to_uint(f[k]);
        if (!j || *j != k - 1) throw ParseError(name, row, k + 1, "neuron header must be 0..N-1");
      }
      neurons = f.size() - 1;
      header = true;
      continue;
    }
    if (f.size() != neurons + 1)
      throw ParseError(name, row, 0, "expected " + std::to_string(neurons + 1) + " columns");
    const auto i = detail::to_uint(f[0]);
    if (!i || *i != trains) throw ParseError(name, row, 1, "train rows must be 0, 1, 2, ... in order");
    for (std::size_t k = 1; k < f.size(); ++k) {
      const auto x = detail::to_double(f[k]);
      if (!x || *x < -1.0 || *x > 0.0)
        throw ParseError(name, row, k + 1, "weight must be a real in [-1, 0]");
      values.push_back(*x);
    }
    ++trains;
  }
  if (!header) throw ParseError(name, 0, 0, "missing header row");
  SynapseMatrix w(trains, neurons);
  for (std::size_t i = 0; i < trains; ++i)
    for (std::size_t j = 0; j < neurons; ++j) w.at(i, j) = values[i * neurons + j];
  return w;
}

}  // namespace frugal_snn::plasticity
