#include "frugal_snn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frugal_snn/dsp.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn::eval {

namespace {

constexpr double kTimeSlack = 1e-9;

void check_shapes(const SpikeRaster& truth, const SpikeRaster& output) {
  if (truth.timesteps() != output.timesteps())
    throw InvalidArgument("eval: truth has " + std::to_string(truth.timesteps()) +
                          " timesteps, output has " + std::to_string(output.timesteps()));
  if (truth.timestep_ms() != output.timestep_ms())
    throw InvalidArgument("eval: truth and output timesteps differ");
}

std::vector<std::vector<double>> times_ms(const SpikeRaster& r) {
  std::vector<std::vector<double>> out(r.trains());
  for (Timestep t = 0; t < r.timesteps(); ++t)
    for (auto i : r.spikes_at(t)) out[i].push_back(static_cast<double>(t) * r.timestep_ms());
  return out;
}

std::size_t lag_steps(double window_ms, double timestep_ms) {
  if (!(window_ms > 0.0)) throw InvalidArgument("eval: coincidence window must be positive");
  return static_cast<std::size_t>(std::floor(window_ms / timestep_ms + kTimeSlack));
}

}  // namespace

double coincidence_window_ms(std::string_view preset) {
  if (preset == "artificial" || preset == "vowel") return 400.0;
  if (preset == "neural") return 2500.0;
  throw ConfigError("unknown preset '" + std::string(preset) +
                    "' (expected artificial, vowel or neural)");
}

std::vector<std::vector<double>> smooth_raster(const SpikeRaster& raster,
                                               const SmoothingParams& k) {
  if (k.n % 2 == 0) throw InvalidArgument("smooth_raster: kernel length must be odd");
  const auto kernel = dsp::gaussian_kernel(k.n, k.sigma);
  std::vector<std::vector<double>> out(raster.trains(),
                                       std::vector<double>(raster.timesteps(), 0.0));
  for (Timestep t = 0; t < raster.timesteps(); ++t)
    for (auto i : raster.spikes_at(t)) out[i][t] = 1.0;
  for (auto& row : out) row = dsp::convolve_same(row, kernel);
  return out;
}

double max_cross_correlation(std::span<const double> a, std::span<const double> b,
                             std::size_t max_lag) {
  const auto n = static_cast<long long>(std::min(a.size(), b.size()));
  const auto lags = static_cast<long long>(max_lag);
  std::vector<double> acc(2 * max_lag + 1, 0.0);
  // Iterate over the sparse support of a only.
  for (long long t = 0; t < n; ++t) {
    const double x = a[static_cast<std::size_t>(t)];
    if (x == 0.0) continue;
    const long long lo = std::max(-lags, -t);
    const long long hi = std::min(lags, n - 1 - t);
    for (long long l = lo; l <= hi; ++l)
      acc[static_cast<std::size_t>(l + lags)] += x * b[static_cast<std::size_t>(t + l)];
  }
  return *std::max_element(acc.begin(), acc.end());
}

std::vector<std::optional<std::size_t>> match_pairs(const SpikeRaster& truth,
                                                    const SpikeRaster& output,
                                                    double window_ms,
                                                    const SmoothingParams& k) {
  check_shapes(truth, output);
  const std::size_t max_lag = lag_steps(window_ms, truth.timestep_ms());
  const auto st = smooth_raster(truth, k);
  const auto so = smooth_raster(output, k);
  std::vector<std::optional<std::size_t>> pairs(truth.trains());
  for (std::size_t i = 0; i < st.size(); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < so.size(); ++j) {
      const double c = max_cross_correlation(st[i], so[j], max_lag);
      if (c > best) {
        best = c;
        pairs[i] = j;
      }
    }
  }
  return pairs;
}

std::size_t hit_count(std::span<const double> a, std::span<const double> b, double window) {
  std::size_t i = 0, j = 0, hits = 0;
  while (i < a.size() && j < b.size()) {
    if (std::abs(a[i] - b[j]) <= window + kTimeSlack) {
      ++hits;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return hits;
}

double f_score(std::span<const double> truth_ms, std::span<const double> output_ms,
               double window_ms) {
  if (!(window_ms > 0.0)) throw InvalidArgument("f_score: window must be positive");
  const std::size_t total = truth_ms.size() + output_ms.size();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(hit_count(truth_ms, output_ms, window_ms)) /
         static_cast<double>(total);
}

double global_f(const SpikeRaster& truth, const SpikeRaster& output,
                std::span<const std::optional<std::size_t>> pairs, double window_ms) {
  check_shapes(truth, output);
  if (pairs.size() != truth.trains())
    throw InvalidArgument("global_f: one pairing entry per truth train required");
  const auto tt = times_ms(truth);
  const auto ot = times_ms(output);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i]) hits += hit_count(tt[i], ot.at(*pairs[i]), window_ms);
  const std::size_t total = truth.event_count() + output.event_count();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<std::vector<std::size_t>> confusion_matrix(const SpikeRaster& truth,
                                                       const SpikeRaster& output,
                                                       double window_ms) {
  check_shapes(truth, output);
  const auto tt = times_ms(truth);
  const auto ot = times_ms(output);
  std::vector<std::vector<std::size_t>> m(tt.size(), std::vector<std::size_t>(ot.size(), 0));
  for (std::size_t i = 0; i < tt.size(); ++i)
    for (std::size_t j = 0; j < ot.size(); ++j) m[i][j] = hit_count(tt[i], ot[j], window_ms);
  return m;
}

std::size_t MatchReport::distinct_firing() const {
  return static_cast<std::size_t>(
      std::count_if(output_counts.begin(), output_counts.end(), [](auto c) { return c > 0; }));
}

MatchReport evaluate(const SpikeRaster& truth, const SpikeRaster& output, double window_ms,
                     const SmoothingParams& k) {
  MatchReport r;
  r.coincidence_window_ms = window_ms;
  r.pairs = match_pairs(truth, output, window_ms, k);
  r.confusion = confusion_matrix(truth, output, window_ms);
  r.truth_counts = truth.train_counts();
  r.output_counts = output.train_counts();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    if (!r.pairs[i]) {
      r.f_per_pair.push_back(0.0);
      continue;
    }
    const std::size_t j = *r.pairs[i];
    const std::size_t h = r.confusion[i][j];
    hits += h;
    const std::size_t sum = r.truth_counts[i] + r.output_counts[j];
    r.f_per_pair.push_back(sum == 0 ? 1.0 : 2.0 * static_cast<double>(h) / static_cast<double>(sum));
  }
  const std::size_t total = truth.event_count() + output.event_count();
  r.f_global = total == 0 ? 1.0 : 2.0 * static_cast<double>(hits) / static_cast<double>(total);
  return r;
}

}  // namespace frugal_snn::eval
