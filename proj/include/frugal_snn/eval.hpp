#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "frugal_snn/raster.hpp"

namespace frugal_snn::eval {

struct SmoothingParams {
  std::size_t n = 31;   ///< kernel length in timesteps, odd
  double sigma = 3.0;   ///< timesteps
};

/// Coincidence window of a preset: 400 ms (artificial, vowel), 2500 ms (neural).
double coincidence_window_ms(std::string_view preset);

/// Each train convolved with a unit-sum Gaussian, same length, zero padded.
std::vector<std::vector<double>> smooth_raster(const SpikeRaster& raster,
                                               const SmoothingParams& k = {});

/// max over lags |l| <= max_lag of sum_t a[t] * b[t + l].
double max_cross_correlation(std::span<const double> a, std::span<const double> b,
                             std::size_t max_lag);

/// For each truth train, the output train with the largest smoothed
/// cross-correlation within +/- window (lowest index on ties). Several truth
/// trains may share one output. A truth train with zero correlation to
/// every output stays unpaired.
std::vector<std::optional<std::size_t>> match_pairs(const SpikeRaster& truth,
                                                    const SpikeRaster& output,
                                                    double window_ms,
                                                    const SmoothingParams& k = {});

/// Size of the greedy time-ordered one-to-one matching between two sorted
/// spike-time lists with |a - b| <= window.
std::size_t hit_count(std::span<const double> a, std::span<const double> b, double window);

/// 2H / (T + O); 1 when both lists are empty.
double f_score(std::span<const double> truth_ms, std::span<const double> output_ms,
               double window_ms);

/// Global 2H / (T + O): H sums hits over the paired trains, T counts every
/// truth spike and O every output spike, paired or not.
double global_f(const SpikeRaster& truth, const SpikeRaster& output,
                std::span<const std::optional<std::size_t>> pairs, double window_ms);

/// Entry (i, j): one-to-one hits between truth train i and output train j.
std::vector<std::vector<std::size_t>> confusion_matrix(const SpikeRaster& truth,
                                                       const SpikeRaster& output,
                                                       double window_ms);

struct MatchReport {
  std::vector<std::optional<std::size_t>> pairs;
  std::vector<double> f_per_pair;  ///< F of truth train i and its paired output (0 if unpaired)
  double f_global = 0.0;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::size_t> truth_counts;
  std::vector<std::size_t> output_counts;
  double coincidence_window_ms = 0.0;

  /// Output trains that fired at least once.
  std::size_t distinct_firing() const;
};

/// Pairing, per-pair F, global F and confusion matrix in one pass. Both
/// rasters must have the same timestep count and timestep.
MatchReport evaluate(const SpikeRaster& truth, const SpikeRaster& output, double window_ms,
                     const SmoothingParams& k = {});

}  // namespace frugal_snn::eval
