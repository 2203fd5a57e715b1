#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frugal_snn {

/// Equal-length real-valued channels sampled at a fixed period. Data is
/// channel-major: sample t of channel c lives at data[c * samples + t].
class MultichannelSignal {
 public:
  MultichannelSignal() = default;
  MultichannelSignal(std::size_t channels, std::size_t samples,
                     double sample_period_ms);
  MultichannelSignal(std::size_t channels, std::size_t samples,
                     double sample_period_ms, std::vector<double> data);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t samples() const noexcept { return samples_; }
  double sample_period_ms() const noexcept { return sample_period_ms_; }
  double sample_rate_hz() const noexcept { return 1000.0 / sample_period_ms_; }

  std::span<double> channel(std::size_t c);
  std::span<const double> channel(std::size_t c) const;
  double at(std::size_t c, std::size_t t) const { return data_[c * samples_ + t]; }
  double& at(std::size_t c, std::size_t t) { return data_[c * samples_ + t]; }

  const std::vector<double>& data() const noexcept { return data_; }

  /// Channel names; defaults to ch0, ch1, ...
  const std::vector<std::string>& names() const noexcept { return names_; }
  void set_names(std::vector<std::string> names);

  friend bool operator==(const MultichannelSignal&,
                         const MultichannelSignal&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t samples_ = 0;
  double sample_period_ms_ = 1.0;
  std::vector<double> data_;
  std::vector<std::string> names_;
};

namespace signals {

enum class NormalizeMode { per_channel, global };

/// Reads a signal CSV. The header names the channels, optionally preceded by
/// a `t` column (milliseconds). The sample period comes from, in order:
/// `override_period_ms`, a `# sample_period_ms=<v>` comment, the `t` column.
MultichannelSignal load_signal(const std::filesystem::path& path,
                               std::optional<double> override_period_ms = {});

/// Writes a signal CSV that load_signal reads back bit-exactly.
void save_signal(const MultichannelSignal& signal,
                 const std::filesystem::path& path,
                 bool with_time_column = false);

/// Affine rescale to [0, 1]. Constant channels (or a constant signal in
/// global mode) map to all zeros.
MultichannelSignal normalize(const MultichannelSignal& signal,
                             NormalizeMode mode = NormalizeMode::per_channel);

/// Causal Butterworth low-pass, one forward pass per channel, filter state
/// starting at rest. Built from bilinear-transform biquads (plus one
/// first-order section for odd orders).
MultichannelSignal lowpass_smooth(const MultichannelSignal& signal,
                                  double cutoff_hz, unsigned order = 2);

struct EnvelopeParams {
  double sd_mult = 3.0;
  std::size_t bin = 100;
  std::size_t kernel_n = 501;
  double kernel_sigma = 51.0;
};

/// Multiunit activity envelope of an already band-passed recording: samples
/// beyond mean +/- sd_mult*std count as spikes, counts are binned, and the
/// binned series is smoothed with a unit-sum Gaussian kernel.
MultichannelSignal multiunit_envelope(const MultichannelSignal& samples,
                                      const EnvelopeParams& params = {});

/// Threshold-crossing flags of one channel (the first envelope stage).
std::vector<unsigned char> threshold_crossings(std::span<const double> channel,
                                               double sd_mult);

}  // namespace signals
}  // namespace frugal_snn
