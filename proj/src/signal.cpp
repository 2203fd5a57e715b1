#include "frugal_snn/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "csv_util.hpp"
#include "frugal_snn/dsp.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn {

MultichannelSignal::MultichannelSignal(std::size_t channels, std::size_t samples,
                                       double sample_period_ms)
    : MultichannelSignal(channels, samples, sample_period_ms,
                         std::vector<double>(channels * samples, 0.0)) {}

MultichannelSignal::MultichannelSignal(std::size_t channels, std::size_t samples,
                                       double sample_period_ms,
                                       std::vector<double> data)
    : channels_(channels),
      samples_(samples),
      sample_period_ms_(sample_period_ms),
      data_(std::move(data)) {
  if (!(sample_period_ms > 0.0))
    throw InvalidArgument("MultichannelSignal: sample_period_ms must be positive");
  if (data_.size() != channels * samples)
    throw InvalidArgument("MultichannelSignal: data size does not match shape");
  names_.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) names_.push_back("ch" + std::to_string(c));
}

std::span<double> MultichannelSignal::channel(std::size_t c) {
  if (c >= channels_) throw InvalidArgument("MultichannelSignal: channel out of range");
  return {data_.data() + c * samples_, samples_};
}

std::span<const double> MultichannelSignal::channel(std::size_t c) const {
  if (c >= channels_) throw InvalidArgument("MultichannelSignal: channel out of range");
  return {data_.data() + c * samples_, samples_};
}

void MultichannelSignal::set_names(std::vector<std::string> names) {
  if (names.size() != channels_)
    throw InvalidArgument("MultichannelSignal: wrong number of channel names");
  names_ = std::move(names);
}

namespace signals {

MultichannelSignal load_signal(const std::filesystem::path& path,
                               std::optional<double> override_period_ms) {
  if (!std::filesystem::exists(path))
    throw ParseError(path.string(), 0, 0, "file does not exist");
  auto in = detail::open_for_read(path);
  const std::string name = path.string();

  std::optional<double> meta_period;
  std::vector<std::string> header;
  bool has_time = false;
  std::vector<std::vector<double>> columns;  // one per channel
  std::vector<double> times;

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (auto v = detail::comment_value(view, "sample_period_ms")) {
        meta_period = detail::to_double(*v);
        if (!meta_period || *meta_period <= 0.0)
          throw ParseError(name, row, 0, "bad sample_period_ms");
      }
      continue;
    }
    const auto fields = detail::split_fields(view);
    if (header.empty()) {
      for (auto f : fields) header.emplace_back(f);
      has_time = !header.empty() && header.front() == "t";
      const std::size_t n_channels = header.size() - (has_time ? 1 : 0);
      if (n_channels == 0 || (header.size() == 1 && header.front().empty()))
        throw ParseError(name, row, 0, "header declares zero channels");
      columns.resize(n_channels);
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError(name, row, 0,
                       "ragged row: expected " + std::to_string(header.size()) +
                           " columns, found " + std::to_string(fields.size()));
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const auto v = detail::to_double(fields[k]);
      if (!v)
        throw ParseError(name, row, k + 1,
                         "non-numeric cell '" + std::string(fields[k]) + "'");
      if (has_time && k == 0)
        times.push_back(*v);
      else
        columns[k - (has_time ? 1 : 0)].push_back(*v);
    }
  }
  if (header.empty()) throw ParseError(name, 0, 0, "missing header row");

  double period = 0.0;
  if (override_period_ms) {
    period = *override_period_ms;
  } else if (meta_period) {
    period = *meta_period;
  } else if (has_time && times.size() >= 2) {
    period = times[1] - times[0];
  } else {
    throw ParseError(name, 0, 0,
                     "sample period unknown: add '# sample_period_ms=<v>', a 't' "
                     "column, or pass it explicitly");
  }
  if (!(period > 0.0)) throw ParseError(name, 0, 0, "sample period must be positive");

  const std::size_t samples = columns.front().size();
  std::vector<double> data;
  data.reserve(columns.size() * samples);
  for (const auto& col : columns) data.insert(data.end(), col.begin(), col.end());
  MultichannelSignal sig(columns.size(), samples, period, std::move(data));
  sig.set_names({header.begin() + (has_time ? 1 : 0), header.end()});
  return sig;
}

void save_signal(const MultichannelSignal& signal,
                 const std::filesystem::path& path, bool with_time_column) {
  auto out = detail::open_for_write(path);
  out << "# sample_period_ms=" << detail::format_double(signal.sample_period_ms())
      << '\n';
  if (with_time_column) out << "t,";
  for (std::size_t c = 0; c < signal.channels(); ++c)
    out << (c ? "," : "") << signal.names()[c];
  out << '\n';
  for (std::size_t t = 0; t < signal.samples(); ++t) {
    if (with_time_column)
      out << detail::format_double(static_cast<double>(t) * signal.sample_period_ms()) << ',';
    for (std::size_t c = 0; c < signal.channels(); ++c)
      out << (c ? "," : "") << detail::format_double(signal.at(c, t));
    out << '\n';
  }
  if (!out) throw Error(path.string() + ": write failed");
}

namespace {

void rescale(std::span<double> x, double lo, double hi) {
  if (!(hi > lo)) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  const double span = hi - lo;
  for (auto& v : x) v = std::clamp((v - lo) / span, 0.0, 1.0);
}

}  // namespace

MultichannelSignal normalize(const MultichannelSignal& signal, NormalizeMode mode) {
  if (signal.channels() == 0 || signal.samples() == 0)
    throw InvalidArgument("normalize: empty signal");
  MultichannelSignal out = signal;
  if (mode == NormalizeMode::global) {
    const auto [lo, hi] = std::minmax_element(signal.data().begin(), signal.data().end());
    for (std::size_t c = 0; c < out.channels(); ++c) rescale(out.channel(c), *lo, *hi);
  } else {
    for (std::size_t c = 0; c < out.channels(); ++c) {
      auto ch = out.channel(c);
      const auto [lo, hi] = std::minmax_element(ch.begin(), ch.end());
      rescale(ch, *lo, *hi);
    }
  }
  return out;
}

MultichannelSignal lowpass_smooth(const MultichannelSignal& signal,
                                  double cutoff_hz, unsigned order) {
  const double fs = signal.sample_rate_hz();
  if (!(cutoff_hz > 0.0) || cutoff_hz >= fs / 2.0)
    throw InvalidArgument("lowpass_smooth: cutoff " + std::to_string(cutoff_hz) +
                          " Hz must lie below the Nyquist frequency " +
                          std::to_string(fs / 2.0) + " Hz");
  const auto cascade = dsp::butterworth_lowpass(order, cutoff_hz, fs);
  MultichannelSignal out = signal;
  for (std::size_t c = 0; c < out.channels(); ++c) {
    const auto y = dsp::filter(cascade, signal.channel(c));
    std::copy(y.begin(), y.end(), out.channel(c).begin());
  }
  return out;
}

std::vector<unsigned char> threshold_crossings(std::span<const double> channel,
                                               double sd_mult) {
  std::vector<unsigned char> flags(channel.size(), 0);
  if (channel.empty()) return flags;
  const double n = static_cast<double>(channel.size());
  const double mean = std::accumulate(channel.begin(), channel.end(), 0.0) / n;
  double var = 0.0;
  for (double v : channel) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0)) return flags;
  const double limit = sd_mult * sd;
  for (std::size_t t = 0; t < channel.size(); ++t)
    flags[t] = std::abs(channel[t] - mean) >= limit ? 1 : 0;
  return flags;
}

MultichannelSignal multiunit_envelope(const MultichannelSignal& samples,
                                      const EnvelopeParams& params) {
  if (params.bin == 0) throw InvalidArgument("multiunit_envelope: bin must be >= 1");
  if (params.kernel_n % 2 == 0)
    throw InvalidArgument("multiunit_envelope: kernel_n must be odd");
  if (params.bin > samples.samples())
    throw InvalidArgument("multiunit_envelope: bin larger than channel length");

  const std::size_t bins = samples.samples() / params.bin;
  const auto kernel = dsp::gaussian_kernel(params.kernel_n, params.kernel_sigma);
  MultichannelSignal out(samples.channels(), bins,
                         samples.sample_period_ms() * static_cast<double>(params.bin));
  out.set_names(samples.names());
  for (std::size_t c = 0; c < samples.channels(); ++c) {
    const auto flags = threshold_crossings(samples.channel(c), params.sd_mult);
    std::vector<double> counts(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b)
      for (std::size_t k = 0; k < params.bin; ++k) counts[b] += flags[b * params.bin + k];
    const auto smooth = dsp::convolve_same(counts, kernel);
    std::copy(smooth.begin(), smooth.end(), out.channel(c).begin());
  }
  return out;
}

}  // namespace signals
}  // namespace frugal_snn
