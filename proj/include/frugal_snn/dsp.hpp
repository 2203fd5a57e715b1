#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace frugal_snn::dsp {

/// Gaussian window of odd length n, centred, normalized to unit sum.
std::vector<double> gaussian_kernel(std::size_t n, double sigma);

/// Same-length convolution with a centred odd-length kernel; samples outside
/// the input are treated as zero.
std::vector<double> convolve_same(std::span<const double> x,
                                  std::span<const double> kernel);

/// Direct-form II transposed second-order section.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  /// Low-pass section with quality factor q, bilinear transform with
  /// frequency prewarping.
  static Biquad lowpass(double cutoff_hz, double sample_rate_hz, double q);
  /// First-order low-pass (b2 = a2 = 0).
  static Biquad lowpass_first_order(double cutoff_hz, double sample_rate_hz);

  /// Magnitude of the frequency response at f_hz.
  double magnitude(double f_hz, double sample_rate_hz) const;
};

/// Butterworth low-pass of the given order as a cascade of sections.
std::vector<Biquad> butterworth_lowpass(unsigned order, double cutoff_hz,
                                        double sample_rate_hz);

/// Runs the cascade over x from a zero initial state.
std::vector<double> filter(std::span<const Biquad> cascade,
                           std::span<const double> x);

}  // namespace frugal_snn::dsp
