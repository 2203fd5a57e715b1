#include "frugal_snn/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "frugal_snn/error.hpp"

namespace frugal_snn::dsp {

std::vector<double> gaussian_kernel(std::size_t n, double sigma) {
  if (n == 0 || n % 2 == 0)
    throw InvalidArgument("gaussian_kernel: length must be odd");
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_kernel: sigma must be positive");
  std::vector<double> k(n);
  const double half = static_cast<double>(n / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) - half;
    k[i] = std::exp(-0.5 * x * x / (sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

std::vector<double> convolve_same(std::span<const double> x,
                                  std::span<const double> kernel) {
  if (kernel.size() % 2 == 0)
    throw InvalidArgument("convolve_same: kernel length must be odd");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  std::vector<double> y(x.size(), 0.0);
  // Scatter form skips zero inputs, which dominate sparse spike counts.
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const double v = x[static_cast<std::size_t>(t)];
    if (v == 0.0) continue;
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      const auto s = t + k;
      if (s < 0 || s >= n) continue;
      y[static_cast<std::size_t>(s)] += v * kernel[static_cast<std::size_t>(k + half)];
    }
  }
  return y;
}

Biquad Biquad::lowpass(double cutoff_hz, double sample_rate_hz, double q) {
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate_hz;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 - cw) / 2.0 / a0;
  s.b1 = (1.0 - cw) / a0;
  s.b2 = s.b0;
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

Biquad Biquad::lowpass_first_order(double cutoff_hz, double sample_rate_hz) {
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  Biquad s;
  s.b0 = k / (1.0 + k);
  s.b1 = s.b0;
  s.a1 = (k - 1.0) / (k + 1.0);
  return s;
}

double Biquad::magnitude(double f_hz, double sample_rate_hz) const {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * std::numbers::pi * f_hz / sample_rate_hz);
  const auto z2 = z1 * z1;
  return std::abs((b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2));
}

std::vector<Biquad> butterworth_lowpass(unsigned order, double cutoff_hz,
                                        double sample_rate_hz) {
  if (order == 0) throw InvalidArgument("butterworth_lowpass: order must be >= 1");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0)
    throw InvalidArgument("butterworth_lowpass: cutoff must lie in (0, Nyquist)");
  std::vector<Biquad> cascade;
  // Analog Butterworth pole pairs sit at angles pi*(2k+n-1)/(2n).
  for (unsigned k = 1; k <= order / 2; ++k) {
    const double theta =
        std::numbers::pi * (2.0 * k + order - 1.0) / (2.0 * order);
    cascade.push_back(Biquad::lowpass(cutoff_hz, sample_rate_hz, -1.0 / (2.0 * std::cos(theta))));
  }
  if (order % 2 == 1)
    cascade.push_back(Biquad::lowpass_first_order(cutoff_hz, sample_rate_hz));
  return cascade;
}

std::vector<double> filter(std::span<const Biquad> cascade,
                           std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : cascade) {
    double z1 = 0.0, z2 = 0.0;
    for (auto& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

}  // namespace frugal_snn::dsp
