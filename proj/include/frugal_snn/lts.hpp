#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "frugal_snn/raster.hpp"

namespace frugal_snn::lts {

/// Neuron dynamics constants:
///   tau_m dV/dt          = -V + q + g * I
///   (tau_m / eps) dq/dt  = -q + f(V),  f(V) = alpha_n * V if V < 0 else alpha_p
struct LtsParams {
  double tau_m_ms = 15.0;
  double epsilon = 0.001;
  double alpha_n = -200.0;
  double alpha_p = -10.0;
  double g = 100.0;
  double dt_ms = 1.0;

  /// Throws ConfigError unless tau_m_ms, epsilon and dt_ms are positive and
  /// everything is finite.
  void validate() const;

  static LtsParams artificial();
  static LtsParams vowel();
  static LtsParams neural();
  /// Preset by name; throws ConfigError on an unknown name.
  static LtsParams preset(std::string_view name);

  friend bool operator==(const LtsParams&, const LtsParams&) = default;
};

inline constexpr double kThresholdMin = 20.0;
inline constexpr double kThresholdMax = 3500.0;

struct LtsNeuronState {
  double v = 0.0;
  double q = 0.0;
  double th = kThresholdMin;
  double last_dv = 0.0;  ///< v change over the most recent step

  friend bool operator==(const LtsNeuronState&, const LtsNeuronState&) = default;
};

/// Adaptation drive f(V); V == 0 takes the alpha_p branch.
inline double adaptation_drive(double v, const LtsParams& p) noexcept {
  return v < 0.0 ? p.alpha_n * v : p.alpha_p;
}

/// One explicit Euler step; both right-hand sides use pre-step values.
inline void step(LtsNeuronState& s, double i_stim, const LtsParams& p) noexcept {
  const double v0 = s.v;
  const double q0 = s.q;
  s.v = v0 + (p.dt_ms / p.tau_m_ms) * (-v0 + q0 + p.g * i_stim);
  s.q = q0 + (p.dt_ms * p.epsilon / p.tau_m_ms) * (-q0 + adaptation_drive(v0, p));
  s.last_dv = s.v - v0;
}

/// Clears v, q and last_dv; th is kept.
inline void reset(LtsNeuronState& s) noexcept {
  s.v = 0.0;
  s.q = 0.0;
  s.last_dv = 0.0;
}

/// Trace row for debugging dumps.
struct TraceSample {
  Timestep t;
  std::uint32_t neuron;
  double v, q, th;
};

/// CSV `t,neuron,v,q,th`.
void save_trace_csv(std::span<const TraceSample> trace, const std::filesystem::path& path);

}  // namespace frugal_snn::lts
