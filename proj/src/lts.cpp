#include "frugal_snn/lts.hpp"

#include <cmath>
#include <string>

#include "csv_util.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn::lts {

void LtsParams::validate() const {
  for (double x : {tau_m_ms, epsilon, alpha_n, alpha_p, g, dt_ms})
    if (!std::isfinite(x)) throw ConfigError("lts: parameters must be finite");
  if (!(tau_m_ms > 0.0)) throw ConfigError("lts.tau_m_ms must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("lts.epsilon must be > 0");
  if (!(dt_ms > 0.0)) throw ConfigError("lts.dt_ms must be > 0");
}

LtsParams LtsParams::artificial() { return {15.0, 0.001, -200.0, -10.0, 100.0, 1.0}; }
LtsParams LtsParams::vowel() { return {15.0, 0.01, -200.0, -10.0, 100.0, 1.0}; }
LtsParams LtsParams::neural() { return {50.0, 0.001, -200.0, -10.0, 100.0, 1.0}; }

LtsParams LtsParams::preset(std::string_view name) {
  if (name == "artificial") return artificial();
  if (name == "vowel") return vowel();
  if (name == "neural") return neural();
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected artificial, vowel or neural)");
}

void save_trace_csv(std::span<const TraceSample> trace, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "t,neuron,v,q,th\n";
  for (const auto& s : trace)
    out << s.t << ',' << s.neuron << ',' << detail::format_double(s.v) << ','
        << detail::format_double(s.q) << ',' << detail::format_double(s.th) << '\n';
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace frugal_snn::lts
