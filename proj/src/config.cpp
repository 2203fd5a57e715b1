#include "frugal_snn/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "csv_util.hpp"
#include "frugal_snn/error.hpp"

namespace frugal_snn::config {

RunConfig RunConfig::from_preset(std::string_view name) {
  RunConfig cfg;
  cfg.network = network::NetworkConfig::from_preset(name);
  cfg.preset = std::string(name);
  cfg.coincidence_window_ms = eval::coincidence_window_ms(name);
  if (name == "vowel") {
    cfg.stp_enabled = true;
    cfg.stp.retain_threshold = 0.92;
    cfg.signal.lowpass_hz = 5.0;
  } else if (name == "neural") {
    cfg.stp_enabled = true;
    cfg.stp.retain_threshold = 1.0;
    cfg.stp.group_basis = stp::GroupBasis::trains;
  }
  return cfg;
}

void RunConfig::validate() const {
  network.validate();
  if (!(coincidence_window_ms > 0.0)) throw ConfigError("eval.coincidence_window_ms must be > 0");
  if (smoothing.n % 2 == 0) throw ConfigError("eval.kernel_n must be odd");
  if (!(smoothing.sigma > 0.0)) throw ConfigError("eval.kernel_sigma must be > 0");
  if (encoder.fields == 0) throw ConfigError("encoder.fields must be >= 1");
  if (!(stp.tau_ms > 0.0)) throw ConfigError("stp.tau_ms must be > 0");
  if (!(stp.f_d > 0.0 && stp.f_d < 1.0)) throw ConfigError("stp.f_d must lie in (0, 1)");
  if (!(stp.group_fraction >= 0.0 && stp.group_fraction <= 1.0))
    throw ConfigError("stp.group_fraction must lie in [0, 1]");
  if (stp.block_size == 0) throw ConfigError("stp.block_size must be >= 1");
  if (signal.lowpass_hz < 0.0) throw ConfigError("signal.lowpass_hz must be >= 0");
  if (signal.lowpass_order == 0) throw ConfigError("signal.lowpass_order must be >= 1");
}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
};

[[noreturn]] void bad(const std::string& path, const std::string& value, const char* expected) {
  throw ConfigError(path + ": expected " + expected + ", got '" + value + "'");
}

double parse_real(const std::string& path, const std::string& v) {
  const auto d = detail::to_double(v);
  if (!d) bad(path, v, "a finite real");
  return *d;
}

std::uint64_t parse_count(const std::string& path, const std::string& v) {
  const auto u = detail::to_uint(v);
  if (!u) bad(path, v, "a non-negative integer");
  return *u;
}

bool parse_bool(const std::string& path, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(path, v, "true or false");
}

std::string show(bool b) { return b ? "true" : "false"; }
std::string show(double d) { return detail::format_double(d); }
std::string show(std::uint64_t u) { return std::to_string(u); }

struct Table {
  std::vector<Field> fields;

  template <class Member>
  void real(const char* s, const char* k, Member m) {
    const std::string path = std::string(s) + "." + k;
    fields.push_back({s, k, [=](RunConfig& c, const std::string& v) { m(c) = parse_real(path, v); },
                      [=](const RunConfig& c) { return show(m(const_cast<RunConfig&>(c))); }});
  }
  template <class Member>
  void count(const char* s, const char* k, Member m) {
    const std::string path = std::string(s) + "." + k;
    fields.push_back(
        {s, k,
         [=](RunConfig& c, const std::string& v) {
           m(c) = static_cast<std::remove_reference_t<decltype(m(c))>>(parse_count(path, v));
         },
         [=](const RunConfig& c) {
           return show(static_cast<std::uint64_t>(m(const_cast<RunConfig&>(c))));
         }});
  }
  template <class Member>
  void flag(const char* s, const char* k, Member m) {
    const std::string path = std::string(s) + "." + k;
    fields.push_back({s, k, [=](RunConfig& c, const std::string& v) { m(c) = parse_bool(path, v); },
                      [=](const RunConfig& c) { return show(m(const_cast<RunConfig&>(c))); }});
  }
  void add(const char* s, const char* k, Setter set, Getter get) {
    fields.push_back({s, k, std::move(set), std::move(get)});
  }
};

// Single source of truth for the file grammar: parse and render both walk it.
const Table& table() {
  static const Table t = [] {
    Table t;
    t.count("run", "seed", [](RunConfig& c) -> auto& { return c.network.rng_seed; });
    t.count("run", "epochs", [](RunConfig& c) -> auto& { return c.network.epochs; });
    t.count("run", "neurons", [](RunConfig& c) -> auto& { return c.network.n_neurons; });

    t.add("input", "kind",
          [](RunConfig& c, const std::string& v) {
            if (v == "raster") c.input.kind = InputKind::raster;
            else if (v == "signal") c.input.kind = InputKind::signal;
            else bad("input.kind", v, "raster or signal");
          },
          [](const RunConfig& c) {
            return std::string(c.input.kind == InputKind::raster ? "raster" : "signal");
          });
    t.add("input", "path",
          [](RunConfig& c, const std::string& v) { c.input.path = v; },
          [](const RunConfig& c) { return c.input.path.generic_string(); });
    t.add("input", "truth",
          [](RunConfig& c, const std::string& v) { c.input.truth = v; },
          [](const RunConfig& c) { return c.input.truth.generic_string(); });
    t.add("input", "sample_period_ms",
          [](RunConfig& c, const std::string& v) {
            if (v.empty()) c.input.sample_period_ms.reset();
            else c.input.sample_period_ms = parse_real("input.sample_period_ms", v);
          },
          [](const RunConfig& c) {
            return c.input.sample_period_ms ? show(*c.input.sample_period_ms) : std::string();
          });
    t.count("input", "lead_steps", [](RunConfig& c) -> auto& { return c.input.lead_steps; });
    t.count("input", "epoch_steps", [](RunConfig& c) -> auto& { return c.input.epoch_steps; });

    t.flag("signal", "envelope", [](RunConfig& c) -> auto& { return c.signal.envelope; });
    t.real("signal", "envelope_sd_mult", [](RunConfig& c) -> auto& { return c.signal.envelope_params.sd_mult; });
    t.count("signal", "envelope_bin", [](RunConfig& c) -> auto& { return c.signal.envelope_params.bin; });
    t.count("signal", "envelope_kernel_n", [](RunConfig& c) -> auto& { return c.signal.envelope_params.kernel_n; });
    t.real("signal", "envelope_kernel_sigma", [](RunConfig& c) -> auto& { return c.signal.envelope_params.kernel_sigma; });
    t.real("signal", "lowpass_hz", [](RunConfig& c) -> auto& { return c.signal.lowpass_hz; });
    t.count("signal", "lowpass_order", [](RunConfig& c) -> auto& { return c.signal.lowpass_order; });
    t.flag("signal", "normalize", [](RunConfig& c) -> auto& { return c.signal.normalize; });
    t.add("signal", "normalize_mode",
          [](RunConfig& c, const std::string& v) {
            if (v == "per_channel") c.signal.normalize_mode = signals::NormalizeMode::per_channel;
            else if (v == "global") c.signal.normalize_mode = signals::NormalizeMode::global;
            else bad("signal.normalize_mode", v, "per_channel or global");
          },
          [](const RunConfig& c) {
            return std::string(c.signal.normalize_mode == signals::NormalizeMode::global
                                   ? "global" : "per_channel");
          });

    t.count("encoder", "fields", [](RunConfig& c) -> auto& { return c.encoder.fields; });
    t.count("encoder", "halo", [](RunConfig& c) -> auto& { return c.encoder.halo; });

    t.flag("stp", "enabled", [](RunConfig& c) -> auto& { return c.stp_enabled; });
    t.real("stp", "tau_ms", [](RunConfig& c) -> auto& { return c.stp.tau_ms; });
    t.real("stp", "f_d", [](RunConfig& c) -> auto& { return c.stp.f_d; });
    t.real("stp", "stop_level", [](RunConfig& c) -> auto& { return c.stp.stop_level; });
    t.real("stp", "retain_threshold", [](RunConfig& c) -> auto& { return c.stp.retain_threshold; });
    t.real("stp", "group_fraction", [](RunConfig& c) -> auto& { return c.stp.group_fraction; });
    t.count("stp", "block_size", [](RunConfig& c) -> auto& { return c.stp.block_size; });
    t.add("stp", "group_basis",
          [](RunConfig& c, const std::string& v) {
            if (v == "spikes") c.stp.group_basis = stp::GroupBasis::spikes;
            else if (v == "trains") c.stp.group_basis = stp::GroupBasis::trains;
            else bad("stp.group_basis", v, "spikes or trains");
          },
          [](const RunConfig& c) {
            return std::string(c.stp.group_basis == stp::GroupBasis::trains ? "trains" : "spikes");
          });

    t.real("lts", "tau_m_ms", [](RunConfig& c) -> auto& { return c.network.lts.tau_m_ms; });
    t.real("lts", "epsilon", [](RunConfig& c) -> auto& { return c.network.lts.epsilon; });
    t.real("lts", "alpha_n", [](RunConfig& c) -> auto& { return c.network.lts.alpha_n; });
    t.real("lts", "alpha_p", [](RunConfig& c) -> auto& { return c.network.lts.alpha_p; });
    t.real("lts", "g", [](RunConfig& c) -> auto& { return c.network.lts.g; });

    t.real("stdp", "w_ltp", [](RunConfig& c) -> auto& { return c.network.stdp.w_ltp; });
    t.real("stdp", "w_ltd", [](RunConfig& c) -> auto& { return c.network.stdp.w_ltd; });
    t.real("stdp", "w_lateral_potentiation", [](RunConfig& c) -> auto& { return c.network.stdp.w_lateral_potentiation; });
    t.real("stdp", "w_lateral_inhibition", [](RunConfig& c) -> auto& { return c.network.stdp.w_lateral_inhibition; });
    t.real("stdp", "t_stdp_ms", [](RunConfig& c) -> auto& { return c.network.stdp.t_stdp_ms; });

    t.real("ip", "f_th_post", [](RunConfig& c) -> auto& { return c.network.ip.f_th_post; });
    t.real("ip", "dth_pair", [](RunConfig& c) -> auto& { return c.network.ip.dth_pair; });
    t.real("ip", "th_min", [](RunConfig& c) -> auto& { return c.network.ip.th_min; });
    t.real("ip", "th_max", [](RunConfig& c) -> auto& { return c.network.ip.th_max; });

    t.real("network", "gap_tau_multiple", [](RunConfig& c) -> auto& { return c.network.gap_tau_multiple; });

    t.real("eval", "coincidence_window_ms", [](RunConfig& c) -> auto& { return c.coincidence_window_ms; });
    t.count("eval", "kernel_n", [](RunConfig& c) -> auto& { return c.smoothing.n; });
    t.real("eval", "kernel_sigma", [](RunConfig& c) -> auto& { return c.smoothing.sigma; });

    t.add("output", "dir",
          [](RunConfig& c, const std::string& v) { c.output.dir = v; },
          [](const RunConfig& c) { return c.output.dir.generic_string(); });
    t.flag("output", "weights_per_epoch", [](RunConfig& c) -> auto& { return c.output.weights_per_epoch; });
    t.flag("output", "threshold_trace", [](RunConfig& c) -> auto& { return c.output.threshold_trace; });
    return t;
  }();
  return t;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       std::optional<std::string> preset_override) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  std::string preset = "artificial";
  if (auto p = tree.get_optional<std::string>("run.preset")) preset = *p;
  if (preset_override) preset = *preset_override;
  RunConfig cfg = RunConfig::from_preset(preset);

  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty())
      throw ConfigError("config: key '" + section + "' must sit inside a [section]");
    for (const auto& [key, node] : keys) {
      if (section == "run" && key == "preset") continue;
      const auto& fields = table().fields;
      auto it = std::find_if(fields.begin(), fields.end(),
                             [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == fields.end()) throw ConfigError("unknown config key '" + section + "." + key + "'");
      it->set(cfg, std::string(detail::trim(node.data())));
    }
  }
  cfg.input.path = resolve(cfg.input.path, base_dir);
  cfg.input.truth = resolve(cfg.input.truth, base_dir);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::string> preset_override) {
  if (!std::filesystem::exists(path)) throw ConfigError(path.string() + ": config file not found");
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path(), std::move(preset_override));
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  out << "[run]\npreset = " << cfg.preset << '\n';
  section = "run";
  for (const auto& f : table().fields) {
    if (f.section != section) {
      out << "\n[" << f.section << "]\n";
      section = f.section;
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace frugal_snn::config
