#include "eemimo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "eemimo/errors.hpp"

namespace eemimo {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& value, const std::string& key, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + value + "'", line);
  }
  return v;
}

long long to_integer(const std::string& value, const std::string& key, int line) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'", line);
  }
  return v;
}

int to_int(const std::string& value, const std::string& key, int line) {
  const long long v = to_integer(value, key, line);
  if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw ConfigError(key + ": integer out of range", line);
  return static_cast<int>(v);
}

bool to_bool(const std::string& value, const std::string& key, int line) {
  const std::string v = lower(value);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'", line);
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, int)>;

struct Parser {
  std::string base_dir;
  std::optional<int> m_min, m_max, k_min, k_max;
  std::string model = "annulus";
  std::optional<std::string> pdf_csv;
  int pdf_line = 0;
  AnnulusUniform annulus;
  std::optional<double> pilot_ratio;
  std::optional<double> rzf_regularization;
  std::optional<std::vector<mc::PrecoderSpec>> schemes;

  std::map<std::string, Setter> table() {
    std::map<std::string, Setter> t;
    auto hw = [&t](const std::string& key, double HardwareProfile::*field, double scale) {
      t["hardware." + key] = [=](ScenarioConfig& c, const std::string& v, int line) {
        c.hardware.*field = to_double(v, key, line) * scale;
      };
    };
    hw("p0_w", &HardwareProfile::p_fixed_w, 1.0);
    hw("p_syn_w", &HardwareProfile::p_synthesizer_w, 1.0);
    hw("p_cod_w", &HardwareProfile::p_coding_w, 1.0);
    hw("p_dec_w", &HardwareProfile::p_decoding_w, 1.0);
    hw("p_tx_w", &HardwareProfile::p_tx_chain_w, 1.0);
    hw("p_rx_w", &HardwareProfile::p_rx_chain_w, 1.0);
    hw("ops_per_joule", &HardwareProfile::ops_per_joule, 1.0);
    hw("coherence_bandwidth_khz", &HardwareProfile::coherence_bandwidth_hz, 1e3);
    hw("coherence_time_ms", &HardwareProfile::coherence_time_s, 1e-3);
    hw("eta", &HardwareProfile::amplifier_efficiency, 1.0);
    t["hardware.symbol_rate_mhz"] = [](ScenarioConfig& c, const std::string& v, int line) {
      const double rate = to_double(v, "symbol_rate_mhz", line);
      if (!(rate > 0.0)) throw ConfigError("symbol_rate_mhz must be > 0", line);
      c.hardware.symbol_time_s = 1.0 / (rate * 1e6);
    };

    t["propagation.model"] = [this](ScenarioConfig&, const std::string& v, int line) {
      model = lower(v);
      if (model != "annulus" && model != "empirical") {
        throw ConfigError("model must be 'annulus' or 'empirical', got '" + v + "'", line);
      }
    };
    t["propagation.attenuation_log10"] = [this](ScenarioConfig&, const std::string& v, int line) {
      annulus.attenuation = std::pow(10.0, to_double(v, "attenuation_log10", line));
    };
    t["propagation.pathloss_exponent"] = [this](ScenarioConfig&, const std::string& v, int line) {
      annulus.pathloss_exponent = to_double(v, "pathloss_exponent", line);
    };
    t["propagation.d_min_m"] = [this](ScenarioConfig&, const std::string& v, int line) {
      annulus.d_min_m = to_double(v, "d_min_m", line);
    };
    t["propagation.d_max_m"] = [this](ScenarioConfig&, const std::string& v, int line) {
      annulus.d_max_m = to_double(v, "d_max_m", line);
    };
    t["propagation.pdf_csv"] = [this](ScenarioConfig&, const std::string& v, int line) {
      pdf_csv = v;
      pdf_line = line;
    };

    t["system.noise_variance"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.propagation.noise_variance = to_double(v, "noise_variance", line);
    };
    t["system.coherence_block"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.coherence_block = to_int(v, "coherence_block", line);
    };

    auto int_slot = [&t](const std::string& key, std::optional<int>& slot) {
      t["search." + key] = [&slot, key](ScenarioConfig&, const std::string& v, int line) {
        slot = to_int(v, key, line);
      };
    };
    int_slot("m_min", m_min);
    int_slot("m_max", m_max);
    int_slot("k_min", k_min);
    int_slot("k_max", k_max);
    t["search.rho_cap"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.rho_cap = to_double(v, "rho_cap", line);
    };
    t["search.init_m"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.alternating_init.antennas = to_int(v, "init_m", line);
    };
    t["search.init_k"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.alternating_init.users = to_int(v, "init_k", line);
    };
    t["search.init_rho"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.alternating_init.rho = to_double(v, "init_rho", line);
    };
    t["search.max_iter"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.max_iter = to_int(v, "max_iter", line);
    };

    t["mc.trials"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.mc.run.trials = to_int(v, "trials", line);
    };
    t["mc.seed"] = [](ScenarioConfig& c, const std::string& v, int line) {
      errno = 0;
      char* end = nullptr;
      const unsigned long long seed = std::strtoull(v.c_str(), &end, 10);
      if (v.empty() || *end != '\0' || errno == ERANGE || v.front() == '-') {
        throw ConfigError("seed: expected an unsigned 64-bit integer, got '" + v + "'", line);
      }
      c.mc.run.seed = seed;
    };
    t["mc.resample_users"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.mc.run.resample_users = to_bool(v, "resample_users", line);
    };
    t["mc.schemes"] = [this](ScenarioConfig&, const std::string& v, int line) {
      std::vector<mc::PrecoderSpec> list;
      try {
        for (const std::string& token : split_list(v)) list.push_back(parse_precoder(token));
      } catch (const ValidationError& e) {
        throw ConfigError(e.what(), line);
      }
      if (list.empty()) throw ConfigError("schemes must name at least one scheme", line);
      schemes = list;
    };
    t["mc.pilot_energy_ratio"] = [this](ScenarioConfig&, const std::string& v, int line) {
      pilot_ratio = to_double(v, "pilot_energy_ratio", line);
    };
    t["mc.rzf_regularization"] = [this](ScenarioConfig&, const std::string& v, int line) {
      rzf_regularization = to_double(v, "rzf_regularization", line);
    };
    t["mc.antennas"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.mc.antennas.clear();
      for (const std::string& token : split_list(v)) c.mc.antennas.push_back(to_int(token, "antennas", line));
      if (c.mc.antennas.empty()) throw ConfigError("antennas must list at least one value", line);
    };
    t["mc.rho_log10_min"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.mc.rho_log10_min = to_double(v, "rho_log10_min", line);
    };
    t["mc.rho_log10_max"] = [](ScenarioConfig& c, const std::string& v, int line) {
      c.mc.rho_log10_max = to_double(v, "rho_log10_max", line);
    };
    return t;
  }

  void finish(ScenarioConfig& c) {
    if (model == "annulus") {
      if (pdf_csv) throw ConfigError("pdf_csv is only valid with model = empirical", pdf_line);
      c.propagation.distribution = annulus;
    } else {
      if (!pdf_csv) throw ConfigError("model = empirical needs pdf_csv");
      std::filesystem::path path(*pdf_csv);
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      try {
        c.propagation.distribution = read_empirical_pdf(path.string());
      } catch (const Error& e) {
        throw ConfigError(std::string("pdf_csv: ") + e.what(), pdf_line);
      }
    }
    if (m_min || m_max) c.antennas = IntRange{m_min.value_or(1), m_max.value_or(1000)};
    if (k_min || k_max) {
      IntRange users{k_min.value_or(1), 0};
      if (k_max) {
        users.hi = *k_max;
      } else {
        users.hi = std::min(c.coefficients().coherence_block - 1, 500);
      }
      c.users = users;
    }
    if (schemes) c.mc.schemes = *schemes;
    for (mc::PrecoderSpec& spec : c.mc.schemes) {
      if (pilot_ratio) spec.pilot_energy_ratio = *pilot_ratio;
      if (rzf_regularization) spec.rzf_regularization = rzf_regularization;
    }
  }
};

}  // namespace

mc::PrecoderSpec parse_precoder(const std::string& token) {
  const std::string t = lower(trim(token));
  const auto colon = t.find(':');
  const std::string scheme = t.substr(0, colon);
  const std::string csi = colon == std::string::npos ? "perfect" : t.substr(colon + 1);
  mc::PrecoderSpec spec;
  if (scheme == "zf") {
    spec.scheme = mc::Scheme::kZf;
  } else if (scheme == "rzf") {
    spec.scheme = mc::Scheme::kRzf;
  } else if (scheme == "mrt") {
    spec.scheme = mc::Scheme::kMrt;
  } else {
    throw ValidationError("unknown scheme '" + scheme + "' (expected zf, rzf or mrt)");
  }
  if (csi == "perfect") {
    spec.csi = mc::Csi::kPerfect;
  } else if (csi == "mmse") {
    spec.csi = mc::Csi::kMmseEstimated;
  } else {
    throw ValidationError("unknown CSI model '" + csi + "' (expected perfect or mmse)");
  }
  return spec;
}

std::string precoder_name(const mc::PrecoderSpec& spec) {
  return mc::to_string(spec.scheme) + ":" + mc::to_string(spec.csi);
}

PowerCoefficients ScenarioConfig::coefficients() const {
  return coherence_block ? coefficients_from_hardware(hardware, *coherence_block)
                         : coefficients_from_hardware(hardware);
}

double ScenarioConfig::a_lambda() const { return eemimo::a_lambda(propagation); }

SearchSpace ScenarioConfig::search_space() const {
  SearchSpace space = default_search_space(coefficients());
  if (antennas) space.antennas = *antennas;
  if (users) space.users = *users;
  space.rho_cap = rho_cap;
  return space;
}

void ScenarioConfig::validate() const {
  try {
    hardware.validate();
    propagation.validate();
    const PowerCoefficients coeffs = coefficients();
    search_space().validate(coeffs);
    mc.run.validate();
    if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
    if (alternating_init.users < 1 || alternating_init.users >= coeffs.coherence_block) {
      throw ValidationError("init_k must be in [1, T)");
    }
    if (alternating_init.antennas <= alternating_init.users) throw ValidationError("init_m must be > init_k");
    if (!(alternating_init.rho > 0.0)) throw ValidationError("init_rho must be > 0");
    for (int m : mc.antennas) {
      if (m < 1) throw ValidationError("mc antennas must be >= 1");
    }
    if (!(mc.rho_log10_min < mc.rho_log10_max)) throw ValidationError("rho_log10_min must be < rho_log10_max");
    for (const mc::PrecoderSpec& spec : mc.schemes) {
      if (!(spec.pilot_energy_ratio > 0.0)) throw ValidationError("pilot_energy_ratio must be > 0");
      if (spec.rzf_regularization && !(*spec.rzf_regularization >= 0.0)) {
        throw ValidationError("rzf_regularization must be >= 0");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  for (const char* token : {"zf", "rzf", "mrt", "zf:mmse"}) c.mc.schemes.push_back(parse_precoder(token));
  return c;
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  ScenarioConfig config = default_config();
  Parser parser;
  parser.base_dir = base_dir;
  const auto setters = parser.table();
  const std::set<std::string> sections{"hardware", "propagation", "system", "search", "mc"};

  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    for (const char marker : {'#', ';'}) {
      const auto pos = s.find(marker);
      if (pos != std::string::npos) s.erase(pos);
    }
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + s + "'", line);
    if (section.empty()) throw ConfigError("key outside of any section", line);
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string value = trim(s.substr(eq + 1));
    const std::string full = section + "." + key;
    const auto it = setters.find(full);
    if (it == setters.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    if (!seen.insert(full).second) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line);
    it->second(config, value, line);
  }
  try {
    parser.finish(config);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  config.validate();
  return config;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config_text(buffer.str(), dir.empty() ? "." : dir);
}

}  // namespace eemimo
