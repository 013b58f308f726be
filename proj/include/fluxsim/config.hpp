#ifndef FLUXSIM_CONFIG_HPP
#define FLUXSIM_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxsim/circuit.hpp"
#include "fluxsim/coupled.hpp"
#include "fluxsim/errors.hpp"
#include "fluxsim/lindblad.hpp"

namespace fluxsim {

struct SweepConfig {
  double flux_min = 0.0;
  double flux_max = 0.5;
  int flux_steps = 101;
  double freq_min_ghz = 4.80;
  double freq_max_ghz = 5.15;
  int freq_steps = 61;

  std::vector<double> flux_grid() const {
    std::vector<double> g(flux_steps);
    for (int i = 0; i < flux_steps; ++i)
      g[i] = flux_steps == 1
                 ? flux_min
                 : flux_min + (flux_max - flux_min) * i / (flux_steps - 1);
    return g;
  }
  std::vector<double> freq_grid() const {
    std::vector<double> g(freq_steps);
    for (int i = 0; i < freq_steps; ++i)
      g[i] = freq_steps == 1
                 ? freq_min_ghz
                 : freq_min_ghz + (freq_max_ghz - freq_min_ghz) * i / (freq_steps - 1);
    return g;
  }
};

struct ModelConfig {
  int n_basis = 120;
  int n_flux_levels = 9;
  int n_photons = 5;
  int max_dressed_states = 20;
  ZeroPointScale scale = ZeroPointScale::inductive;
};

struct LinesConfig {
  std::vector<std::string> initial_states{"g0@0", "g0@1", "e0@0"};
  int max_photon_order = 2;
};

struct AnalyticsConfig {
  double phi_ext = 0.078;
  double phi_zpf = 0.0;          // 0: use the local well scale
  double e_p_ghz = 0.0;          // 0: compute from the device spectrum
  double e_p_prime_ghz = 0.0;    // 0: compute from the device spectrum
  double raman_omega_probe_ghz = 0.035;
  double raman_omega_pump_ghz = 0.035;
  double raman_delta_ghz = 0.030;
  double raman_delta_2gamma_ghz = 0.30;
};

struct OutputConfig {
  std::string directory = ".";
  bool csv = true;
  bool heatmap = false;
  int parallelism = 1;
};

struct RunConfig {
  std::optional<FourNodeCircuit> circuit;
  FluxoniumParams fluxonium;  // resolved (either direct or from the circuit)
  double nu_r_ghz = 0.0;
  double g_ghz = 0.0;
  SweepConfig sweep;
  LindbladConfig lindblad;
  ModelConfig model;
  LinesConfig lines;
  AnalyticsConfig analytics;
  OutputConfig output;
  nlohmann::json physics_json;  // canonical subset that keys the cache

  CoupledModel coupled_model() const {
    CoupledModel m;
    m.fluxonium = fluxonium;
    m.nu_r_ghz = nu_r_ghz;
    m.g_ghz = g_ghz;
    m.n_flux_levels = model.n_flux_levels;
    m.n_photons = model.n_photons;
    m.basis.n_basis = model.n_basis;
    m.basis.scale = model.scale;
    return m;
  }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& path,
                             const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("config: missing required key " + path + "." + key);
  if (!j[key].is_number())
    throw ConfigError("config: " + path + "." + key + " must be a number");
  return j[key].get<double>();
}

inline double number_or(const nlohmann::json& j, const std::string& path,
                        const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError("config: " + path + "." + key + " must be a number");
  return j[key].get<double>();
}

inline int int_or(const nlohmann::json& j, const std::string& path,
                  const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw ConfigError("config: " + path + "." + key + " must be an integer");
  return j[key].get<int>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  const bool has_circuit = j.contains("circuit");
  const bool has_direct = j.contains("direct_energies");
  if (has_circuit == has_direct)
    throw ConfigError(
        "config: exactly one of 'circuit' and 'direct_energies' must be present");

  using detail::int_or;
  using detail::number_or;
  using detail::require_number;

  if (has_circuit) {
    const auto& c = j["circuit"];
    FourNodeCircuit fc;
    fc.c_r_ff = require_number(c, "circuit", "c_r_ff");
    fc.c_c_ff = require_number(c, "circuit", "c_c_ff");
    fc.c_1_ff = require_number(c, "circuit", "c_1_ff");
    fc.c_2_ff = require_number(c, "circuit", "c_2_ff");
    fc.e_lr_ghz = require_number(c, "circuit", "e_lr_ghz");
    fc.e_l_chain_ghz = require_number(c, "circuit", "e_l_chain_ghz");
    fc.e_j_ghz = require_number(c, "circuit", "e_j_ghz");
    if (c.contains("chain")) {
      const auto& ch = c["chain"];
      JunctionChain jc;
      jc.n_junctions = int_or(ch, "circuit.chain", "n_junctions", 0);
      jc.l_j_single_nh = number_or(ch, "circuit.chain", "l_j_single_nh", 0.0);
      jc.c_g_single_ff = number_or(ch, "circuit.chain", "c_g_single_ff", 0.0);
      fc.chain = jc;
    }
    try {
      fc.validate();
      const auto derived = derive_energies(reduce_circuit(fc));
      cfg.fluxonium.e_c_ghz = derived.e_c_ghz;
      cfg.fluxonium.e_j_ghz = derived.e_j_ghz;
      cfg.fluxonium.e_l_ghz = derived.e_l_ghz;
      cfg.nu_r_ghz = derived.nu_r_ghz;
    } catch (const Error& e) {
      throw ConfigError(std::string("config: circuit: ") + e.what());
    }
    cfg.g_ghz = number_or(c, "circuit", "g_ghz", 0.0);
    cfg.circuit = fc;
  } else {
    const auto& d = j["direct_energies"];
    cfg.fluxonium.e_c_ghz = require_number(d, "direct_energies", "e_c_ghz");
    cfg.fluxonium.e_j_ghz = require_number(d, "direct_energies", "e_j_ghz");
    cfg.fluxonium.e_l_ghz = require_number(d, "direct_energies", "e_l_ghz");
    cfg.nu_r_ghz = require_number(d, "direct_energies", "nu_r_ghz");
    cfg.g_ghz = number_or(d, "direct_energies", "g_ghz", 0.0);
    try {
      cfg.fluxonium.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("config: direct_energies: ") + e.what());
    }
  }
  if (cfg.nu_r_ghz <= 0)
    throw ConfigError("config: resonator frequency must be > 0");
  if (cfg.g_ghz < 0) throw ConfigError("config: g_ghz must be >= 0");

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    cfg.sweep.flux_min = number_or(s, "sweep", "flux_min", cfg.sweep.flux_min);
    cfg.sweep.flux_max = number_or(s, "sweep", "flux_max", cfg.sweep.flux_max);
    cfg.sweep.flux_steps = int_or(s, "sweep", "flux_steps", cfg.sweep.flux_steps);
    cfg.sweep.freq_min_ghz =
        number_or(s, "sweep", "freq_min_ghz", cfg.sweep.freq_min_ghz);
    cfg.sweep.freq_max_ghz =
        number_or(s, "sweep", "freq_max_ghz", cfg.sweep.freq_max_ghz);
    cfg.sweep.freq_steps = int_or(s, "sweep", "freq_steps", cfg.sweep.freq_steps);
    if (cfg.sweep.flux_steps < 1)
      throw ConfigError("config: sweep.flux_steps must be >= 1");
    if (cfg.sweep.freq_steps < 1)
      throw ConfigError("config: sweep.freq_steps must be >= 1");
  }

  if (j.contains("lindblad")) {
    const auto& l = j["lindblad"];
    cfg.lindblad.temperature_k =
        number_or(l, "lindblad", "temperature_k", 0.030);
    cfg.lindblad.kappa_ghz = number_or(l, "lindblad", "kappa_ghz", 0.04);
    cfg.lindblad.gamma_q_ghz = number_or(l, "lindblad", "gamma_q_ghz", 0.0005);
    cfg.lindblad.zeta_ghz = number_or(l, "lindblad", "zeta_ghz", 1e-4);
    cfg.lindblad.omega_d_ghz =
        number_or(l, "lindblad", "omega_d_ghz", cfg.nu_r_ghz);
  } else {
    cfg.lindblad = {0.030, 0.04, 0.0005, 1e-4, cfg.nu_r_ghz};
  }
  try {
    cfg.lindblad.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: lindblad: ") + e.what());
  }

  if (j.contains("model")) {
    const auto& m = j["model"];
    cfg.model.n_basis = int_or(m, "model", "n_basis", cfg.model.n_basis);
    cfg.model.n_flux_levels =
        int_or(m, "model", "n_flux_levels", cfg.model.n_flux_levels);
    cfg.model.n_photons = int_or(m, "model", "n_photons", cfg.model.n_photons);
    cfg.model.max_dressed_states =
        int_or(m, "model", "max_dressed_states", cfg.model.max_dressed_states);
    if (m.contains("zero_point_scale")) {
      const std::string s = m["zero_point_scale"].get<std::string>();
      if (s == "inductive") cfg.model.scale = ZeroPointScale::inductive;
      else if (s == "plasma") cfg.model.scale = ZeroPointScale::plasma;
      else throw ConfigError("config: model.zero_point_scale must be 'inductive' or 'plasma'");
    }
    if (cfg.model.n_basis < 10)
      throw ConfigError("config: model.n_basis must be >= 10");
    if (cfg.model.n_flux_levels < 3)
      throw ConfigError("config: model.n_flux_levels must be >= 3");
    if (cfg.model.n_photons < 2)
      throw ConfigError("config: model.n_photons must be >= 2");
  }

  if (j.contains("lines")) {
    const auto& l = j["lines"];
    if (l.contains("initial_states")) {
      if (!l["initial_states"].is_array())
        throw ConfigError("config: lines.initial_states must be an array");
      cfg.lines.initial_states =
          l["initial_states"].get<std::vector<std::string>>();
      for (const auto& s : cfg.lines.initial_states) {
        try {
          StateSelector::parse(s);
        } catch (const Error& e) {
          throw ConfigError(std::string("config: lines.initial_states: ") + e.what());
        }
      }
    }
    cfg.lines.max_photon_order =
        int_or(l, "lines", "max_photon_order", cfg.lines.max_photon_order);
    if (cfg.lines.max_photon_order < 1 || cfg.lines.max_photon_order > 2)
      throw ConfigError("config: lines.max_photon_order must be 1 or 2");
  }

  if (j.contains("analytics")) {
    const auto& a = j["analytics"];
    cfg.analytics.phi_ext = number_or(a, "analytics", "phi_ext", 0.078);
    cfg.analytics.phi_zpf = number_or(a, "analytics", "phi_zpf", 0.0);
    cfg.analytics.e_p_ghz = number_or(a, "analytics", "e_p_ghz", 0.0);
    cfg.analytics.e_p_prime_ghz =
        number_or(a, "analytics", "e_p_prime_ghz", 0.0);
    cfg.analytics.raman_omega_probe_ghz =
        number_or(a, "analytics", "raman_omega_probe_ghz", 0.035);
    cfg.analytics.raman_omega_pump_ghz =
        number_or(a, "analytics", "raman_omega_pump_ghz", 0.035);
    cfg.analytics.raman_delta_ghz =
        number_or(a, "analytics", "raman_delta_ghz", 0.030);
    cfg.analytics.raman_delta_2gamma_ghz =
        number_or(a, "analytics", "raman_delta_2gamma_ghz", 0.30);
  }

  if (j.contains("output")) {
    const auto& o = j["output"];
    if (o.contains("directory"))
      cfg.output.directory = o["directory"].get<std::string>();
    if (o.contains("formats")) {
      cfg.output.csv = false;
      cfg.output.heatmap = false;
      for (const auto& f : o["formats"]) {
        const std::string s = f.get<std::string>();
        if (s == "csv") cfg.output.csv = true;
        else if (s == "heatmap") cfg.output.heatmap = true;
        else throw ConfigError("config: output.formats: unknown format '" + s + "'");
      }
    }
    cfg.output.parallelism = int_or(o, "output", "parallelism", 1);
    if (cfg.output.parallelism < 1)
      throw ConfigError("config: output.parallelism must be >= 1");
  }

  // Cache key: physics-relevant subset only (output paths excluded).
  nlohmann::json phys;
  for (const char* key : {"circuit", "direct_energies", "sweep", "lindblad",
                          "model", "lines", "analytics"})
    if (j.contains(key)) phys[key] = j[key];
  cfg.physics_json = phys;
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open file " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: JSON parse error in " + path.string() + ": " +
                      e.what());
  }
  return parse_config(j);
}

}  // namespace fluxsim

#endif
