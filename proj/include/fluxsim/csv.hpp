#ifndef FLUXSIM_CSV_HPP
#define FLUXSIM_CSV_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fluxsim/coupled.hpp"
#include "fluxsim/errors.hpp"
#include "fluxsim/fluxonium.hpp"
#include "fluxsim/lindblad.hpp"

namespace fluxsim {

// All CSV output: 9 significant digits, '.' decimal separator, \n endings.
inline std::string format_g9(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

struct SpectrumRow {
  double flux = 0.0;
  int state_index = 0;
  double energy_ghz = 0.0;
  StateLabel label;
};

inline std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
  std::string out = "flux,state_index,energy_GHz,well,plasmon,confidence\n";
  for (const auto& r : rows) {
    out += format_g9(r.flux);
    out += ',';
    out += std::to_string(r.state_index);
    out += ',';
    out += format_g9(r.energy_ghz);
    out += ',';
    out += std::to_string(r.label.well);
    out += ',';
    out += std::to_string(r.label.plasmon);
    out += ',';
    out += format_g9(r.label.confidence);
    out += '\n';
  }
  return out;
}

inline std::string catalog_csv(const std::vector<TransitionCatalog>& catalogs) {
  std::string out = "flux,frequency_GHz,weight,order,initial_label,final_label\n";
  for (const auto& cat : catalogs)
    for (const auto& r : cat.records) {
      out += format_g9(cat.flux);
      out += ',';
      out += format_g9(r.frequency_ghz);
      out += ',';
      out += format_g9(r.weight);
      out += ',';
      out += std::to_string(r.photon_order);
      out += ',';
      out += r.initial_label;
      out += ',';
      out += r.final_label;
      out += '\n';
    }
  return out;
}

inline std::string map_csv(const TransmissionMap& map) {
  std::string out = "flux,freq_GHz,amplitude\n";
  for (size_t i = 0; i < map.flux.size(); ++i)
    for (size_t j = 0; j < map.freq_ghz.size(); ++j) {
      out += format_g9(map.flux[i]);
      out += ',';
      out += format_g9(map.freq_ghz[j]);
      out += ',';
      out += format_g9(map.amplitude(static_cast<int>(i), static_cast<int>(j)));
      out += '\n';
    }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("write failed: " + path);
}

}  // namespace fluxsim

#endif
