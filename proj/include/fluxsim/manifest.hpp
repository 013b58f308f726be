#ifndef FLUXSIM_MANIFEST_HPP
#define FLUXSIM_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxsim/csv.hpp"
#include "fluxsim/version.hpp"

namespace fluxsim {

inline std::uint64_t fnv1a64(const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct RunManifest {
  std::string tool_version = fluxsim::version;
  std::string config_hash;
  std::string subcommand;
  std::map<std::string, std::string> output_checksums;  // file -> fnv64 hex
  std::map<std::string, double> timings_ms;
  std::vector<std::string> failed_cells;
  long cache_hits = 0;
  long cache_misses = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    j["subcommand"] = subcommand;
    j["output_checksums"] = output_checksums;
    j["timings_ms"] = timings_ms;
    j["failed_cells"] = failed_cells;
    j["cache"] = {{"hits", cache_hits}, {"misses", cache_misses}};
    return j;
  }

  void write(const std::string& path) const {
    write_file(path, to_json().dump(2) + "\n");
  }
};

}  // namespace fluxsim

#endif
