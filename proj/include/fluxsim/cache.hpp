#ifndef FLUXSIM_CACHE_HPP
#define FLUXSIM_CACHE_HPP

#include <atomic>
#include <memory>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace fluxsim {

// Per-cell result cache.  One binary file per (config hash, kind, cell index);
// values are raw doubles so a cache hit reproduces fresh output bit-exactly.
class CellCache {
 public:
  CellCache() = default;
  CellCache(std::filesystem::path dir, std::string config_hash, bool enabled)
      : dir_(std::move(dir)), hash_(std::move(config_hash)), enabled_(enabled) {
    if (enabled_) std::filesystem::create_directories(dir_ / hash_);
  }

  bool enabled() const { return enabled_; }
  long hits() const { return counters_->hits.load(); }
  long misses() const { return counters_->misses.load(); }

  std::optional<std::vector<double>> load(const std::string& kind,
                                          int index) const {
    if (!enabled_) return std::nullopt;
    std::ifstream f(path(kind, index), std::ios::binary);
    if (!f) {
      ++counters_->misses;
      return std::nullopt;
    }
    std::uint64_t magic = 0, count = 0;
    f.read(reinterpret_cast<char*>(&magic), sizeof magic);
    f.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!f || magic != kMagic || count > (1u << 26)) {
      ++counters_->misses;
      return std::nullopt;
    }
    std::vector<double> values(count);
    f.read(reinterpret_cast<char*>(values.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
    if (!f) {
      ++counters_->misses;
      return std::nullopt;
    }
    ++counters_->hits;
    return values;
  }

  void store(const std::string& kind, int index,
             const std::vector<double>& values) const {
    if (!enabled_) return;
    const auto target = path(kind, index);
    const auto tmp = target.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) return;
      const std::uint64_t magic = kMagic, count = values.size();
      f.write(reinterpret_cast<const char*>(&magic), sizeof magic);
      f.write(reinterpret_cast<const char*>(&count), sizeof count);
      f.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
      if (!f) return;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
  }

 private:
  static constexpr std::uint64_t kMagic = 0x66735f63656c6c31ull;  // "fs_cell1"

  std::filesystem::path path(const std::string& kind, int index) const {
    return dir_ / hash_ / (kind + "_" + std::to_string(index) + ".bin");
  }

  struct Counters {
    std::atomic<long> hits{0};
    std::atomic<long> misses{0};
  };

  std::filesystem::path dir_;
  std::string hash_;
  bool enabled_ = false;
  std::shared_ptr<Counters> counters_ = std::make_shared<Counters>();
};

}  // namespace fluxsim

#endif
