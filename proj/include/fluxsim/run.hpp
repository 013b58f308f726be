#ifndef FLUXSIM_RUN_HPP
#define FLUXSIM_RUN_HPP

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fluxsim/analytics.hpp"
#include "fluxsim/cache.hpp"
#include "fluxsim/config.hpp"
#include "fluxsim/csv.hpp"
#include "fluxsim/heatmap.hpp"
#include "fluxsim/manifest.hpp"
#include "fluxsim/run_analytics_report.hpp"

namespace fluxsim {

struct RunOptions {
  std::string out_dir;    // overrides config output.directory when nonempty
  int jobs = 0;           // overrides output.parallelism when > 0
  bool use_cache = true;
  std::string cache_dir;  // default: FLUXSIM_CACHE_DIR, else <out>/.fluxsim-cache
};

struct RunResult {
  RunManifest manifest;
  std::vector<std::string> artifacts;
  int failed_cells = 0;
};

namespace detail {

struct RunContext {
  std::filesystem::path out;
  int jobs = 1;
  CellCache cache;
  RunManifest manifest;
  std::chrono::steady_clock::time_point t0;

  void start_timer() { t0 = std::chrono::steady_clock::now(); }
  void stop_timer(const std::string& name) {
    manifest.timings_ms[name] =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
  }
};

inline RunContext make_context(const std::string& subcommand,
                               const RunConfig& cfg, const RunOptions& opt) {
  RunContext ctx;
  ctx.out = opt.out_dir.empty() ? cfg.output.directory : opt.out_dir;
  std::filesystem::create_directories(ctx.out);
  ctx.jobs = opt.jobs > 0 ? opt.jobs : cfg.output.parallelism;
  const std::string hash = hex64(fnv1a64(cfg.physics_json.dump()));
  std::filesystem::path cache_dir;
  if (!opt.cache_dir.empty()) {
    cache_dir = opt.cache_dir;
  } else if (const char* env = std::getenv("FLUXSIM_CACHE_DIR");
             env && *env) {
    cache_dir = env;
  } else {
    cache_dir = ctx.out / ".fluxsim-cache";
  }
  ctx.cache = CellCache(cache_dir, hash, opt.use_cache);
  ctx.manifest.subcommand = subcommand;
  ctx.manifest.config_hash = hash;
  return ctx;
}

inline void emit(RunContext& ctx, RunResult& result, const std::string& name,
                 const std::string& content) {
  const auto path = (ctx.out / name).string();
  write_file(path, content);
  ctx.manifest.output_checksums[name] = hex64(fnv1a64(content));
  result.artifacts.push_back(path);
}

inline void finish(RunContext& ctx, RunResult& result) {
  ctx.manifest.cache_hits = ctx.cache.hits();
  ctx.manifest.cache_misses = ctx.cache.misses();
  result.failed_cells = static_cast<int>(ctx.manifest.failed_cells.size());
  ctx.manifest.write((ctx.out / "manifest.json").string());
  result.artifacts.push_back((ctx.out / "manifest.json").string());
  result.manifest = ctx.manifest;
}

}  // namespace detail

inline RunResult run_reduce(const RunConfig& cfg, const RunOptions& opt = {}) {
  auto ctx = detail::make_context("reduce", cfg, opt);
  RunResult result;
  if (!cfg.circuit)
    throw ConfigError("reduce: config must contain a 'circuit' section");
  ctx.start_timer();
  const ThreeNodeCircuit reduced = reduce_circuit(*cfg.circuit);
  const DerivedEnergies energies = derive_energies(reduced);
  const auto advisories = validate_chain(*cfg.circuit);
  ctx.stop_timer("reduce");

  nlohmann::json j;
  j["three_node"] = {{"c_r_eff_ff", reduced.c_r_eff_ff},
                     {"c_q_eff_ff", reduced.c_q_eff_ff},
                     {"c_c_eff_ff", reduced.c_c_eff_ff},
                     {"e_lr_ghz", reduced.e_lr_ghz},
                     {"e_l_chain_ghz", reduced.e_l_chain_ghz},
                     {"e_j_ghz", reduced.e_j_ghz}};
  j["energies"] = {{"e_c_ghz", energies.e_c_ghz},
                   {"e_l_ghz", energies.e_l_ghz},
                   {"e_j_ghz", energies.e_j_ghz},
                   {"nu_r_ghz", energies.nu_r_ghz}};
  j["advisories"] = nlohmann::json::array();
  for (const auto& a : advisories)
    j["advisories"].push_back({{"code", a.code}, {"message", a.message}});
  detail::emit(ctx, result, "reduce.json", j.dump(2) + "\n");
  detail::finish(ctx, result);
  return result;
}

inline RunResult run_spectrum(const RunConfig& cfg, const RunOptions& opt = {}) {
  auto ctx = detail::make_context("spectrum", cfg, opt);
  RunResult result;
  const auto flux = cfg.sweep.flux_grid();
  const int nflux = static_cast<int>(flux.size());
  const int k = cfg.model.n_flux_levels;
  BasisConfig basis{cfg.model.n_basis, cfg.model.scale};

  std::vector<std::vector<SpectrumRow>> rows(nflux);
  std::vector<std::string> errors(nflux);
  ctx.start_timer();
  parallel_for_indexed(nflux, ctx.jobs, [&](int i) {
    if (auto cached = ctx.cache.load("spectrum", i);
        cached && static_cast<int>(cached->size()) == 4 * k) {
      for (int s = 0; s < k; ++s) {
        SpectrumRow r;
        r.flux = flux[i];
        r.state_index = s;
        r.energy_ghz = (*cached)[s];
        r.label.well = static_cast<int>((*cached)[k + s]);
        r.label.plasmon = static_cast<int>((*cached)[2 * k + s]);
        r.label.confidence = (*cached)[3 * k + s];
        rows[i].push_back(r);
      }
      return;
    }
    try {
      FluxoniumParams p = cfg.fluxonium;
      p.phi_ext = flux[i];
      const Spectrum spec = diagonalize(p, basis, k);
      std::vector<double> blob(4 * k);
      for (int s = 0; s < k; ++s) {
        SpectrumRow r;
        r.flux = flux[i];
        r.state_index = s;
        r.energy_ghz = spec.energies_ghz[s];
        r.label = spec.labels[s];
        rows[i].push_back(r);
        blob[s] = r.energy_ghz;
        blob[k + s] = r.label.well;
        blob[2 * k + s] = r.label.plasmon;
        blob[3 * k + s] = r.label.confidence;
      }
      ctx.cache.store("spectrum", i, blob);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ctx.stop_timer("sweep");

  std::vector<SpectrumRow> flat;
  for (int i = 0; i < nflux; ++i) {
    if (!errors[i].empty())
      ctx.manifest.failed_cells.push_back("flux[" + std::to_string(i) +
                                          "]: " + errors[i]);
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  if (cfg.output.csv) detail::emit(ctx, result, "spectrum.csv", spectrum_csv(flat));
  detail::finish(ctx, result);
  return result;
}

inline RunResult run_lines(const RunConfig& cfg, const RunOptions& opt = {}) {
  auto ctx = detail::make_context("lines", cfg, opt);
  RunResult result;
  const auto flux = cfg.sweep.flux_grid();
  const int nflux = static_cast<int>(flux.size());
  const CoupledModel model = cfg.coupled_model();
  std::vector<StateSelector> initials;
  for (const auto& s : cfg.lines.initial_states)
    initials.push_back(StateSelector::parse(s));
  CatalogOptions copt;
  copt.max_photon_order = cfg.lines.max_photon_order;

  constexpr int kStride = 11;  // doubles per cached record
  std::vector<TransitionCatalog> cats(nflux);
  std::vector<std::string> errors(nflux);
  ctx.start_timer();
  parallel_for_indexed(nflux, ctx.jobs, [&](int i) {
    cats[i].flux = flux[i];
    if (auto cached = ctx.cache.load("lines", i);
        cached && cached->size() % kStride == 0) {
      auto label_of = [](double well, double plasmon, double conf) {
        StateLabel l;
        l.well = static_cast<int>(well);
        l.plasmon = static_cast<int>(plasmon);
        l.confidence = conf;
        return l;
      };
      for (size_t off = 0; off + kStride <= cached->size(); off += kStride) {
        const double* v = cached->data() + off;
        TransitionRecord r;
        r.frequency_ghz = v[0];
        r.weight = v[1];
        r.photon_order = static_cast<int>(v[2]);
        r.initial_label = label_of(v[3], v[4], v[5]).text() + "@" +
                          std::to_string(static_cast<int>(v[6]));
        r.final_label = label_of(v[7], v[8], v[9]).text() + "@" +
                        std::to_string(static_cast<int>(v[10]));
        cats[i].records.push_back(r);
      }
      return;
    }
    try {
      CoupledModel m = model;
      m.fluxonium.phi_ext = flux[i];
      const DressedSpectrum ds = dressed_spectrum(m);
      std::vector<double> blob;
      for (const auto& sel : initials) {
        TransitionCatalog cat;
        try {
          cat = transition_catalog(ds, sel, copt);
        } catch (const LabelError&) {
          continue;  // initial state absent at this flux
        }
        for (const auto& r : cat.records) {
          cats[i].records.push_back(r);
          const auto& pi = ds.provenance[r.initial];
          const auto& pf = ds.provenance[r.final];
          const double rec[kStride] = {
              r.frequency_ghz, r.weight, double(r.photon_order),
              double(pi.fluxonium_label.well), double(pi.fluxonium_label.plasmon),
              pi.fluxonium_label.confidence, double(pi.photons),
              double(pf.fluxonium_label.well), double(pf.fluxonium_label.plasmon),
              pf.fluxonium_label.confidence, double(pf.photons)};
          blob.insert(blob.end(), rec, rec + kStride);
        }
      }
      ctx.cache.store("lines", i, blob);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ctx.stop_timer("sweep");

  for (int i = 0; i < nflux; ++i)
    if (!errors[i].empty())
      ctx.manifest.failed_cells.push_back("flux[" + std::to_string(i) +
                                          "]: " + errors[i]);
  if (cfg.output.csv) detail::emit(ctx, result, "lines.csv", catalog_csv(cats));
  detail::finish(ctx, result);
  return result;
}

inline RunResult run_single_tone(const RunConfig& cfg,
                                 const RunOptions& opt = {}) {
  auto ctx = detail::make_context("single-tone", cfg, opt);
  RunResult result;
  const auto flux = cfg.sweep.flux_grid();
  const auto freq = cfg.sweep.freq_grid();
  const int nflux = static_cast<int>(flux.size());
  const int nfreq = static_cast<int>(freq.size());
  const CoupledModel model = cfg.coupled_model();

  TransmissionMap map;
  map.flux = flux;
  map.freq_ghz = freq;
  map.amplitude.setConstant(nflux, nfreq,
                            std::numeric_limits<double>::quiet_NaN());

  std::vector<int> fresh;
  ctx.start_timer();
  for (int i = 0; i < nflux; ++i) {
    if (auto cached = ctx.cache.load("single_tone", i);
        cached && static_cast<int>(cached->size()) == nfreq) {
      for (int j = 0; j < nfreq; ++j) map.amplitude(i, j) = (*cached)[j];
    } else {
      fresh.push_back(i);
    }
  }
  if (!fresh.empty()) {
    std::vector<double> sub_flux(fresh.size());
    for (size_t s = 0; s < fresh.size(); ++s) sub_flux[s] = flux[fresh[s]];
    MapOptions mopt;
    mopt.max_dressed_states = cfg.model.max_dressed_states;
    mopt.workers = ctx.jobs;
    const TransmissionMap sub =
        single_tone_map(model, cfg.lindblad, sub_flux, freq, mopt);
    std::vector<bool> column_failed(fresh.size(), false);
    for (const auto& f : sub.failures) {
      column_failed[f.flux_index] = true;
      map.failures.push_back({fresh[f.flux_index], f.freq_index, f.message});
    }
    for (size_t s = 0; s < fresh.size(); ++s) {
      const int i = fresh[s];
      std::vector<double> blob(nfreq);
      for (int j = 0; j < nfreq; ++j) {
        map.amplitude(i, j) = sub.amplitude(static_cast<int>(s), j);
        blob[j] = map.amplitude(i, j);
      }
      if (!column_failed[s]) ctx.cache.store("single_tone", i, blob);
    }
  }
  ctx.stop_timer("sweep");

  for (const auto& f : map.failures)
    ctx.manifest.failed_cells.push_back(
        "cell[" + std::to_string(f.flux_index) + "," +
        std::to_string(f.freq_index) + "]: " + f.message);
  if (cfg.output.csv)
    detail::emit(ctx, result, "single_tone.csv", map_csv(map));
  if (cfg.output.heatmap) {
    const auto path = (ctx.out / "single_tone.ppm").string();
    render_heatmap_ppm(map, path);
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    ctx.manifest.output_checksums["single_tone.ppm"] = hex64(fnv1a64(ss.str()));
    result.artifacts.push_back(path);
  }
  detail::finish(ctx, result);
  return result;
}

inline RunResult run_analytics(const RunConfig& cfg, const RunOptions& opt = {}) {
  auto ctx = detail::make_context("analytics", cfg, opt);
  RunResult result;
  ctx.start_timer();
  const std::string report = analytics_report(cfg);
  ctx.stop_timer("analytics");
  detail::emit(ctx, result, "analytics.txt", report);
  detail::finish(ctx, result);
  return result;
}

inline RunResult run(const std::string& subcommand, const RunConfig& cfg,
                     const RunOptions& opt = {}) {
  if (subcommand == "reduce") return run_reduce(cfg, opt);
  if (subcommand == "spectrum") return run_spectrum(cfg, opt);
  if (subcommand == "lines") return run_lines(cfg, opt);
  if (subcommand == "single-tone") return run_single_tone(cfg, opt);
  if (subcommand == "analytics") return run_analytics(cfg, opt);
  throw ConfigError("unknown subcommand: " + subcommand);
}

}  // namespace fluxsim

#endif
