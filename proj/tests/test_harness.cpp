#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fluxsim/config.hpp"
#include "fluxsim/csv.hpp"
#include "fluxsim/heatmap.hpp"
#include "fluxsim/manifest.hpp"
#include "fluxsim/run.hpp"

using namespace fluxsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("fluxsim_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json tiny_config_json() {
  nlohmann::json j;
  j["direct_energies"] = {{"e_c_ghz", 0.46}, {"e_j_ghz", 8.11},
                          {"e_l_ghz", 0.24}, {"nu_r_ghz", 4.95},
                          {"g_ghz", 0.076}};
  j["sweep"] = {{"flux_min", 0.0},  {"flux_max", 0.3},  {"flux_steps", 7},
                {"freq_min_ghz", 4.90}, {"freq_max_ghz", 5.0}, {"freq_steps", 5}};
  j["model"] = {{"n_flux_levels", 5}, {"n_photons", 3},
                {"max_dressed_states", 10}};
  j["output"] = {{"parallelism", 2}};
  return j;
}

}  // namespace

TEST_CASE("config loading", "[harness]") {
  SECTION("the shipped device file resolves to the device parameters") {
    const auto cfg =
        load_config(fs::path(FLUXSIM_SOURCE_DIR) / "configs/paper-device.json");
    CHECK(cfg.fluxonium.e_c_ghz == 0.46);
    CHECK(cfg.fluxonium.e_j_ghz == 8.11);
    CHECK(cfg.fluxonium.e_l_ghz == 0.24);
    CHECK(cfg.nu_r_ghz == 4.95);
    CHECK(cfg.g_ghz == 0.076);
    CHECK(cfg.lindblad.kappa_ghz == 0.04);
    CHECK(cfg.output.heatmap);
  }
  SECTION("zero flux steps name the offending key") {
    auto j = tiny_config_json();
    j["sweep"]["flux_steps"] = 0;
    try {
      parse_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("sweep.flux_steps") !=
            std::string::npos);
    }
  }
  SECTION("circuit and direct energies are mutually exclusive") {
    auto j = tiny_config_json();
    j["circuit"] = {{"c_r_ff", 50.0}, {"c_c_ff", 2.0}, {"c_1_ff", 10.0},
                    {"c_2_ff", 12.0}, {"e_lr_ghz", 8.0},
                    {"e_l_chain_ghz", 0.24}, {"e_j_ghz", 8.11}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j.erase("direct_energies");
    CHECK_NOTHROW(parse_config(j));
    j.erase("circuit");
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_config("/nonexistent/fluxsim.json"), ConfigError);
  }
  SECTION("worker count must be positive") {
    auto j = tiny_config_json();
    j["output"]["parallelism"] = 0;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("circuit section feeds the derived energies") {
    auto j = tiny_config_json();
    j.erase("direct_energies");
    j["circuit"] = {{"c_r_ff", 50.0}, {"c_c_ff", 2.0}, {"c_1_ff", 10.0},
                    {"c_2_ff", 12.0}, {"e_lr_ghz", 7.906},
                    {"e_l_chain_ghz", 0.24}, {"e_j_ghz", 8.11},
                    {"g_ghz", 0.076}};
    const auto cfg = parse_config(j);
    CHECK(cfg.fluxonium.e_j_ghz == 8.11);
    CHECK(cfg.fluxonium.e_c_ghz ==
          Approx(constants::charging_energy_ghz(
              reduce_circuit(*cfg.circuit).c_q_eff_ff)));
    CHECK(cfg.nu_r_ghz > 0);
  }
}

TEST_CASE("csv formatting", "[harness]") {
  CHECK(format_g9(0.1234567891234) == "0.123456789");
  CHECK(format_g9(4.95) == "4.95");
  CHECK(format_g9(std::nan("")) == "nan");
  CHECK(format_g9(-1.5e-7) == "-1.5e-07");

  SECTION("map csv is long form with one row per cell") {
    TransmissionMap map;
    map.flux = {0.0, 0.1, 0.2};
    map.freq_ghz = {4.9, 4.95, 5.0};
    map.amplitude.setConstant(3, 3, 0.5);
    const auto text = map_csv(map);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);  // header + 9
    CHECK(text.rfind("flux,freq_GHz,amplitude\n", 0) == 0);
  }
  SECTION("empty catalog still carries the header") {
    const auto text = catalog_csv({});
    CHECK(text == "flux,frequency_GHz,weight,order,initial_label,final_label\n");
  }
}

TEST_CASE("fnv checksums are stable", "[harness]") {
  CHECK(hex64(fnv1a64(std::string("fluxsim"))) == hex64(fnv1a64(std::string("fluxsim"))));
  CHECK(fnv1a64(std::string("")) == 14695981039346656037ull);
  CHECK(fnv1a64(std::string("a")) != fnv1a64(std::string("b")));
}

TEST_CASE("cell cache round-trips doubles bit-exactly", "[harness]") {
  const auto dir = temp_dir("cache");
  CellCache cache(dir, "deadbeef", true);
  const std::vector<double> values{0.1, -3.1415926535897931,
                                   std::numeric_limits<double>::quiet_NaN(),
                                   5.0499999999999998};
  cache.store("spectrum", 3, values);
  const auto back = cache.load("spectrum", 3);
  REQUIRE(back.has_value());
  REQUIRE(back->size() == values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) CHECK(std::isnan((*back)[i]));
    else CHECK((*back)[i] == values[i]);
  }
  CHECK_FALSE(cache.load("spectrum", 4).has_value());
  CHECK(cache.hits() == 1);
  CHECK(cache.misses() == 1);
  fs::remove_all(dir);
}

TEST_CASE("spectrum runs are deterministic and cache-consistent", "[harness]") {
  auto j = tiny_config_json();
  auto cfg = parse_config(j);

  const auto out1 = temp_dir("run1");
  const auto out2 = temp_dir("run2");
  RunOptions opt1{out1.string(), 1, true, (out1 / "cache").string()};
  RunOptions opt2{out2.string(), 2, true, (out2 / "cache").string()};

  const auto r1 = run_spectrum(cfg, opt1);
  const auto r2 = run_spectrum(cfg, opt2);
  CHECK(r1.failed_cells == 0);
  CHECK(r2.failed_cells == 0);

  SECTION("parallel and serial runs are byte-identical") {
    CHECK(slurp(out1 / "spectrum.csv") == slurp(out2 / "spectrum.csv"));
    CHECK(r1.manifest.output_checksums.at("spectrum.csv") ==
          r2.manifest.output_checksums.at("spectrum.csv"));
  }
  SECTION("second run is served from cache with identical bytes") {
    const auto first = slurp(out1 / "spectrum.csv");
    const auto r1b = run_spectrum(cfg, opt1);
    CHECK(slurp(out1 / "spectrum.csv") == first);
    CHECK(r1b.manifest.cache_hits == 7);
    CHECK(r1b.manifest.cache_misses == 0);
  }
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("lines and single-tone artifacts", "[harness]") {
  auto j = tiny_config_json();
  j["sweep"]["flux_steps"] = 3;
  j["sweep"]["freq_steps"] = 5;
  j["output"]["formats"] = {"csv", "heatmap"};
  auto cfg = parse_config(j);

  const auto out = temp_dir("artifacts");
  RunOptions opt{out.string(), 2, true, (out / "cache").string()};

  SECTION("lines csv has the catalog columns") {
    const auto r = run_lines(cfg, opt);
    CHECK(r.failed_cells == 0);
    const auto text = slurp(out / "lines.csv");
    CHECK(text.rfind("flux,frequency_GHz,weight,order,initial_label,final_label\n",
                     0) == 0);
    CHECK(text.find("g0@0") != std::string::npos);
    // Cached rerun reproduces the identical file.
    const auto again = run_lines(cfg, opt);
    CHECK(slurp(out / "lines.csv") == text);
    CHECK(again.manifest.cache_hits == 3);
  }
  SECTION("single-tone emits csv, heatmap and manifest") {
    const auto r = run_single_tone(cfg, opt);
    CHECK(r.failed_cells == 0);
    CHECK(fs::exists(out / "single_tone.csv"));
    CHECK(fs::exists(out / "single_tone.ppm"));
    CHECK(fs::exists(out / "manifest.json"));
    const auto ppm = slurp(out / "single_tone.ppm");
    CHECK(ppm.rfind("P6\n", 0) == 0);
    const auto manifest =
        nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["tool_version"] == fluxsim::version);
    CHECK(manifest["output_checksums"].contains("single_tone.csv"));
    // Rerun from cache: identical csv bytes.
    const auto text = slurp(out / "single_tone.csv");
    run_single_tone(cfg, opt);
    CHECK(slurp(out / "single_tone.csv") == text);
  }
  fs::remove_all(out);
}

TEST_CASE("analytics and reduce reports", "[harness]") {
  const auto out = temp_dir("reports");
  SECTION("analytics report carries the headline quantities") {
    auto cfg = parse_config(tiny_config_json());
    RunOptions opt{out.string(), 1, false, (out / "cache").string()};
    const auto r = run_analytics(cfg, opt);
    const auto text = slurp(out / "analytics.txt");
    CHECK(text.find("plasmon dispersion") != std::string::npos);
    CHECK(text.find("raman transfer") != std::string::npos);
    CHECK(text.find("fluxon slope") != std::string::npos);
    CHECK(r.failed_cells == 0);
  }
  SECTION("reduce requires a circuit section") {
    auto cfg = parse_config(tiny_config_json());
    RunOptions opt{out.string(), 1, false, (out / "cache").string()};
    CHECK_THROWS_AS(run_reduce(cfg, opt), ConfigError);
  }
  fs::remove_all(out);
}

TEST_CASE("cli process interface", "[harness]") {
  const auto out = temp_dir("cli");
  const auto config_path = out / "cfg.json";
  {
    std::ofstream f(config_path);
    auto j = tiny_config_json();
    j["sweep"]["flux_steps"] = 3;
    f << j.dump(2);
  }
  auto run_cli = [&](const std::string& args) {
    const std::string cmd = std::string(FLUXSIM_CLI_PATH) + " " + args +
                            " > " + (out / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run_cli("spectrum --config " + config_path.string() + " --out " +
                (out / "run").string() + " --jobs 2") == 0);
  CHECK(fs::exists(out / "run/spectrum.csv"));

  SECTION("config errors exit with code 2") {
    std::ofstream bad(out / "bad.json");
    bad << "{\"sweep\": {}}";
    bad.close();
    CHECK(run_cli("spectrum --config " + (out / "bad.json").string()) == 2);
    CHECK(run_cli("spectrum --config " + (out / "missing.json").string()) == 2);
  }
  SECTION("no-cache flag works") {
    CHECK(run_cli("spectrum --config " + config_path.string() + " --out " +
                  (out / "run2").string() + " --no-cache") == 0);
    CHECK_FALSE(fs::exists(out / "run2/.fluxsim-cache"));
  }
  SECTION("partial cell failures exit with code 3") {
    // Decoupled qubit with no qubit dissipation: every map cell is
    // degenerate, the sweep completes with holes.
    auto j = tiny_config_json();
    j["direct_energies"]["g_ghz"] = 0.0;
    j["lindblad"] = {{"temperature_k", 0.0}, {"kappa_ghz", 0.04},
                     {"gamma_q_ghz", 0.0}, {"zeta_ghz", 1e-4},
                     {"omega_d_ghz", 4.95}};
    j["sweep"]["flux_steps"] = 1;
    j["sweep"]["freq_steps"] = 2;
    std::ofstream f(out / "holes.json");
    f << j.dump(2);
    f.close();
    CHECK(run_cli("single-tone --config " + (out / "holes.json").string() +
                  " --out " + (out / "run3").string()) == 3);
    const auto csv = slurp(out / "run3/single_tone.csv");
    CHECK(csv.find("nan") != std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(out / "run3/manifest.json"));
    CHECK(manifest["failed_cells"].size() == 2);
  }
  fs::remove_all(out);
}

TEST_CASE("cache directory env override", "[harness]") {
  const auto out = temp_dir("envcache");
  const auto cache_override = out / "elsewhere";
  setenv("FLUXSIM_CACHE_DIR", cache_override.c_str(), 1);
  auto cfg = parse_config(tiny_config_json());
  RunOptions opt;
  opt.out_dir = (out / "run").string();
  run_spectrum(cfg, opt);
  unsetenv("FLUXSIM_CACHE_DIR");
  CHECK(fs::exists(cache_override));
  CHECK_FALSE(fs::exists(out / "run/.fluxsim-cache"));
  fs::remove_all(out);
}

TEST_CASE("bare-resonator map matches the golden file", "[harness]") {
  // Golden bytes generated by this pipeline; regenerate by writing the csv
  // after any intentional format change.
  nlohmann::json j;
  j["direct_energies"] = {{"e_c_ghz", 0.46}, {"e_j_ghz", 8.11},
                          {"e_l_ghz", 0.24}, {"nu_r_ghz", 4.95},
                          {"g_ghz", 0.0}};
  j["sweep"] = {{"flux_min", 0.0},  {"flux_max", 0.2},  {"flux_steps", 3},
                {"freq_min_ghz", 4.93}, {"freq_max_ghz", 4.97},
                {"freq_steps", 5}};
  j["model"] = {{"n_flux_levels", 3}, {"n_photons", 3},
                {"max_dressed_states", 6}};
  const auto cfg = parse_config(j);
  const auto out = temp_dir("golden");
  RunOptions opt{out.string(), 1, false, (out / "cache").string()};
  run_single_tone(cfg, opt);
  const auto produced = slurp(out / "single_tone.csv");
  const auto golden =
      slurp(fs::path(FLUXSIM_SOURCE_DIR) / "tests/golden/single_tone_bare.csv");
  CHECK(produced == golden);
  // The single ridge sits at the bare frequency in every flux column.
  CHECK(produced.find("0.1,4.95,") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("heatmap rendering", "[harness]") {
  TransmissionMap map;
  map.flux = {0.0, 0.1};
  map.freq_ghz = {4.9, 5.0};
  map.amplitude.resize(2, 2);
  map.amplitude << 0.0, 1.0, 0.5, std::numeric_limits<double>::quiet_NaN();
  const auto out = temp_dir("heatmap");
  const auto path = (out / "m.ppm").string();
  render_heatmap_ppm(map, path, 2);
  const auto ppm = slurp(path);
  CHECK(ppm.rfind("P6\n4 4\n255\n", 0) == 0);
  CHECK(ppm.size() == 11 + 4 * 4 * 3);
  // NaN cell renders gray (128,128,128): top-right block of the image is the
  // NaN cell (highest frequency of the second flux column).
  const unsigned char g = static_cast<unsigned char>(ppm[11 + 2 * 3]);
  CHECK(static_cast<int>(g) == 128);
  fs::remove_all(out);
}
