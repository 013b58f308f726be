#ifndef FLUXSIM_RUN_ANALYTICS_REPORT_HPP
#define FLUXSIM_RUN_ANALYTICS_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <string>

#include "fluxsim/analytics.hpp"
#include "fluxsim/config.hpp"
#include "fluxsim/coupled.hpp"

namespace fluxsim {

namespace detail {
inline std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}
}  // namespace detail

// Closed-form report for the configured device: plasmon dispersion pieces,
// two-level hybridization, Raman rate and the scaling-law summary.  Inputs
// not pinned in the config are computed from the device spectrum.
inline std::string analytics_report(const RunConfig& cfg) {
  using detail::fmt;
  FluxoniumParams p = cfg.fluxonium;
  p.phi_ext = 0.0;
  BasisConfig basis{cfg.model.n_basis, cfg.model.scale};
  const Spectrum spec = diagonalize(p, basis, 9);

  auto find_label = [&](int well, int plasmon) {
    for (int s = 0; s < spec.size(); ++s)
      if (spec.labels[s].well == well && spec.labels[s].plasmon == plasmon)
        return s;
    throw LabelError("analytics: level (" + std::to_string(well) + "," +
                     std::to_string(plasmon) + ") not found");
  };
  const int g0 = find_label(0, 0), e0 = find_label(0, 1), f0 = find_label(0, 2);

  const double e_p = cfg.analytics.e_p_ghz > 0
                         ? cfg.analytics.e_p_ghz
                         : spec.energies_ghz[e0] - spec.energies_ghz[g0];
  const double e_p_prime = cfg.analytics.e_p_prime_ghz > 0
                               ? cfg.analytics.e_p_prime_ghz
                               : spec.energies_ghz[f0] - spec.energies_ghz[e0];
  const double phi_zpf =
      cfg.analytics.phi_zpf > 0
          ? cfg.analytics.phi_zpf
          : std::pow(2.0 * p.e_c_ghz / (p.e_j_ghz + p.e_l_ghz), 0.25);

  FluxoniumParams at_flux = cfg.fluxonium;
  at_flux.phi_ext = cfg.analytics.phi_ext;

  const DispersionReport disp = plasmon_dispersion(p, e_p, e_p_prime, phi_zpf);

  const complex m = cfg.g_ghz * matrix_element(spec, FluxoniumOperator::charge,
                                               e0, g0);
  TwoLevelModel tl{cfg.nu_r_ghz, e_p, m};
  const HybridizationResult hyb = hybridize(tl, disp.total_ghz);

  RamanConfig raman{cfg.analytics.raman_omega_probe_ghz,
                    cfg.analytics.raman_omega_pump_ghz,
                    cfg.analytics.raman_delta_ghz,
                    cfg.analytics.raman_delta_2gamma_ghz};

  std::vector<double> t1_grid;
  for (double f = 0.10; f < 0.451; f += 0.05) t1_grid.push_back(f);
  const ScalingLaws laws = scaling_laws(cfg.fluxonium, t1_grid, 0.078, basis);

  std::string out;
  out += "fluxsim analytics report\n";
  out += "========================\n\n";
  out += "device\n";
  out += fmt("  e_c = %.6g GHz, e_j = %.6g GHz, e_l = %.6g GHz\n",
             p.e_c_ghz, p.e_j_ghz, p.e_l_ghz);
  out += fmt("  nu_r = %.6g GHz, g = %.6g GHz\n", cfg.nu_r_ghz, cfg.g_ghz);
  out += fmt("  plasmon E_P = %.6g GHz, E_P' = %.6g GHz, phi_zpf = %.4g\n\n",
             e_p, e_p_prime, phi_zpf);

  out += "stark-shifted minimum\n";
  out += fmt("  phi_min(phi_ext=%.4g) = %.6g rad  (factor %.6g)\n\n",
             cfg.analytics.phi_ext, stark_minimum(at_flux), disp.phi_min_factor);

  out += "plasmon dispersion (quadratic, GHz per Phi0^2)\n";
  out += fmt("  symmetric     = %.6g\n", disp.symmetric_ghz);
  out += fmt("  antisymmetric = %.6g\n", disp.antisymmetric_ghz);
  out += fmt("  total (down)  = %.6g\n\n", disp.total_ghz);

  out += "resonator/plasmon hybridization (two-level model)\n";
  out += fmt("  interaction m = %.6g i GHz, bare detuning = %.6g GHz\n",
             std::abs(m), e_p - cfg.nu_r_ghz);
  out += fmt("  branches: %.6g / %.6g GHz\n", hyb.lower_ghz, hyb.upper_ghz);
  out += fmt("  |beta_R|^2 = %.4g, I_R/I_Q = %.4g\n", hyb.beta_r_sq,
             hyb.intensity_ratio);
  out += fmt("  quadratic split: resonator %.4g / qubit %.4g",
             hyb.resonator_quadratic_fraction, hyb.qubit_quadratic_fraction);
  if (hyb.quartic_fraction)
    out += fmt(", quartic fraction %.4g", *hyb.quartic_fraction);
  out += "\n\n";

  out += "raman transfer\n";
  out += fmt("  rate = %.6g GHz (pi time %.6g ns)\n\n", raman_rate_ghz(raman),
             raman_pi_time_ns(raman));

  out += "scaling laws\n";
  out += fmt("  fluxon slope (first order) = %.6g GHz/Phi0\n",
             laws.fluxon_slope_ghz_per_phi0);
  out += fmt("  matrix-element suppression factor = %.6g\n",
             laws.suppression_factor);
  out += "  t1_relative (normalized at 0.078 Phi0):\n";
  for (size_t i = 0; i < t1_grid.size(); ++i)
    out += fmt("    phi_ext = %.3f: %.6g\n", t1_grid[i], laws.t1_relative[i]);
  return out;
}

}  // namespace fluxsim

#endif
