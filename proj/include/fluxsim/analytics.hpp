#ifndef FLUXSIM_ANALYTICS_HPP
#define FLUXSIM_ANALYTICS_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "fluxsim/constants.hpp"
#include "fluxsim/errors.hpp"
#include "fluxsim/fluxonium.hpp"

namespace fluxsim {

// One resonator-like and one qubit-like excitation coupled by a single
// interaction element m (GHz); the workhorse of the hybridization estimates.
struct TwoLevelModel {
  double eps_r_ghz = 0.0;
  double eps_q_ghz = 0.0;
  complex m_ghz{0.0, 0.0};
};

struct HybridizationResult {
  double lower_ghz = 0.0;
  double upper_ghz = 0.0;
  complex alpha_over_beta_resonator{0.0, 0.0};  // resonator-like branch
  complex alpha_over_beta_qubit{0.0, 0.0};      // qubit-like branch
  double beta_r_sq = 0.0;        // qubit weight of the resonator-like branch
  double intensity_ratio = 0.0;  // I_R / I_Q = |alpha_R/alpha_Q|^2
  bool decoupled = false;        // m == 0: ratio is infinite
  // Redistribution of a bare qubit quadratic flux coefficient `a` between the
  // two branches (fractions sum to 1), plus the magnitude of the shared
  // quartic term per unit a (the branches carry it with opposite signs).
  double resonator_quadratic_fraction = 0.0;
  double qubit_quadratic_fraction = 0.0;
  std::optional<double> quartic_fraction;
};

struct RamanConfig {
  double omega_probe_ghz = 0.0;
  double omega_pump_ghz = 0.0;
  double delta_ghz = 0.0;         // detuning from two-photon resonance
  double delta_2gamma_ghz = 0.0;  // pump detuning from the intermediate level

  void validate() const {
    if (delta_ghz == 0.0) throw InputError("raman: delta must be nonzero");
    if (delta_2gamma_ghz == 0.0)
      throw InputError("raman: delta_2gamma must be nonzero");
  }
};

struct DispersionReport {
  double phi_min_factor = 0.0;      // phi_min = 2 pi (Phi/Phi0) * this
  double symmetric_ghz = 0.0;       // quadratic coefficient, GHz/Phi0^2
  double antisymmetric_ghz = 0.0;   // quadratic coefficient, GHz/Phi0^2
  // Both contributions push the plasmon down; the printed second-order form
  // carries the opposite sign, so `total` is the sum of magnitudes.
  double total_ghz = 0.0;
};

struct ScalingLaws {
  double fluxon_slope_ghz_per_phi0 = 0.0;   // 4 pi^2 E_L, first order
  double suppression_factor = 0.0;          // exp[-pi^2 sqrt(E_J/8E_C)]
  std::vector<double> t1_relative;          // 1/|<g1|n|g0>|^2, normalized
};

/// Stark-shifted position of the central potential minimum, lowest order in
/// E_L/E_J: 2 pi (Phi_ext/Phi0) (1 - E_L/E_J).
inline double stark_minimum(const FluxoniumParams& p) {
  if (!(p.e_j_ghz > p.e_l_ghz))
    throw InputError("stark_minimum: requires e_j > e_l");
  return constants::two_pi * p.phi_ext * (1.0 - p.e_l_ghz / p.e_j_ghz);
}

namespace detail {
// <k|x^3|1> for x = a + a†: the two elements the cubic correction needs.
inline constexpr double x3_elem_0_1 = 3.0;
inline double x3_elem_2_1() { return 6.0 * std::sqrt(2.0); }
}  // namespace detail

/// Quadratic plasmon dispersion split into the even-well (reduced effective
/// E_J) and odd-well (cubic, second-order) contributions.  e_p is the
/// g0->e0 energy, e_p_prime the e0->f0 energy, phi_zpf the local oscillator
/// scale used for the cubic matrix elements.
inline DispersionReport plasmon_dispersion(const FluxoniumParams& p,
                                           double e_p_ghz, double e_p_prime_ghz,
                                           double phi_zpf) {
  if (!(e_p_ghz > 0) || !(e_p_prime_ghz > 0))
    throw InputError("plasmon_dispersion: e_p and e_p_prime must be > 0");
  DispersionReport r;
  r.phi_min_factor = 1.0 - p.e_l_ghz / p.e_j_ghz;
  const double pi_el_over_ej = constants::pi * p.e_l_ghz / p.e_j_ghz;
  r.symmetric_ghz = -pi_el_over_ej * pi_el_over_ej * e_p_ghz;
  const double zpf3 = std::pow(phi_zpf, 3.0);
  const double fe = detail::x3_elem_2_1() * zpf3;  // <f0|phi^3|e0>
  const double ge = detail::x3_elem_0_1 * zpf3;    // <g0|phi^3|e0>
  const double pref = std::pow(constants::pi * p.e_l_ghz / 3.0, 2.0);
  r.antisymmetric_ghz = pref * (fe * fe / e_p_prime_ghz - 2.0 * ge * ge / e_p_ghz);
  r.total_ghz = std::abs(r.symmetric_ghz) + std::abs(r.antisymmetric_ghz);
  return r;
}

/// Diagonalizes the 2x2 hybridization model.  When `bare_quadratic_a_ghz` is
/// given (the bare qubit branch disperses as -a (Phi/Phi0)^2), the quartic
/// fraction |m|^2 a / Omega^3 is also reported.
inline HybridizationResult hybridize(
    const TwoLevelModel& model,
    std::optional<double> bare_quadratic_a_ghz = std::nullopt) {
  HybridizationResult out;
  const double delta = model.eps_q_ghz - model.eps_r_ghz;
  const double m2 = std::norm(model.m_ghz);
  const double omega = std::sqrt(delta * delta + 4.0 * m2);
  const double mean = 0.5 * (model.eps_q_ghz + model.eps_r_ghz);
  out.lower_ghz = mean - 0.5 * omega;
  out.upper_ghz = mean + 0.5 * omega;

  if (m2 == 0.0) {
    out.decoupled = true;
    out.beta_r_sq = 0.0;
    out.intensity_ratio = std::numeric_limits<double>::infinity();
    out.resonator_quadratic_fraction = 0.0;
    out.qubit_quadratic_fraction = 1.0;
    return out;
  }

  // Eigenvector (alpha, beta) with H = [[eps_r, m], [m*, eps_q]]: for the
  // branch at eigenvalue lambda, alpha/beta = m / (lambda - eps_r).
  const double lam_r = delta >= 0 ? out.lower_ghz : out.upper_ghz;
  const double lam_q = delta >= 0 ? out.upper_ghz : out.lower_ghz;
  out.alpha_over_beta_resonator = model.m_ghz / (lam_r - model.eps_r_ghz);
  out.alpha_over_beta_qubit = model.m_ghz / (lam_q - model.eps_r_ghz);

  const double r2 = std::norm(out.alpha_over_beta_resonator);
  out.beta_r_sq = 1.0 / (1.0 + r2);
  const double q2 = std::norm(out.alpha_over_beta_qubit);
  out.intensity_ratio = (r2 / (1.0 + r2)) / (q2 / (1.0 + q2));

  const double s = std::abs(delta) / omega;
  out.resonator_quadratic_fraction = 0.5 * (1.0 - s);
  out.qubit_quadratic_fraction = 0.5 * (1.0 + s);
  if (bare_quadratic_a_ghz)
    out.quartic_fraction =
        m2 * std::abs(*bare_quadratic_a_ghz) / (omega * omega * omega);
  return out;
}

/// Two-tone transfer rate Omega_probe * Omega_pump^2 / (Delta * delta_2gamma).
inline double raman_rate_ghz(const RamanConfig& cfg) {
  cfg.validate();
  return cfg.omega_probe_ghz * cfg.omega_pump_ghz * cfg.omega_pump_ghz /
         (cfg.delta_ghz * cfg.delta_2gamma_ghz);
}

/// t_pi = 1/(2 |Omega|) for a cyclic Rabi frequency Omega in GHz; nanoseconds.
inline double raman_pi_time_ns(const RamanConfig& cfg) {
  return 1.0 / (2.0 * std::abs(raman_rate_ghz(cfg)));
}

/// First-order fluxon slope, asymptotic matrix-element suppression, and the
/// relative T1 curve 1/|<g1|n|g0>|^2 normalized at `reference_flux`.
inline ScalingLaws scaling_laws(const FluxoniumParams& params,
                                const std::vector<double>& flux_grid = {},
                                double reference_flux = 0.078,
                                const BasisConfig& basis = {}) {
  ScalingLaws out;
  out.fluxon_slope_ghz_per_phi0 =
      4.0 * constants::pi * constants::pi * params.e_l_ghz;
  out.suppression_factor = std::exp(
      -constants::pi * constants::pi *
      std::sqrt(params.e_j_ghz / (8.0 * params.e_c_ghz)));
  if (flux_grid.empty()) return out;

  auto fluxon_elem_sq = [&](double f) {
    FluxoniumParams p = params;
    p.phi_ext = f;
    const Spectrum spec = diagonalize(p, basis, 8);
    // Metastable fluxon partner: the adjacent-well ground state on the
    // descending branch (lowest transition energy of the two neighbours).
    int target = -1;
    for (int s = 1; s < spec.size(); ++s)
      if (spec.labels[s].plasmon == 0 &&
          std::abs(spec.labels[s].well - spec.labels[0].well) == 1) {
        target = s;
        break;
      }
    if (target < 0)
      throw LabelError("scaling_laws: adjacent-well ground state not found at flux " +
                       std::to_string(f));
    return std::norm(matrix_element(spec, FluxoniumOperator::charge, 0, target));
  };

  const double ref = fluxon_elem_sq(reference_flux);
  out.t1_relative.reserve(flux_grid.size());
  for (double f : flux_grid) out.t1_relative.push_back(ref / fluxon_elem_sq(f));
  return out;
}

}  // namespace fluxsim

#endif
