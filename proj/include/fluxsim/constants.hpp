#ifndef FLUXSIM_CONSTANTS_HPP
#define FLUXSIM_CONSTANTS_HPP

#include <cmath>

// Unit conventions used throughout: h = 1, energies and frequencies in GHz,
// capacitance in fF, inductance in nH, flux in units of Phi0, phase in radians.
namespace fluxsim::constants {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// 2018 SI exact values.
inline constexpr double electron_charge_c = 1.602176634e-19;  // C
inline constexpr double planck_j_s = 6.62607015e-34;          // J s
inline constexpr double boltzmann_j_per_k = 1.380649e-23;     // J/K

// k_B/h: thermal frequency per kelvin.
inline constexpr double kb_over_h_ghz_per_k =
    boltzmann_j_per_k / planck_j_s * 1e-9;  // 20.836619 GHz/K

// E_C = e^2/2C for C in fF, result in GHz.
inline constexpr double charging_prefactor_ghz_ff =
    electron_charge_c * electron_charge_c / (2.0 * 1e-15 * planck_j_s) * 1e-9;

inline double charging_energy_ghz(double capacitance_ff) {
  return charging_prefactor_ghz_ff / capacitance_ff;
}

// E_L = (Phi0/2pi)^2 / L for L in nH, result in GHz.  Phi0 = h/2e.
inline constexpr double reduced_flux_quantum_wb =
    planck_j_s / (2.0 * electron_charge_c * two_pi);
inline constexpr double inductive_prefactor_ghz_nh =
    reduced_flux_quantum_wb * reduced_flux_quantum_wb /
    (1e-9 * planck_j_s) * 1e-9;

inline double inductive_energy_ghz(double inductance_nh) {
  return inductive_prefactor_ghz_nh / inductance_nh;
}

// LC oscillator frequency from its inductive energy (GHz) and capacitance (fF).
// Equals 1/(2pi sqrt(LC)) expressed through the 4E_C n^2 + E_L phi^2/2 form.
inline double lc_frequency_ghz(double e_l_ghz, double capacitance_ff) {
  return std::sqrt(8.0 * e_l_ghz * charging_energy_ghz(capacitance_ff));
}

}  // namespace fluxsim::constants

#endif
