#ifndef FLUXSIM_CIRCUIT_HPP
#define FLUXSIM_CIRCUIT_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fluxsim/constants.hpp"
#include "fluxsim/errors.hpp"

namespace fluxsim {

// Junction-array metadata, used only for validity advisories.
struct JunctionChain {
  int n_junctions = 0;
  double l_j_single_nh = 0.0;  // inductance per junction
  double c_g_single_ff = 0.0;  // parasitic ground capacitance per junction
};

// Physical four-node circuit: readout resonator node (phi_R), internal node
// (phi_1) and qubit node (phi_Q), with capacitances as drawn plus the
// resonator/chain inductive energies and the small-junction energy.
struct FourNodeCircuit {
  double c_r_ff = 0.0;
  double c_c_ff = 0.0;
  double c_1_ff = 0.0;
  double c_2_ff = 0.0;
  double e_lr_ghz = 0.0;
  double e_l_chain_ghz = 0.0;
  double e_j_ghz = 0.0;
  std::optional<JunctionChain> chain;

  void validate() const {
    if (c_r_ff < 0 || c_c_ff < 0 || c_1_ff < 0 || c_2_ff < 0)
      throw InputError("circuit: capacitances must be >= 0");
    if (e_j_ghz <= 0) throw InputError("circuit: e_j must be > 0");
    if (e_l_chain_ghz <= 0) throw InputError("circuit: e_l_chain must be > 0");
    if (e_lr_ghz <= 0) throw InputError("circuit: e_lr must be > 0");
    if (chain && chain->n_junctions < 1)
      throw InputError("circuit: chain.n_junctions must be >= 1");
  }
};

// Effective two-coordinate circuit after eliminating the internal node.
struct ThreeNodeCircuit {
  double c_r_eff_ff = 0.0;
  double c_q_eff_ff = 0.0;
  double c_c_eff_ff = 0.0;
  double e_lr_ghz = 0.0;
  double e_l_chain_ghz = 0.0;
  double e_j_ghz = 0.0;
};

struct DerivedEnergies {
  double e_c_ghz = 0.0;
  double e_l_ghz = 0.0;
  double e_j_ghz = 0.0;
  double nu_r_ghz = 0.0;
};

struct ChainAdvisory {
  std::string code;     // "inductance-ratio" | "stray-capacitance" | "not-applicable"
  std::string message;
};

struct ChainThresholds {
  double min_inductance_ratio = 10.0;   // L_total / L_single
  double max_stray_fraction = 0.10;     // sum(C_g) / c_q_eff
};

// Full kinetic-energy matrix of the four-node circuit in the node-phase
// coordinates (phi_R, phi_1, phi_Q).  Rows/cols ordered that way.
inline Eigen::Matrix3d four_node_capacitance_matrix(const FourNodeCircuit& c) {
  Eigen::Matrix3d m;
  m << c.c_r_ff + c.c_c_ff, -c.c_c_ff, 0.0,
       -c.c_c_ff, c.c_c_ff + c.c_1_ff + c.c_2_ff, -c.c_2_ff,
       0.0, -c.c_2_ff, c.c_2_ff;
  return m;
}

// (phi_R, phi_Q) kinetic matrix of the reduced circuit.
inline Eigen::Matrix2d reduced_capacitance_matrix(const ThreeNodeCircuit& r) {
  Eigen::Matrix2d m;
  m << r.c_r_eff_ff, -r.c_c_eff_ff,
       -r.c_c_eff_ff, r.c_q_eff_ff;
  return m;
}

// Eliminates the internal node: its conjugate momentum is conserved and set
// to zero, which makes the effective 2x2 capacitance matrix the Schur
// complement of the full matrix with respect to the phi_1 block.
inline ThreeNodeCircuit reduce_circuit(const FourNodeCircuit& circuit) {
  circuit.validate();
  const double c_t = circuit.c_1_ff + circuit.c_2_ff + circuit.c_c_ff;
  if (c_t <= 0.0)
    throw DegenerateCircuitError(
        "circuit: total capacitance C_1 + C_2 + C_C at the internal node is zero");
  ThreeNodeCircuit out;
  out.c_r_eff_ff =
      circuit.c_r_ff + circuit.c_c_ff * (circuit.c_1_ff + circuit.c_2_ff) / c_t;
  out.c_q_eff_ff = circuit.c_2_ff * (circuit.c_1_ff + circuit.c_c_ff) / c_t;
  out.c_c_eff_ff = circuit.c_2_ff * circuit.c_c_ff / c_t;
  out.e_lr_ghz = circuit.e_lr_ghz;
  out.e_l_chain_ghz = circuit.e_l_chain_ghz;
  out.e_j_ghz = circuit.e_j_ghz;
  return out;
}

inline DerivedEnergies derive_energies(const ThreeNodeCircuit& reduced) {
  if (reduced.c_q_eff_ff <= 0)
    throw InputError("circuit: c_q_eff must be > 0 to derive E_C");
  if (reduced.c_r_eff_ff <= 0)
    throw InputError("circuit: c_r_eff must be > 0 to derive nu_r");
  DerivedEnergies e;
  e.e_c_ghz = constants::charging_energy_ghz(reduced.c_q_eff_ff);
  e.e_l_ghz = reduced.e_l_chain_ghz;
  e.e_j_ghz = reduced.e_j_ghz;
  e.nu_r_ghz = constants::lc_frequency_ghz(reduced.e_lr_ghz, reduced.c_r_eff_ff);
  return e;
}

// Advisory-only checks of the junction-array idealization; never throws for
// out-of-range hardware, only reports.
inline std::vector<ChainAdvisory> validate_chain(
    const FourNodeCircuit& circuit, const ChainThresholds& thresholds = {}) {
  std::vector<ChainAdvisory> findings;
  if (!circuit.chain) {
    findings.push_back({"not-applicable", "no junction-chain record present"});
    return findings;
  }
  const JunctionChain& ch = *circuit.chain;
  const double ratio = static_cast<double>(ch.n_junctions);  // L_total/L_single
  if (ratio < thresholds.min_inductance_ratio) {
    findings.push_back(
        {"inductance-ratio",
         "chain inductance ratio L_total/L_single = " + std::to_string(ratio) +
             " below " + std::to_string(thresholds.min_inductance_ratio)});
  }
  const double stray_ff = ch.n_junctions * ch.c_g_single_ff;
  const double c_q_eff = reduce_circuit(circuit).c_q_eff_ff;
  if (c_q_eff > 0 && stray_ff > thresholds.max_stray_fraction * c_q_eff) {
    findings.push_back(
        {"stray-capacitance",
         "total chain ground capacitance " + std::to_string(stray_ff) +
             " fF exceeds " + std::to_string(thresholds.max_stray_fraction) +
             " of c_q_eff = " + std::to_string(c_q_eff) + " fF"});
  }
  return findings;
}

}  // namespace fluxsim

#endif
