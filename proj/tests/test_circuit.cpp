#include <catch2/catch.hpp>

#include <random>

#include "fluxsim/circuit.hpp"

using namespace fluxsim;

namespace {

FourNodeCircuit device(double c_r = 50, double c_c = 2, double c_1 = 10,
                       double c_2 = 12) {
  FourNodeCircuit c;
  c.c_r_ff = c_r;
  c.c_c_ff = c_c;
  c.c_1_ff = c_1;
  c.c_2_ff = c_2;
  c.e_lr_ghz = 8.0;
  c.e_l_chain_ghz = 0.24;
  c.e_j_ghz = 8.11;
  return c;
}

}  // namespace

TEST_CASE("reduction limits of the coupling capacitance", "[circuit]") {
  SECTION("c_2 = 0 removes the qubit branch entirely") {
    const auto r = reduce_circuit(device(50, 2, 10, 0));
    CHECK(r.c_c_eff_ff == 0.0);
    CHECK(r.c_q_eff_ff == 0.0);
  }
  SECTION("c_2 = c_1 + c_c gives half the coupling capacitance") {
    const auto r = reduce_circuit(device(50, 2, 10, 12));
    CHECK(r.c_c_eff_ff == Approx(1.0).epsilon(1e-12));  // 12*2/24
    CHECK(r.c_c_eff_ff == Approx(0.5 * 2.0).epsilon(1e-12));
  }
  SECTION("c_2 -> infinity approaches c_c") {
    const auto r = reduce_circuit(device(50, 2, 10, 1e6));
    CHECK(r.c_c_eff_ff == Approx(2.0).epsilon(1e-4));
  }
  SECTION("energies pass through unchanged") {
    const auto r = reduce_circuit(device());
    CHECK(r.e_lr_ghz == 8.0);
    CHECK(r.e_l_chain_ghz == 0.24);
    CHECK(r.e_j_ghz == 8.11);
  }
  SECTION("degenerate internal node") {
    CHECK_THROWS_AS(reduce_circuit(device(50, 0, 0, 0)),
                    DegenerateCircuitError);
  }
}

TEST_CASE("derived energy scales", "[circuit]") {
  SECTION("43 fF shunt gives the reduced charging energy") {
    ThreeNodeCircuit r;
    r.c_r_eff_ff = 50;
    r.c_q_eff_ff = 43;
    r.c_c_eff_ff = 1;
    r.e_lr_ghz = 8.0;
    r.e_l_chain_ghz = 0.24;
    r.e_j_ghz = 8.11;
    const auto e = derive_energies(r);
    CHECK(e.e_c_ghz == Approx(0.45047).margin(2e-4));
    CHECK(e.e_c_ghz == Approx(0.46).epsilon(0.05));
    CHECK(e.e_l_ghz == 0.24);
    CHECK(e.e_j_ghz == 8.11);
  }
  SECTION("charging energy is linear in 1/C") {
    ThreeNodeCircuit r;
    r.c_r_eff_ff = 50;
    r.c_q_eff_ff = 43;
    r.e_lr_ghz = 8.0;
    r.e_l_chain_ghz = 0.24;
    r.e_j_ghz = 8.11;
    const double e1 = derive_energies(r).e_c_ghz;
    r.c_q_eff_ff = 86;
    CHECK(derive_energies(r).e_c_ghz == Approx(0.5 * e1).epsilon(1e-14));
  }
  SECTION("resonator frequency round-trips through the LC formula") {
    ThreeNodeCircuit r;
    r.c_q_eff_ff = 43;
    r.c_r_eff_ff = 50;
    r.e_l_chain_ghz = 0.24;
    r.e_j_ghz = 8.11;
    const double target = 4.95;
    const double e_cr = constants::charging_energy_ghz(r.c_r_eff_ff);
    r.e_lr_ghz = target * target / (8.0 * e_cr);
    CHECK(derive_energies(r).nu_r_ghz == Approx(target).margin(1e-9));
  }
}

TEST_CASE("junction chain advisories", "[circuit]") {
  auto c = device();
  SECTION("no chain record") {
    const auto f = validate_chain(c);
    REQUIRE(f.size() == 1);
    CHECK(f[0].code == "not-applicable");
  }
  SECTION("healthy 100-junction array") {
    c.chain = JunctionChain{100, 6.8, 0.001};
    CHECK(validate_chain(c).empty());
  }
  SECTION("single junction trips the inductance-ratio advisory") {
    c.chain = JunctionChain{1, 680.0, 0.001};
    const auto f = validate_chain(c);
    REQUIRE(f.size() == 1);
    CHECK(f[0].code == "inductance-ratio");
  }
  SECTION("stray capacitance comparable to the shunt") {
    const double c_q_eff = reduce_circuit(c).c_q_eff_ff;
    c.chain = JunctionChain{100, 6.8, c_q_eff / 100.0};
    const auto f = validate_chain(c);
    REQUIRE(f.size() == 1);
    CHECK(f[0].code == "stray-capacitance");
  }
}

TEST_CASE("coupling capacitance bounds and monotonicity", "[circuit]") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = device(u(rng), u(rng), u(rng), u(rng));
    if (c.c_1_ff + c.c_2_ff + c.c_c_ff <= 0) continue;
    const auto r = reduce_circuit(c);
    CHECK(r.c_c_eff_ff >= 0.0);
    CHECK(r.c_c_eff_ff <= c.c_c_ff + 1e-12);
    CHECK(r.c_c_eff_ff <= std::min(c.c_2_ff, c.c_c_ff) + 1e-12);

    auto larger = c;
    larger.c_2_ff += 1.0;
    CHECK(reduce_circuit(larger).c_c_eff_ff >= r.c_c_eff_ff - 1e-12);
  }
}

TEST_CASE("reduction equals the Schur complement of the full matrix",
          "[circuit]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.1, 80.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = device(u(rng), u(rng), u(rng), u(rng));
    const Eigen::Matrix3d full = four_node_capacitance_matrix(c);
    const double c_t = full(1, 1);
    Eigen::Matrix2d schur;
    const int keep[2] = {0, 2};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        schur(i, j) =
            full(keep[i], keep[j]) - full(keep[i], 1) * full(1, keep[j]) / c_t;
    const Eigen::Matrix2d eff = reduced_capacitance_matrix(reduce_circuit(c));
    CHECK((schur - eff).cwiseAbs().maxCoeff() <=
          1e-12 * eff.cwiseAbs().maxCoeff());
  }
}
