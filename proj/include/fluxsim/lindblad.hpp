#ifndef FLUXSIM_LINDBLAD_HPP
#define FLUXSIM_LINDBLAD_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fluxsim/constants.hpp"
#include "fluxsim/coupled.hpp"
#include "fluxsim/errors.hpp"
#include "fluxsim/sweep.hpp"

namespace fluxsim {

// Dissipation and drive settings of the driven master equation.  Rates are
// plain GHz; time in the evolution routines is measured in 1/GHz.
struct LindbladConfig {
  double temperature_k = 0.0;
  double kappa_ghz = 0.0;    // resonator rate constant
  double gamma_q_ghz = 0.0;  // fluxonium charge-channel rate constant
  double zeta_ghz = 0.0;     // drive amplitude
  double omega_d_ghz = 0.0;  // drive frequency

  void validate() const {
    if (temperature_k < 0) throw InputError("lindblad: temperature must be >= 0");
    if (kappa_ghz < 0 || gamma_q_ghz < 0 || zeta_ghz < 0)
      throw InputError("lindblad: kappa, gamma_q, zeta must be >= 0");
  }
};

// One decay channel: the eigenoperator component of a bath coupling at one
// transition frequency, with its thermal rate.  Degenerate transition
// frequencies share a channel (one collective jump operator), which is what
// keeps a harmonic ladder free of spurious dephasing.
struct JumpElement {
  int from = 0;
  int to = 0;
  complex amplitude{0.0, 0.0};
};

struct CollapseOp {
  double frequency_ghz = 0.0;        // signed transition frequency
  double rate_ghz = 0.0;             // bath constant x thermal factor
  std::vector<JumpElement> elements; // A = sum amplitude |to><from|
};

/// Total pairwise rate from -> to summed over channels, for diagnostics.
inline double total_pair_rate(const std::vector<CollapseOp>& channels,
                              int from, int to) {
  double rate = 0.0;
  for (const auto& c : channels)
    for (const auto& e : c.elements)
      if (e.from == from && e.to == to)
        rate += c.rate_ghz * std::norm(e.amplitude);
  return rate;
}

// Eigenbasis view of the coupled system used by the dissipative solver:
// energies, photon-like quantum numbers, and the resonator/charge operators
// rotated into the dressed basis (optionally truncated to the lowest states).
struct DressedOperators {
  Eigen::VectorXd energies_ghz;
  Eigen::VectorXi photon_like;
  Eigen::MatrixXcd a_op;   // 1 ⊗ a in the dressed basis
  Eigen::MatrixXcd n_op;   // N_q ⊗ 1 in the dressed basis
  std::vector<DressedProvenance> provenance;

  int size() const { return static_cast<int>(energies_ghz.size()); }
};

inline DressedOperators dressed_operators(const DressedSpectrum& ds,
                                          int max_states = -1) {
  const int dim = ds.size();
  const int keep = max_states > 0 ? std::min(max_states, dim) : dim;
  const int nq = ds.model.n_flux_levels, nph = ds.model.n_photons;

  const Eigen::MatrixXcd a_bare = detail::product_op(
      Eigen::MatrixXcd::Identity(nq, nq),
      detail::photon_annihilation(nph).cast<complex>());
  const Eigen::MatrixXcd n_bare = detail::product_op(
      charge_matrix(ds.fluxonium).topLeftCorner(nq, nq),
      Eigen::MatrixXcd::Identity(nph, nph));

  const Eigen::MatrixXcd u = ds.eigenvectors.leftCols(keep);
  DressedOperators out;
  out.energies_ghz = Eigen::Map<const Eigen::VectorXd>(ds.energies_ghz.data(), keep);
  out.a_op = u.adjoint() * a_bare * u;
  out.n_op = u.adjoint() * n_bare * u;
  out.photon_like.resize(keep);
  out.provenance.assign(ds.provenance.begin(), ds.provenance.begin() + keep);
  for (int d = 0; d < keep; ++d) out.photon_like(d) = ds.provenance[d].photons;
  return out;
}

/// Mean thermal occupation at |omega|; zero at T = 0.
inline double thermal_occupation(double omega_ghz, double temperature_k) {
  if (temperature_k <= 0.0) return 0.0;
  const double x = std::abs(omega_ghz) /
                   (constants::kb_over_h_ghz_per_k * temperature_k);
  return 1.0 / std::expm1(x);
}

/// Eigenoperator channels of the two baths: the resonator quadrature a + a†
/// weighted by kappa and the fluxonium charge weighted by Gamma.  Ordered
/// pairs (m -> n) with matching transition frequency join one channel; the
/// channel rate is the bath constant times n̄+1 (downward) or n̄ (upward).
/// Hermitian coupling operators give each up/down pair the detailed-balance
/// ratio exp(-beta omega) exactly.
inline std::vector<CollapseOp> collapse_operators(const DressedOperators& ops,
                                                  const LindbladConfig& cfg) {
  cfg.validate();
  const int dim = ops.size();
  const Eigen::MatrixXcd quad = ops.a_op + ops.a_op.adjoint();

  std::vector<CollapseOp> channels;
  auto bath = [&](const Eigen::MatrixXcd& coupling, double bath_rate) {
    if (bath_rate <= 0.0) return;
    struct Pair {
      double omega;
      JumpElement element;
    };
    std::vector<Pair> pairs;
    for (int m = 0; m < dim; ++m)
      for (int n = 0; n < dim; ++n) {
        if (n == m || coupling(n, m) == complex(0.0, 0.0)) continue;
        const double omega = ops.energies_ghz(m) - ops.energies_ghz(n);
        if (std::abs(omega) < 1e-12) continue;
        pairs.push_back({omega, {m, n, coupling(n, m)}});
      }
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& a, const Pair& b) { return a.omega < b.omega; });
    size_t i = 0;
    while (i < pairs.size()) {
      size_t j = i;
      while (j < pairs.size() && pairs[j].omega - pairs[i].omega < 1e-9) ++j;
      const double omega = pairs[i].omega;
      const double nbar = thermal_occupation(omega, cfg.temperature_k);
      const double rate = bath_rate * (omega > 0 ? nbar + 1.0 : nbar);
      if (rate > 0.0) {
        CollapseOp channel;
        channel.frequency_ghz = omega;
        channel.rate_ghz = rate;
        for (size_t k = i; k < j; ++k)
          channel.elements.push_back(pairs[k].element);
        channels.push_back(std::move(channel));
      }
      i = j;
    }
  };
  bath(quad, cfg.kappa_ghz);
  bath(ops.n_op, cfg.gamma_q_ghz);
  return channels;
}

inline std::vector<CollapseOp> collapse_operators(const DressedSpectrum& ds,
                                                  const LindbladConfig& cfg,
                                                  int max_states = -1) {
  return collapse_operators(dressed_operators(ds, max_states), cfg);
}

// Static effective Hamiltonian in the frame rotating at the drive frequency:
// dressed energies shifted by -omega_d x (photon-number-like operator), plus
// the co-rotating part of the resonator drive; counter-rotating terms
// dropped.  The photon-number-like operator counts absorbed drive quanta:
// each dressed state's excitation rank round((E - E_ground)/omega_d).  For
// product-like states this is the photon count; for hybridized states it
// keeps both polaritons of a manifold drive-connected, which a bare photon
// label would not.
struct RotatingFrame {
  Eigen::VectorXd h_diag_ghz;
  Eigen::VectorXi excitation;  // photon-number-like integer per dressed state
  Eigen::MatrixXcd drive;      // zeta (A + A†), A = rank-lowering part of a
  Eigen::MatrixXcd h_eff;      // diag + drive
  Eigen::MatrixXcd a_obs;      // full dressed a, for tr(a rho)
};

inline RotatingFrame rotating_frame(const DressedOperators& ops,
                                    double omega_d_ghz, double zeta_ghz) {
  const int dim = ops.size();
  if (!(omega_d_ghz > 0))
    throw InputError("rotating_frame: drive frequency must be > 0");
  RotatingFrame rf;
  rf.excitation.resize(dim);
  const double e0 = ops.energies_ghz.minCoeff();
  for (int d = 0; d < dim; ++d)
    rf.excitation(d) = static_cast<int>(
        std::lround((ops.energies_ghz(d) - e0) / omega_d_ghz));
  rf.h_diag_ghz = ops.energies_ghz -
                  omega_d_ghz * rf.excitation.cast<double>();
  Eigen::MatrixXcd lowering = Eigen::MatrixXcd::Zero(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r)
      if (rf.excitation(r) == rf.excitation(c) - 1)
        lowering(r, c) = ops.a_op(r, c);
  rf.drive = zeta_ghz * (lowering + lowering.adjoint());
  rf.h_eff = rf.drive;
  rf.h_eff.diagonal() += rf.h_diag_ghz.cast<complex>();
  rf.a_obs = ops.a_op;
  return rf;
}

inline RotatingFrame rotating_frame(const DressedSpectrum& ds,
                                    const LindbladConfig& cfg,
                                    int max_states = -1) {
  return rotating_frame(dressed_operators(ds, max_states), cfg.omega_d_ghz,
                        cfg.zeta_ghz);
}

using SparseL = Eigen::SparseMatrix<complex>;

/// Column-stacked superoperator of
///   ddt rho = -i[H, rho] + sum_c rate_c D[A_c].
inline SparseL liouvillian(const Eigen::MatrixXcd& h,
                           const std::vector<CollapseOp>& channels) {
  const int d = static_cast<int>(h.rows());
  const int dd = d * d;
  std::vector<Eigen::Triplet<complex>> trip;
  trip.reserve(static_cast<size_t>(4) * d * d + 16 * channels.size());

  const complex mi(0.0, -1.0);
  for (int c = 0; c < d; ++c)
    for (int rp = 0; rp < d; ++rp)
      for (int r = 0; r < d; ++r)
        if (h(r, rp) != complex(0, 0))
          trip.emplace_back(r + c * d, rp + c * d, mi * h(r, rp));
  for (int cp = 0; cp < d; ++cp)
    for (int c = 0; c < d; ++c)
      if (h(cp, c) != complex(0, 0))
        for (int r = 0; r < d; ++r)
          trip.emplace_back(r + c * d, r + cp * d, -mi * h(cp, c));

  for (const auto& channel : channels) {
    const double g = channel.rate_ghz;
    // Pump part: gamma conj(A) (x) A.
    for (const auto& t : channel.elements)
      for (const auto& u : channel.elements)
        trip.emplace_back(t.to + u.to * d, t.from + u.from * d,
                          g * t.amplitude * std::conj(u.amplitude));
    // Damping: -gamma/2 {A†A, rho} with M = A†A.
    std::map<std::pair<int, int>, complex> m_elems;
    for (const auto& t : channel.elements)
      for (const auto& u : channel.elements)
        if (t.to == u.to)
          m_elems[{t.from, u.from}] +=
              std::conj(t.amplitude) * u.amplitude;
    for (const auto& [key, value] : m_elems) {
      const auto [a, b] = key;
      for (int c = 0; c < d; ++c) {
        trip.emplace_back(a + c * d, b + c * d, -0.5 * g * value);
        trip.emplace_back(c + a * d, c + b * d, -0.5 * g * std::conj(value));
      }
    }
  }

  SparseL l(dd, dd);
  l.setFromTriplets(trip.begin(), trip.end());
  return l;
}

struct SteadyStateResult {
  Eigen::MatrixXcd rho;
  double residual = 0.0;        // ||L rho||_inf / max|L|
  double min_eigenvalue = 0.0;  // smallest eigenvalue of rho (not clipped)
};

namespace detail {

[[noreturn]] inline void diagnose_singular_liouvillian(const SparseL& l) {
  const int dd = static_cast<int>(l.rows());
  if (dd <= 1600) {
    Eigen::MatrixXcd dense(l);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * sv(0);
    int kernel = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) < tol) ++kernel;
    if (kernel > 1)
      throw DegenerateSteadyStateError(
          "steady_state: Liouvillian kernel dimension " + std::to_string(kernel) +
              " > 1, steady state is not unique",
          kernel);
    throw Error("steady_state: linear solve failed (kernel dimension " +
                std::to_string(kernel) + ")");
  }
  throw Error(
      "steady_state: linear solve failed; kernel may be degenerate (system too "
      "large to diagnose)");
}

}  // namespace detail

/// Kernel of the Liouvillian with tr(rho) = 1 imposed by row replacement.
inline SteadyStateResult steady_state(const Eigen::MatrixXcd& h_eff,
                                      const std::vector<CollapseOp>& jumps) {
  const int d = static_cast<int>(h_eff.rows());
  const int dd = d * d;
  const SparseL l = liouvillian(h_eff, jumps);

  // Trace row replaces the equation for vec index (0,0).
  SparseL sys = l;
  sys.prune([](int row, int, const complex&) { return row != 0; });
  std::vector<Eigen::Triplet<complex>> trace_row;
  for (int i = 0; i < d; ++i)
    trace_row.emplace_back(0, i + i * d, complex(1.0, 0.0));
  SparseL tr(dd, dd);
  tr.setFromTriplets(trace_row.begin(), trace_row.end());
  sys += tr;
  sys.makeCompressed();

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dd);
  rhs(0) = 1.0;

  Eigen::SparseLU<SparseL> solver;
  solver.compute(sys);
  if (solver.info() != Eigen::Success) detail::diagnose_singular_liouvillian(l);
  Eigen::VectorXcd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite())
    detail::diagnose_singular_liouvillian(l);

  double lmax = 1e-300;
  for (int k = 0; k < l.outerSize(); ++k)
    for (SparseL::InnerIterator it(l, k); it; ++it)
      lmax = std::max(lmax, std::abs(it.value()));
  const double res = (l * x).cwiseAbs().maxCoeff() / lmax;
  if (res > 1e-8) detail::diagnose_singular_liouvillian(l);

  SteadyStateResult out;
  out.rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), d, d);
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  const double trace = out.rho.trace().real();
  if (!(std::abs(trace - 1.0) < 1e-6))
    throw Error("steady_state: trace normalization failed");
  out.rho /= trace;
  out.residual = res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.rho,
                                                     Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

struct Trajectory {
  std::vector<double> times;             // units of 1/GHz
  std::vector<Eigen::MatrixXcd> states;  // sampled, last one at `duration`
};

/// Fixed-step RK4 integration of the master equation.  dt must resolve the
/// fastest Hamiltonian/rate scale (dt <= 0.1/scale).
inline Trajectory time_evolve(const Eigen::MatrixXcd& h_eff,
                              const std::vector<CollapseOp>& jumps,
                              const Eigen::MatrixXcd& rho0, double duration,
                              double dt, int max_samples = 81) {
  const int d = static_cast<int>(h_eff.rows());
  if (rho0.rows() != d || rho0.cols() != d)
    throw InputError("time_evolve: rho0 dimension mismatch");
  if (!(dt > 0) || !(duration >= 0))
    throw InputError("time_evolve: duration and dt must be positive");

  // The overall energy offset is gauge; the relevant Hamiltonian scale is
  // the diagonal spread plus the off-diagonal weight.
  double scale = 0.0;
  if (d > 0) {
    const double shift = h_eff.diagonal().real().mean();
    Eigen::MatrixXcd shifted = h_eff;
    shifted.diagonal().array() -= shift;
    for (int r = 0; r < d; ++r)
      scale = std::max(scale, shifted.cwiseAbs().row(r).sum());
    Eigen::VectorXd out_rate = Eigen::VectorXd::Zero(d);
    for (const auto& channel : jumps)
      for (const auto& e : channel.elements)
        out_rate(e.from) += channel.rate_ghz * std::norm(e.amplitude);
    scale = std::max(scale, out_rate.maxCoeff());
  }
  if (scale > 0 && dt > 0.1 / scale)
    throw InputError("time_evolve: dt too large for the fastest system scale");

  const SparseL l = liouvillian(h_eff, jumps);
  const long nsteps = duration > 0 ? std::lround(std::ceil(duration / dt)) : 0;
  const double step = nsteps > 0 ? duration / double(nsteps) : 0.0;
  const long stride = std::max(1L, nsteps / std::max(1, max_samples - 1));

  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d * d);
  Trajectory traj;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(Eigen::Map<Eigen::MatrixXcd>(x.data(), d, d));
  };
  record(0.0);
  for (long s = 1; s <= nsteps; ++s) {
    const Eigen::VectorXcd k1 = l * x;
    const Eigen::VectorXcd k2 = l * (x + 0.5 * step * k1);
    const Eigen::VectorXcd k3 = l * (x + 0.5 * step * k2);
    const Eigen::VectorXcd k4 = l * (x + step * k3);
    x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (s % stride == 0 || s == nsteps) record(s * step);
  }
  return traj;
}

struct CellFailure {
  int flux_index = 0;
  int freq_index = 0;
  std::string message;
};

struct TransmissionMap {
  std::vector<double> flux;
  std::vector<double> freq_ghz;
  Eigen::MatrixXd amplitude;  // nflux x nfreq, bare-resonator normalized
  std::vector<CellFailure> failures;
};

struct MapOptions {
  int max_dressed_states = 20;
  int workers = 1;
  long max_cells = 200000;
};

/// Steady-state amplitude of the bare (decoupled) resonator driven on
/// resonance, used to normalize transmission maps.
inline double bare_resonator_amplitude(const CoupledModel& model,
                                       const LindbladConfig& cfg) {
  const int nph = model.n_photons;
  DressedOperators ops;
  ops.energies_ghz.resize(nph);
  ops.photon_like.resize(nph);
  ops.a_op = detail::photon_annihilation(nph).cast<complex>();
  ops.n_op = Eigen::MatrixXcd::Zero(nph, nph);
  ops.provenance.resize(nph);
  for (int n = 0; n < nph; ++n) {
    ops.energies_ghz(n) = model.nu_r_ghz * n;
    ops.photon_like(n) = n;
  }
  const auto jumps = collapse_operators(ops, cfg);
  const auto rf = rotating_frame(ops, model.nu_r_ghz, cfg.zeta_ghz);
  const auto ss = steady_state(rf.h_eff, jumps);
  return std::abs((rf.a_obs * ss.rho).trace());
}

/// Flux x drive-frequency map of |tr(a rho_ss)| / bare amplitude.  Cells are
/// independent; failures are recorded per cell and leave NaN holes.
inline TransmissionMap single_tone_map(const CoupledModel& model,
                                       const LindbladConfig& cfg,
                                       const std::vector<double>& flux_grid,
                                       const std::vector<double>& freq_grid,
                                       const MapOptions& opt = {}) {
  model.validate();
  cfg.validate();
  const long cells = static_cast<long>(flux_grid.size()) *
                     static_cast<long>(freq_grid.size());
  if (cells == 0) throw InputError("single_tone_map: empty grid");
  if (cells > opt.max_cells)
    throw InputError("single_tone_map: grid exceeds the cell budget");

  TransmissionMap map;
  map.flux = flux_grid;
  map.freq_ghz = freq_grid;
  const int nflux = static_cast<int>(flux_grid.size());
  const int nfreq = static_cast<int>(freq_grid.size());
  map.amplitude.setConstant(nflux, nfreq,
                            std::numeric_limits<double>::quiet_NaN());

  const double norm = bare_resonator_amplitude(model, cfg);
  if (!(norm > 0))
    throw Error("single_tone_map: bare resonator amplitude is zero; cannot normalize");

  std::vector<std::vector<CellFailure>> failures(nflux);
  parallel_for_indexed(nflux, opt.workers, [&](int i) {
    CoupledModel m = model;
    m.fluxonium.phi_ext = flux_grid[i];
    DressedOperators ops;
    std::vector<CollapseOp> jumps;
    bool column_ok = true;
    std::string column_error;
    try {
      ops = dressed_operators(dressed_spectrum(m), opt.max_dressed_states);
      jumps = collapse_operators(ops, cfg);
    } catch (const std::exception& e) {
      column_ok = false;
      column_error = e.what();
    }
    for (int j = 0; j < nfreq; ++j) {
      if (!column_ok) {
        failures[i].push_back({i, j, column_error});
        continue;
      }
      try {
        const auto rf = rotating_frame(ops, freq_grid[j], cfg.zeta_ghz);
        const auto ss = steady_state(rf.h_eff, jumps);
        map.amplitude(i, j) = std::abs((rf.a_obs * ss.rho).trace()) / norm;
      } catch (const std::exception& e) {
        failures[i].push_back({i, j, e.what()});
      }
    }
  });
  for (auto& column : failures)
    map.failures.insert(map.failures.end(), column.begin(), column.end());
  return map;
}

}  // namespace fluxsim

#endif
