#ifndef FLUXSIM_FLUXONIUM_HPP
#define FLUXSIM_FLUXONIUM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fluxsim/constants.hpp"
#include "fluxsim/errors.hpp"

namespace fluxsim {

using complex = std::complex<double>;

// Single-body fluxonium:
//   H = 4 E_C n^2 - E_J cos(phi - 2 pi Phi_ext/Phi0) + E_L phi^2 / 2
// with n = -i d/dphi, so [phi, n] = i.  All energies in GHz (h = 1).
struct FluxoniumParams {
  double e_c_ghz = 0.0;
  double e_j_ghz = 0.0;
  double e_l_ghz = 0.0;
  double phi_ext = 0.0;  // external flux in units of Phi0

  void validate() const {
    if (!(e_c_ghz > 0) || !(e_j_ghz > 0) || !(e_l_ghz > 0))
      throw InputError("fluxonium: e_c, e_j, e_l must all be > 0");
    if (!std::isfinite(phi_ext))
      throw InputError("fluxonium: phi_ext must be finite");
  }
};

enum class ZeroPointScale {
  inductive,  // oscillator of the E_L term; cosine is a bounded displacement
  plasma,     // oscillator of the E_J + E_L well curvature
};

struct BasisConfig {
  int n_basis = 120;
  ZeroPointScale scale = ZeroPointScale::inductive;

  void validate() const {
    if (n_basis < 10) throw InputError("basis: n_basis must be >= 10");
  }
};

// Well (fluxoid) and intra-well (plasmon) indices with the captured
// probability mass as the confidence.  Labels with confidence < 0.75 should
// be treated as mixed (the state straddles wells).
struct StateLabel {
  int well = 0;
  int plasmon = 0;
  double confidence = 0.0;

  bool mixed() const { return confidence < 0.75; }

  // Compact text form: plasmon letter + well index, e.g. "g0", "e-1", "f1".
  // Mixed labels carry a trailing '~'.
  std::string text() const {
    static const char* letters = "gefhij";
    std::string s = plasmon < 6 ? std::string(1, letters[plasmon])
                                : "p" + std::to_string(plasmon);
    s += std::to_string(well);
    if (mixed()) s += "~";
    return s;
  }
};

enum class FluxoniumOperator { charge, phase };

struct Spectrum {
  std::vector<double> energies_ghz;   // ascending, lowest k states
  Eigen::MatrixXd eigenvectors;       // n_basis x k, oscillator-basis columns
  std::vector<StateLabel> labels;
  FluxoniumParams params;
  BasisConfig basis;
  double phi_zpf = 0.0;
  double n_zpf = 0.0;

  int size() const { return static_cast<int>(energies_ghz.size()); }
};

inline double potential_ghz(const FluxoniumParams& p, double phi) {
  const double theta = constants::two_pi * p.phi_ext;
  return -p.e_j_ghz * std::cos(phi - theta) + 0.5 * p.e_l_ghz * phi * phi;
}

namespace detail {

// Flux-independent operator blocks for one (params, basis) combination.
// cos(phi) and sin(phi) come from the spectral decomposition of the
// truncated phi matrix, which keeps exp(i phi) exactly unitary.
struct HarmonicWorkspace {
  int n = 0;
  double phi_zpf = 0.0;
  double n_zpf = 0.0;
  double nu0 = 0.0;           // oscillator spacing of the quadratic part
  double curvature_shift = 0.0;  // plasma scale borrows (scale_el - e_l)/2 phi^2
  Eigen::MatrixXd cos_phi;
  Eigen::MatrixXd sin_phi;
  Eigen::MatrixXd phi_op;     // phi_zpf (a + a†)
  Eigen::MatrixXd n_imag;     // n = i * n_imag, with n_imag = n_zpf (a† - a)
  Eigen::MatrixXd phi_sq;

  HarmonicWorkspace(const FluxoniumParams& p, int n_basis, ZeroPointScale scale)
      : n(n_basis) {
    const double scale_el = scale == ZeroPointScale::inductive
                                ? p.e_l_ghz
                                : p.e_j_ghz + p.e_l_ghz;
    phi_zpf = std::pow(2.0 * p.e_c_ghz / scale_el, 0.25);
    n_zpf = 0.5 / phi_zpf;
    nu0 = std::sqrt(8.0 * scale_el * p.e_c_ghz);
    curvature_shift = 0.5 * (p.e_l_ghz - scale_el);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    phi_op = phi_zpf * (a + a.transpose());
    n_imag = n_zpf * (a.transpose() - a);
    phi_sq = phi_op * phi_op;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(phi_op);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    cos_phi = v * lam.array().cos().matrix().asDiagonal() * v.transpose();
    sin_phi = v * lam.array().sin().matrix().asDiagonal() * v.transpose();
    cos_phi = 0.5 * (cos_phi + cos_phi.transpose()).eval();
    sin_phi = 0.5 * (sin_phi + sin_phi.transpose()).eval();
  }
};

inline const HarmonicWorkspace& workspace(const FluxoniumParams& p,
                                          int n_basis, ZeroPointScale scale) {
  using Key = std::tuple<double, double, double, int, int>;
  thread_local std::map<Key, HarmonicWorkspace> cache;
  const Key key{p.e_c_ghz, p.e_j_ghz, p.e_l_ghz, n_basis,
                static_cast<int>(scale)};
  auto it = cache.find(key);
  if (it == cache.end()) {
    if (cache.size() > 16) cache.clear();
    it = cache.emplace(key, HarmonicWorkspace(p, n_basis, scale)).first;
  }
  return it->second;
}

inline Eigen::MatrixXd assemble(const HarmonicWorkspace& w,
                                const FluxoniumParams& p) {
  const double theta = constants::two_pi * p.phi_ext;
  Eigen::MatrixXd h =
      -p.e_j_ghz * (std::cos(theta) * w.cos_phi + std::sin(theta) * w.sin_phi);
  if (w.curvature_shift != 0.0) h += w.curvature_shift * w.phi_sq;
  for (int k = 0; k < w.n; ++k) h(k, k) += w.nu0 * (k + 0.5);
  return h;
}

}  // namespace detail

inline Eigen::MatrixXd build_hamiltonian(const FluxoniumParams& params,
                                         const BasisConfig& basis) {
  params.validate();
  basis.validate();
  return detail::assemble(
      detail::workspace(params, basis.n_basis, basis.scale), params);
}

// Positions of the potential minima, index m near phi = 2 pi m, shifted by
// the inductive current (Newton refinement of the first-order Stark result).
inline std::vector<std::pair<int, double>> well_minima(
    const FluxoniumParams& p, int max_abs_well = 3) {
  const double theta = constants::two_pi * p.phi_ext;
  std::vector<std::pair<int, double>> minima;
  for (int m = -max_abs_well; m <= max_abs_well; ++m) {
    double phi = (theta + constants::two_pi * m) *
                 (p.e_j_ghz / (p.e_j_ghz + p.e_l_ghz));
    bool ok = true;
    for (int it = 0; it < 50; ++it) {
      const double g = p.e_j_ghz * std::sin(phi - theta) + p.e_l_ghz * phi;
      const double h = p.e_j_ghz * std::cos(phi - theta) + p.e_l_ghz;
      if (h <= 0) { ok = false; break; }  // inflection: no well here
      const double step = g / h;
      phi -= step;
      if (std::abs(step) < 1e-12) break;
    }
    if (!ok) continue;
    // Keep only true minima that still belong to this branch.
    const int m_back = static_cast<int>(std::lround(
        (phi * (p.e_j_ghz + p.e_l_ghz) / p.e_j_ghz - theta) / constants::two_pi));
    if (m_back != m) continue;
    minima.emplace_back(m, phi);
  }
  if (minima.empty()) minima.emplace_back(0, 0.0);
  std::sort(minima.begin(), minima.end(),
            [](auto& a, auto& b) { return a.second < b.second; });
  return minima;
}

inline Eigen::MatrixXd wavefunction_basis_matrix(const Spectrum& spec,
                                                 const std::vector<double>& phi_grid);

inline std::vector<StateLabel> label_states(const Spectrum& spec);

/// Lowest-k eigensystem with a convergence check: the solve is repeated at
/// n_basis + 20 and accepted only if the retained energies moved by less than
/// 1e-6 GHz; otherwise the basis is doubled once before giving up.
inline Spectrum diagonalize(const FluxoniumParams& params,
                            const BasisConfig& basis, int k = 12) {
  params.validate();
  basis.validate();
  if (k < 1) throw InputError("diagonalize: k must be >= 1");

  auto solve = [&](int n) {
    const auto& w = detail::workspace(params, n, basis.scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::assemble(w, params));
    return std::make_pair(es.eigenvalues(), es.eigenvectors());
  };

  int n = std::max(basis.n_basis, k + 2);
  std::vector<double> last, refined;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto [e1, v1] = solve(n);
    auto [e2, v2] = solve(n + 20);
    double drift = 0.0;
    for (int i = 0; i < k; ++i) drift = std::max(drift, std::abs(e1(i) - e2(i)));
    last.assign(e1.data(), e1.data() + k);
    refined.assign(e2.data(), e2.data() + k);
    if (drift < 1e-6) {
      Spectrum spec;
      spec.params = params;
      spec.basis = basis;
      spec.basis.n_basis = n + 20;
      const auto& w = detail::workspace(params, n + 20, basis.scale);
      spec.phi_zpf = w.phi_zpf;
      spec.n_zpf = w.n_zpf;
      spec.energies_ghz.assign(e2.data(), e2.data() + k);
      spec.eigenvectors = v2.leftCols(k);
      spec.labels = label_states(spec);
      return spec;
    }
    n *= 2;
  }
  throw ConvergenceError(
      "diagonalize: spectrum not converged after basis doubling", last, refined);
}

/// psi_k(phi) on a caller-supplied grid; physically normalized, so the
/// trapezoidal norm over an adequate grid comes out 1 to ~1e-3.
inline Eigen::VectorXcd eval_wavefunction(const Spectrum& spec, int state_index,
                                          const std::vector<double>& phi_grid) {
  if (state_index < 0 || state_index >= spec.size())
    throw InputError("eval_wavefunction: state index out of range");
  for (size_t i = 1; i < phi_grid.size(); ++i)
    if (!(phi_grid[i] > phi_grid[i - 1]))
      throw InputError("eval_wavefunction: phi grid must be strictly ascending");
  const Eigen::MatrixXd basis_vals = wavefunction_basis_matrix(spec, phi_grid);
  Eigen::VectorXd psi = basis_vals * spec.eigenvectors.col(state_index);
  return psi.cast<complex>();
}

// Oscillator eigenfunctions evaluated on the grid (rows: grid, cols: basis),
// via the stable normalized-Hermite recurrence.
inline Eigen::MatrixXd wavefunction_basis_matrix(
    const Spectrum& spec, const std::vector<double>& phi_grid) {
  const int npts = static_cast<int>(phi_grid.size());
  const int n = static_cast<int>(spec.eigenvectors.rows());
  const double width = std::sqrt(2.0) * spec.phi_zpf;
  Eigen::MatrixXd out(npts, n);
  const double norm0 = std::pow(constants::pi, -0.25) / std::sqrt(width);
  for (int i = 0; i < npts; ++i) {
    const double u = phi_grid[i] / width;
    double hm2 = norm0 * std::exp(-0.5 * u * u);
    out(i, 0) = hm2;
    if (n == 1) continue;
    double hm1 = std::sqrt(2.0) * u * hm2;
    out(i, 1) = hm1;
    for (int m = 2; m < n; ++m) {
      const double h = std::sqrt(2.0 / m) * u * hm1 -
                       std::sqrt(double(m - 1) / m) * hm2;
      out(i, m) = h;
      hm2 = hm1;
      hm1 = h;
    }
  }
  return out;
}

/// <i|O|j> in the eigenbasis.  Charge elements are purely imaginary for the
/// real eigenvectors used here; phase elements purely real.
inline complex matrix_element(const Spectrum& spec, FluxoniumOperator op,
                              int i, int j) {
  if (i < 0 || j < 0 || i >= spec.size() || j >= spec.size())
    throw InputError("matrix_element: state index out of range");
  const auto& w = detail::workspace(spec.params, spec.basis.n_basis,
                                    spec.basis.scale);
  const Eigen::VectorXd vi = spec.eigenvectors.col(i);
  const Eigen::VectorXd vj = spec.eigenvectors.col(j);
  if (op == FluxoniumOperator::phase) return complex(vi.dot(w.phi_op * vj), 0.0);
  return complex(0.0, vi.dot(w.n_imag * vj));
}

/// Charge matrix (k x k) in the eigenbasis; feeds the coupled-system model.
inline Eigen::MatrixXcd charge_matrix(const Spectrum& spec) {
  const auto& w = detail::workspace(spec.params, spec.basis.n_basis,
                                    spec.basis.scale);
  const Eigen::MatrixXd m =
      spec.eigenvectors.transpose() * (w.n_imag * spec.eigenvectors);
  return complex(0.0, 1.0) * m.cast<complex>();
}

inline std::vector<StateLabel> label_states(const Spectrum& spec) {
  const auto minima = well_minima(spec.params);
  // Segment boundaries halfway between adjacent minima, open at the ends.
  std::vector<double> bounds;
  for (size_t i = 0; i + 1 < minima.size(); ++i)
    bounds.push_back(0.5 * (minima[i].second + minima[i + 1].second));

  const double span = std::abs(minima.back().second) +
                      std::abs(minima.front().second) + 2.0 * constants::two_pi;
  const int npts = 1200;
  std::vector<double> grid(npts);
  const double lo = -0.5 * span - 1.0, hi = 0.5 * span + 1.0;
  for (int i = 0; i < npts; ++i)
    grid[i] = lo + (hi - lo) * i / (npts - 1);
  const double dphi = grid[1] - grid[0];

  const Eigen::MatrixXd basis_vals = wavefunction_basis_matrix(spec, grid);
  const Eigen::MatrixXd psi = basis_vals * spec.eigenvectors;

  const int k = spec.size();
  std::vector<StateLabel> labels(k);
  std::vector<int> well_of(k);
  for (int s = 0; s < k; ++s) {
    std::vector<double> mass(minima.size(), 0.0);
    double total = 0.0;
    for (int i = 0; i < npts; ++i) {
      const double p = psi(i, s) * psi(i, s) * dphi;
      total += p;
      size_t seg = 0;
      while (seg < bounds.size() && grid[i] > bounds[seg]) ++seg;
      mass[seg] += p;
    }
    size_t best = 0;
    for (size_t w = 1; w < mass.size(); ++w)
      if (mass[w] > mass[best]) best = w;
    well_of[s] = minima[best].first;
    labels[s].well = minima[best].first;
    labels[s].confidence =
        total > 0 ? std::clamp(mass[best] / total, 0.0, 1.0) : 0.0;
  }
  // Plasmon index: energy rank among states sharing the well.
  std::map<int, int> rank;
  for (int s = 0; s < k; ++s) labels[s].plasmon = rank[well_of[s]]++;
  return labels;
}

enum class DoubletPair { ground, excited };

/// Tunnel coupling t of the requested doublet at Phi_ext = Phi0/2, i.e. half
/// the avoided-crossing gap between the symmetric/antisymmetric combinations
/// (gap = 2t).  The ground doublet is the lowest two states; the excited
/// doublet is found from the labels of the two degenerate wells.
inline double tunnel_splitting(const FluxoniumParams& params,
                               const BasisConfig& basis, DoubletPair pair) {
  FluxoniumParams p = params;
  p.phi_ext = 0.5;
  const Spectrum spec = diagonalize(p, basis, 8);
  if (pair == DoubletPair::ground)
    return 0.5 * (spec.energies_ghz[1] - spec.energies_ghz[0]);

  // The two wells degenerate at half flux are those of the lowest two states.
  const int w0 = spec.labels[0].well;
  const int w1 = spec.labels[1].well;
  std::vector<int> members;
  for (int s = 2; s < spec.size(); ++s)
    if (spec.labels[s].well == w0 || spec.labels[s].well == w1)
      members.push_back(s);
  if (members.size() < 2)
    throw IdentificationError(
        "tunnel_splitting: excited doublet not identifiable from labels");
  const int a = members[0], b = members[1];
  const double gap = spec.energies_ghz[b] - spec.energies_ghz[a];
  const double below = spec.energies_ghz[a] - spec.energies_ghz[a - 1];
  const double above = b + 1 < spec.size()
                           ? spec.energies_ghz[b + 1] - spec.energies_ghz[b]
                           : below;
  if (b != a + 1 || gap > 0.25 * std::min(below, above))
    throw IdentificationError(
        "tunnel_splitting: candidate excited states do not form a doublet");
  return 0.5 * gap;
}

}  // namespace fluxsim

#endif
