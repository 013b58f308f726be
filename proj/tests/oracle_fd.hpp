#ifndef FLUXSIM_TESTS_ORACLE_FD_HPP
#define FLUXSIM_TESTS_ORACLE_FD_HPP

// Finite-difference grid oracle for the single-body problem.  Everything here
// is independent of the library's oscillator-basis route: the Hamiltonian is
// discretized on a phase grid, eigenvalues come from Sturm-sequence bisection
// on the tridiagonal matrix, eigenvectors from banded inverse iteration, and
// matrix elements from quadrature.

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "fluxsim/fluxonium.hpp"

namespace fdtest {

struct Grid {
  std::vector<double> phi;
  double h = 0.0;
};

struct FdProblem {
  Grid grid;
  std::vector<double> diag;  // tridiagonal main diagonal
  double off = 0.0;          // constant off-diagonal -4 E_C / h^2
};

inline FdProblem discretize(const fluxsim::FluxoniumParams& p, int npts,
                            double span) {
  FdProblem out;
  out.grid.phi.resize(npts);
  out.grid.h = 2.0 * span / (npts - 1);
  out.diag.resize(npts);
  const double kinetic = 4.0 * p.e_c_ghz / (out.grid.h * out.grid.h);
  for (int i = 0; i < npts; ++i) {
    const double phi = -span + i * out.grid.h;
    out.grid.phi[i] = phi;
    out.diag[i] = 2.0 * kinetic + fluxsim::potential_ghz(p, phi);
  }
  out.off = -kinetic;
  return out;
}

// Number of eigenvalues strictly below lambda (Sturm sequence count).
inline int count_below(const FdProblem& f, double lambda) {
  const double e2 = f.off * f.off;
  int count = 0;
  double q = f.diag[0] - lambda;
  if (q < 0) ++count;
  for (size_t i = 1; i < f.diag.size(); ++i) {
    double denom = q;
    if (std::abs(denom) < 1e-300) denom = denom < 0 ? -1e-300 : 1e-300;
    q = f.diag[i] - lambda - e2 / denom;
    if (q < 0) ++count;
  }
  return count;
}

inline std::vector<double> lowest_eigenvalues(const FdProblem& f, int k) {
  double lo = f.diag[0], hi = f.diag[0];
  for (double d : f.diag) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  lo -= 2.0 * std::abs(f.off) + 1.0;
  double top = lo + 1.0;
  while (count_below(f, top) < k) top = lo + 2.0 * (top - lo) + 1.0;

  std::vector<double> vals(k);
  for (int j = 0; j < k; ++j) {
    double a = lo, b = top;
    for (int it = 0; it < 200 && (b - a) > 1e-11 * (1.0 + std::abs(b)); ++it) {
      const double mid = 0.5 * (a + b);
      if (count_below(f, mid) >= j + 1) b = mid;
      else a = mid;
    }
    vals[j] = 0.5 * (a + b);
  }
  return vals;
}

// Solves (T - sigma I) x = b by Gaussian elimination with partial pivoting on
// the tridiagonal band (one fill-in superdiagonal).
inline std::vector<double> shifted_solve(const FdProblem& f, double sigma,
                                         std::vector<double> b) {
  const int n = static_cast<int>(f.diag.size());
  std::vector<double> sub(n, f.off), main(n), sup(n, f.off), sup2(n, 0.0);
  for (int i = 0; i < n; ++i) main[i] = f.diag[i] - sigma;
  sub[0] = 0.0;
  sup[n - 1] = 0.0;

  for (int i = 0; i < n - 1; ++i) {
    if (std::abs(sub[i + 1]) > std::abs(main[i])) {
      std::swap(main[i], sub[i + 1]);
      std::swap(sup[i], main[i + 1]);
      std::swap(sup2[i], sup[i + 1]);
      std::swap(b[i], b[i + 1]);
    }
    if (main[i] == 0.0) main[i] = 1e-300;
    const double m = sub[i + 1] / main[i];
    main[i + 1] -= m * sup[i];
    sup[i + 1] -= m * sup2[i];
    b[i + 1] -= m * b[i];
  }
  if (main[n - 1] == 0.0) main[n - 1] = 1e-300;
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double v = b[i];
    if (i + 1 < n) v -= sup[i] * x[i + 1];
    if (i + 2 < n) v -= sup2[i] * x[i + 2];
    x[i] = v / main[i];
  }
  return x;
}

// Grid eigenfunction by inverse iteration, normalized to unit quadrature.
inline std::vector<double> eigenvector(const FdProblem& f, double lambda,
                                       unsigned seed = 7) {
  const int n = static_cast<int>(f.diag.size());
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  const double sigma = lambda + 1e-9 * (1.0 + std::abs(lambda));
  for (int it = 0; it < 4; ++it) {
    x = shifted_solve(f, sigma, x);
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (auto& v : x) v /= norm;
  }
  for (auto& v : x) v /= std::sqrt(f.grid.h);  // l2 -> quadrature norm
  // Sign convention: positive at the largest-amplitude point.
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
  if (x[imax] < 0)
    for (auto& v : x) v = -v;
  return x;
}

// |<a| -i d/dphi |b>| by central differences + trapezoid quadrature.
inline double charge_element_abs(const Grid& g, const std::vector<double>& a,
                                 const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 1; i + 1 < a.size(); ++i)
    acc += a[i] * (b[i + 1] - b[i - 1]) / (2.0 * g.h) * g.h;
  return std::abs(acc);
}

inline double expectation(const Grid& g, const std::vector<double>& psi,
                          const std::vector<double>& observable) {
  double acc = 0.0;
  for (size_t i = 0; i < psi.size(); ++i)
    acc += psi[i] * psi[i] * observable[i] * g.h;
  return acc;
}

// Adaptive resolution: enough points that the h^2 discretization error of the
// lowest `k` levels stays well under `tol`, and a span that keeps them bound.
inline FdProblem discretize_auto(const fluxsim::FluxoniumParams& p, int k,
                                 double tol = 2e-5) {
  const double nu_p =
      std::sqrt(8.0 * (p.e_j_ghz + p.e_l_ghz) * p.e_c_ghz);
  const double e_top = (k + 4) * nu_p + 10.0;
  double span = std::max(8.0 * fluxsim::constants::pi,
                         std::sqrt(2.0 * e_top / p.e_l_ghz) + 6.0);
  span = std::min(span, 40.0 * fluxsim::constants::pi);
  const double n_zpf_sq =
      0.25 * std::sqrt((p.e_j_ghz + p.e_l_ghz) / (2.0 * p.e_c_ghz));
  const double n4 = 3.0 * std::pow((2.0 * (k + 2) + 1.0) * n_zpf_sq, 2.0);
  const double h = std::sqrt(tol / std::max(1.0, p.e_c_ghz / 3.0 * n4));
  int npts = static_cast<int>(std::ceil(2.0 * span / h)) + 1;
  npts = std::clamp(npts, 6001, 160001);
  return discretize(p, npts, span);
}

}  // namespace fdtest

#endif
