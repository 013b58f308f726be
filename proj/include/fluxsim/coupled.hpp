#ifndef FLUXSIM_COUPLED_HPP
#define FLUXSIM_COUPLED_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fluxsim/errors.hpp"
#include "fluxsim/fluxonium.hpp"

namespace fluxsim {

// Fluxonium + readout resonator:
//   H = H_f + nu_r a†a + g N_q (a + a†)
// in the product basis |fluxonium eigenstate j> ⊗ |photon n>, with N_q the
// fluxonium charge matrix in its own eigenbasis.  Product index = j*n_photons + n.
struct CoupledModel {
  FluxoniumParams fluxonium;
  double nu_r_ghz = 0.0;
  double g_ghz = 0.0;
  int n_flux_levels = 9;
  int n_photons = 5;
  BasisConfig basis;

  void validate() const {
    fluxonium.validate();
    if (!(nu_r_ghz > 0)) throw InputError("coupled: nu_r must be > 0");
    if (g_ghz < 0) throw InputError("coupled: g must be >= 0");
    if (n_flux_levels < 3) throw InputError("coupled: n_flux_levels must be >= 3");
    if (n_photons < 2) throw InputError("coupled: n_photons must be >= 2");
  }
};

struct DressedProvenance {
  StateLabel fluxonium_label;
  int photons = 0;
  double overlap = 0.0;   // weight of the dominant bare product state
  bool continuous = true; // false when overlap-following was ambiguous
  int runner_up = -1;     // competing predecessor when ambiguous

  std::string text() const {
    return fluxonium_label.text() + "@" + std::to_string(photons);
  }
};

struct DressedSpectrum {
  std::vector<double> energies_ghz;  // ascending
  Eigen::MatrixXcd eigenvectors;     // (nq*nph) x D, bare-product-basis columns
  std::vector<DressedProvenance> provenance;
  Spectrum fluxonium;
  CoupledModel model;

  int size() const { return static_cast<int>(energies_ghz.size()); }

  int find(int well, int plasmon, int photons) const {
    for (int d = 0; d < size(); ++d) {
      const auto& p = provenance[d];
      if (p.fluxonium_label.well == well && p.fluxonium_label.plasmon == plasmon &&
          p.photons == photons)
        return d;
    }
    return -1;
  }
};

struct TransitionRecord {
  int initial = 0;
  int final = 0;
  std::string initial_label;
  std::string final_label;
  double frequency_ghz = 0.0;  // drive frequency (half the gap for order 2)
  int photon_order = 1;
  double weight = 0.0;
  double charge_weight = 0.0;  // order-1 split: |<f|N⊗1|i>|^2
  double photon_weight = 0.0;  //               |<f|1⊗(a+a†)|i>|^2
};

struct TransitionCatalog {
  double flux = 0.0;
  std::vector<TransitionRecord> records;
};

namespace detail {

inline Eigen::MatrixXd photon_annihilation(int nph) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nph, nph);
  for (int n = 1; n < nph; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

// kron(Aq, Aph) for the product index j*nph + n.
inline Eigen::MatrixXcd product_op(const Eigen::MatrixXcd& aq,
                                   const Eigen::MatrixXcd& aph) {
  const int nq = static_cast<int>(aq.rows());
  const int nph = static_cast<int>(aph.rows());
  Eigen::MatrixXcd out(nq * nph, nq * nph);
  for (int j = 0; j < nq; ++j)
    for (int k = 0; k < nq; ++k)
      out.block(j * nph, k * nph, nph, nph) = aq(j, k) * aph;
  return out;
}

}  // namespace detail

inline Eigen::MatrixXcd build_coupled(const CoupledModel& model,
                                      const Spectrum& spec) {
  model.validate();
  if (spec.size() < model.n_flux_levels)
    throw InputError("build_coupled: spectrum has fewer states than n_flux_levels");
  const int nq = model.n_flux_levels;
  const int nph = model.n_photons;
  const Eigen::MatrixXcd n_q = charge_matrix(spec).topLeftCorner(nq, nq);
  const Eigen::MatrixXd a = detail::photon_annihilation(nph);
  const Eigen::MatrixXd x = a + a.transpose();

  Eigen::MatrixXcd h = model.g_ghz * detail::product_op(n_q, x.cast<complex>());
  for (int j = 0; j < nq; ++j)
    for (int n = 0; n < nph; ++n)
      h(j * nph + n, j * nph + n) +=
          spec.energies_ghz[j] + model.nu_r_ghz * n;
  return 0.5 * (h + h.adjoint()).eval();
}

/// Dressed eigensystem at the model's flux with dominant-bare provenance.
inline DressedSpectrum dressed_spectrum(const CoupledModel& model) {
  CoupledModel m = model;
  m.validate();
  const Spectrum spec = diagonalize(m.fluxonium, m.basis, m.n_flux_levels);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(build_coupled(m, spec));

  DressedSpectrum out;
  out.model = m;
  out.fluxonium = spec;
  const int dim = m.n_flux_levels * m.n_photons;
  out.energies_ghz.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  out.eigenvectors = es.eigenvectors();
  out.provenance.resize(dim);
  for (int d = 0; d < dim; ++d) {
    int best = 0;
    double w = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double p = std::norm(out.eigenvectors(i, d));
      if (p > w) { w = p; best = i; }
    }
    out.provenance[d].fluxonium_label = spec.labels[best / m.n_photons];
    out.provenance[d].photons = best % m.n_photons;
    out.provenance[d].overlap = w;
  }
  return out;
}

/// Dressed spectra along a flux grid with state-following: labels propagate
/// from point to point by maximal eigenvector overlap, evaluated in the
/// flux-independent oscillator ⊗ Fock frame so that crossings of bare
/// fluxonium levels do not scramble identities.
inline std::vector<DressedSpectrum> dressed_sweep(
    const CoupledModel& model, const std::vector<double>& flux_grid) {
  std::vector<DressedSpectrum> sweep;
  sweep.reserve(flux_grid.size());
  Eigen::MatrixXd v_prev;          // oscillator-basis fluxonium eigenvectors
  Eigen::MatrixXcd c_prev;         // dressed coefficients at previous point

  for (double f : flux_grid) {
    CoupledModel m = model;
    m.fluxonium.phi_ext = f;
    DressedSpectrum ds = dressed_spectrum(m);
    const int nq = m.n_flux_levels, nph = m.n_photons, dim = nq * nph;
    const Eigen::MatrixXd v_cur = ds.fluxonium.eigenvectors.leftCols(nq);

    if (!sweep.empty()) {
      const int rows = static_cast<int>(
          std::min(v_prev.rows(), v_cur.rows()));
      const Eigen::MatrixXd mix =
          v_prev.topRows(rows).transpose() * v_cur.topRows(rows);
      // Overlap(prev d', cur d) = c_prev(d')† (mix ⊗ I_ph) c_cur(d).
      Eigen::MatrixXcd transformed(dim, dim);
      for (int d = 0; d < dim; ++d) {
        Eigen::Map<const Eigen::MatrixXcd> cd(ds.eigenvectors.col(d).data(),
                                              nph, nq);
        Eigen::MatrixXcd t = cd * mix.transpose().cast<complex>();
        transformed.col(d) = Eigen::Map<Eigen::VectorXcd>(t.data(), dim);
      }
      const Eigen::MatrixXd overlap = (c_prev.adjoint() * transformed).cwiseAbs();

      const auto& prev = sweep.back();
      for (int d = 0; d < dim; ++d) {
        int best = 0, second = -1;
        for (int p = 1; p < dim; ++p)
          if (overlap(p, d) > overlap(best, d)) best = p;
        for (int p = 0; p < dim; ++p)
          if (p != best && (second < 0 || overlap(p, d) > overlap(second, d)))
            second = p;
        auto& pr = ds.provenance[d];
        const auto& source = prev.provenance[best];
        pr.fluxonium_label.well = source.fluxonium_label.well;
        pr.fluxonium_label.plasmon = source.fluxonium_label.plasmon;
        pr.photons = source.photons;
        pr.continuous = source.continuous;
        if (second >= 0 && overlap(best, d) > 0 &&
            (overlap(best, d) - overlap(second, d)) < 0.01 * overlap(best, d)) {
          pr.continuous = false;
          pr.runner_up = second;
        }
      }
    }
    v_prev = v_cur;
    c_prev = ds.eigenvectors;
    sweep.push_back(std::move(ds));
  }
  return sweep;
}

struct StateSelector {
  int well = 0;
  int plasmon = 0;
  int photons = 0;

  // Parses "g0@0", "e-1@1", "f1@0".
  static StateSelector parse(const std::string& text) {
    static const std::string letters = "gefhij";
    const auto at = text.find('@');
    if (text.empty() || at == std::string::npos || at < 2)
      throw InputError("state selector: expected <letter><well>@<photons>, got '" +
                       text + "'");
    const auto lp = letters.find(text[0]);
    if (lp == std::string::npos)
      throw InputError("state selector: unknown plasmon letter in '" + text + "'");
    StateSelector s;
    s.plasmon = static_cast<int>(lp);
    s.well = std::stoi(text.substr(1, at - 1));
    s.photons = std::stoi(text.substr(at + 1));
    return s;
  }
};

struct CatalogOptions {
  int max_photon_order = 2;
  double detuning_floor_ghz = 1e-3;  // clamps intermediate-state denominators
  double min_weight = 0.0;
};

/// Drive-accessible transitions out of one dressed state: order-1 entries use
/// the charge and photon drive elements; order-2 entries are listed at half
/// the gap with second-order perturbative weights.
inline TransitionCatalog transition_catalog(const DressedSpectrum& ds,
                                            const StateSelector& initial,
                                            const CatalogOptions& opt = {}) {
  const int dim = ds.size();
  const int i0 = ds.find(initial.well, initial.plasmon, initial.photons);
  if (i0 < 0)
    throw LabelError("transition_catalog: initial state not found at this flux");

  const int nq = ds.model.n_flux_levels, nph = ds.model.n_photons;
  const Eigen::MatrixXcd n_q =
      charge_matrix(ds.fluxonium).topLeftCorner(nq, nq);
  const Eigen::MatrixXd aph = detail::photon_annihilation(nph);
  const Eigen::MatrixXcd charge_op = detail::product_op(
      n_q, Eigen::MatrixXcd::Identity(nph, nph));
  const Eigen::MatrixXcd photon_op = detail::product_op(
      Eigen::MatrixXcd::Identity(nq, nq), (aph + aph.transpose()).cast<complex>());

  const Eigen::MatrixXcd& u = ds.eigenvectors;
  const Eigen::MatrixXcd charge_d = u.adjoint() * charge_op * u;
  const Eigen::MatrixXcd photon_d = u.adjoint() * photon_op * u;
  const Eigen::MatrixXcd drive_d = charge_d + photon_d;

  TransitionCatalog cat;
  cat.flux = ds.model.fluxonium.phi_ext;
  const double e0 = ds.energies_ghz[i0];
  for (int f = 0; f < dim; ++f) {
    if (f == i0) continue;
    const double gap = ds.energies_ghz[f] - e0;
    if (gap <= 0) continue;
    TransitionRecord rec;
    rec.initial = i0;
    rec.final = f;
    rec.initial_label = ds.provenance[i0].text();
    rec.final_label = ds.provenance[f].text();
    rec.frequency_ghz = gap;
    rec.photon_order = 1;
    rec.charge_weight = std::norm(charge_d(f, i0));
    rec.photon_weight = std::norm(photon_d(f, i0));
    rec.weight = rec.charge_weight + rec.photon_weight;
    if (rec.weight >= opt.min_weight) cat.records.push_back(rec);

    if (opt.max_photon_order >= 2) {
      const double omega = 0.5 * gap;
      complex amp{0.0, 0.0};
      for (int v = 0; v < dim; ++v) {
        if (v == i0 || v == f) continue;
        double den = ds.energies_ghz[v] - e0 - omega;
        if (std::abs(den) < opt.detuning_floor_ghz)
          den = den >= 0 ? opt.detuning_floor_ghz : -opt.detuning_floor_ghz;
        amp += drive_d(f, v) * drive_d(v, i0) / den;
      }
      TransitionRecord two = rec;
      two.photon_order = 2;
      two.frequency_ghz = omega;
      two.charge_weight = 0.0;
      two.photon_weight = 0.0;
      two.weight = std::norm(amp);
      if (two.weight >= opt.min_weight) cat.records.push_back(two);
    }
  }
  std::sort(cat.records.begin(), cat.records.end(),
            [](const TransitionRecord& a, const TransitionRecord& b) {
              return a.frequency_ghz < b.frequency_ghz;
            });
  return cat;
}

inline TransitionCatalog transition_catalog(const CoupledModel& model,
                                            double flux,
                                            const StateSelector& initial,
                                            const CatalogOptions& opt = {}) {
  CoupledModel m = model;
  m.fluxonium.phi_ext = flux;
  return transition_catalog(dressed_spectrum(m), initial, opt);
}

}  // namespace fluxsim

#endif
