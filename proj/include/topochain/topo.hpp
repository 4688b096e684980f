#pragma once

// Band structures and topological invariants.
//
// Winding number: closed form sgn(g0 g1 cos theta) and the discretized
// integral of n x d_q n over the Brillouin zone, with the integrand taken
// from analytic derivatives of (d_x, d_y).
//
// Chern numbers: gauge-invariant lattice field strength on the (q, theta)
// torus.  Plaquette phases Arg[U_q U_theta U_q^-1 U_theta^-1] built from
// overlaps of neighboring Bloch states sum to an exact multiple of 2*pi
// per band as long as the band stays gapped, so the result is
// integer-exact even on coarse grids and immune to eigensolver phases.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "topochain/errors.hpp"
#include "topochain/model.hpp"
#include "topochain/numerics.hpp"
#include "topochain/types.hpp"

namespace topochain::topo {

struct BandSpectrum {
  std::vector<double> qs;
  std::vector<double> thetas;
  RMatrix energies;             // (nq*ntheta) x p, ascending along each row
  std::vector<CMatrix> states;  // per grid point, columns are Bloch vectors
  double min_gap = 0.0;
  double min_gap_q = 0.0;
  double min_gap_theta = 0.0;

  int nq() const { return static_cast<int>(qs.size()); }
  int ntheta() const { return static_cast<int>(thetas.size()); }
  int index(int iq, int it) const { return iq * ntheta() + it; }
};

// eigh of the Bloch Hamiltonian on a uniform grid q in [0, 2pi),
// theta in spec.theta + [0, 2pi).  A single-point theta grid evaluates at
// spec.theta only.
inline BandSpectrum band_spectrum(const ChainSpec& spec, int nq, int ntheta) {
  spec.validate();
  if (nq < 2) throw std::invalid_argument("band_spectrum: nq must be >= 2");
  if (ntheta < 1) throw std::invalid_argument("band_spectrum: ntheta must be >= 1");

  BandSpectrum bs;
  bs.qs.resize(nq);
  bs.thetas.resize(ntheta);
  for (int iq = 0; iq < nq; ++iq) bs.qs[iq] = 2.0 * std::numbers::pi * iq / nq;
  for (int it = 0; it < ntheta; ++it) {
    bs.thetas[it] = spec.theta + 2.0 * std::numbers::pi * it / ntheta;
  }

  const int p = spec.cell_size;
  bs.energies.resize(nq * ntheta, p);
  bs.states.resize(static_cast<std::size_t>(nq) * ntheta);
  bs.min_gap = std::numeric_limits<double>::infinity();
  for (int iq = 0; iq < nq; ++iq) {
    for (int it = 0; it < ntheta; ++it) {
      const auto es = numerics::eigh(bloch_hamiltonian(spec, bs.qs[iq], bs.thetas[it]));
      const int g = bs.index(iq, it);
      bs.energies.row(g) = es.eigenvalues.transpose();
      bs.states[static_cast<std::size_t>(g)] = es.eigenvectors;
      for (int n = 0; n + 1 < p; ++n) {
        const double gap = es.eigenvalues[n + 1] - es.eigenvalues[n];
        if (gap < bs.min_gap) {
          bs.min_gap = gap;
          bs.min_gap_q = bs.qs[iq];
          bs.min_gap_theta = bs.thetas[it];
        }
      }
    }
  }
  return bs;
}

// Closed form for the two-band chain: 1 if g0 g1 cos(theta) > 0, else 0.
// At the gap-closing point the invariant is undefined.
inline int winding_number_analytic(double g0, double g1, double theta) {
  const double s = g0 * g1 * std::cos(theta);
  if (std::abs(s) <= 1e-12) {
    throw ContractError("winding number undefined: g0*g1*cos(theta) = 0 (gap closed)");
  }
  return s > 0.0 ? 1 : 0;
}

// Trapezoid discretization of (1/2pi) \oint dq (n x d_q n) with
// n = (d_x, d_y)/|d|, d_x = J1 + J2 cos q, d_y = J2 sin q.  The cross
// product reduces to (J2^2 + J1 J2 cos q) / |d|^2.
inline double winding_number_integral(double j1, double j2, int nk) {
  if (nk < 16) throw std::invalid_argument("winding_number_integral: nk must be >= 16");
  if (std::abs(std::abs(j1) - std::abs(j2)) <= 1e-12) {
    throw ContractError("winding number undefined: |J1| == |J2| (gap closed)");
  }
  double acc = 0.0;
  for (int i = 0; i < nk; ++i) {
    const double q = 2.0 * std::numbers::pi * i / nk;
    const double num = j2 * j2 + j1 * j2 * std::cos(q);
    const double den = j1 * j1 + j2 * j2 + 2.0 * j1 * j2 * std::cos(q);
    acc += num / den;
  }
  return acc / nk;
}

struct ChernSet {
  std::vector<int> chern;         // per band, ascending band order
  std::vector<double> field_sums; // raw plaquette sums / 2pi, before rounding
  double min_gap = 0.0;
  double min_gap_q = 0.0;
  double min_gap_theta = 0.0;
};

inline constexpr double kChernGapFloor = 1e-8;

// Lattice field-strength Chern numbers from a precomputed spectrum.  Exposed
// separately so tests can scramble the Bloch-state phases and verify gauge
// invariance.
inline ChernSet chern_from_spectrum(const BandSpectrum& bs) {
  const int nq = bs.nq();
  const int nt = bs.ntheta();
  if (nq < 12 || nt < 12) {
    throw std::invalid_argument("chern_from_spectrum: grid must be at least 12x12");
  }
  if (!(bs.min_gap > kChernGapFloor)) {
    throw ContractError("Chern numbers undefined: band gap " + std::to_string(bs.min_gap) +
                        " at (q = " + std::to_string(bs.min_gap_q) +
                        ", theta = " + std::to_string(bs.min_gap_theta) + ") closes on the grid");
  }
  const int p = static_cast<int>(bs.states.front().cols());

  ChernSet result;
  result.min_gap = bs.min_gap;
  result.min_gap_q = bs.min_gap_q;
  result.min_gap_theta = bs.min_gap_theta;
  result.chern.resize(p);
  result.field_sums.resize(p);

  for (int n = 0; n < p; ++n) {
    double total = 0.0;
    for (int iq = 0; iq < nq; ++iq) {
      const int iq1 = (iq + 1) % nq;
      for (int it = 0; it < nt; ++it) {
        const int it1 = (it + 1) % nt;
        const auto& u00 = bs.states[static_cast<std::size_t>(bs.index(iq, it))].col(n);
        const auto& u10 = bs.states[static_cast<std::size_t>(bs.index(iq1, it))].col(n);
        const auto& u01 = bs.states[static_cast<std::size_t>(bs.index(iq, it1))].col(n);
        const auto& u11 = bs.states[static_cast<std::size_t>(bs.index(iq1, it1))].col(n);
        const Complex plaquette = (u00.dot(u10)) * (u10.dot(u11)) * (u11.dot(u01)) * (u01.dot(u00));
        if (std::abs(plaquette) < 1e-30) {
          throw ContractError("Chern link variable vanished near (q = " + std::to_string(bs.qs[iq]) +
                              ", theta = " + std::to_string(bs.thetas[it]) + ")");
        }
        total += std::arg(plaquette);
      }
    }
    const double c = total / (2.0 * std::numbers::pi);
    const long rounded = std::lround(c);
    if (std::abs(c - static_cast<double>(rounded)) > 1e-6) {
      throw ContractError("Chern sum " + std::to_string(c) + " for band " + std::to_string(n + 1) +
                          " is not integer; grid too coarse for this spectrum");
    }
    result.field_sums[n] = c;
    result.chern[n] = static_cast<int>(rounded);
  }
  return result;
}

inline ChernSet chern_numbers(const ChainSpec& spec, int nq, int ntheta) {
  if (nq < 12 || ntheta < 12) {
    throw std::invalid_argument("chern_numbers: grid must be at least 12x12");
  }
  return chern_from_spectrum(band_spectrum(spec, nq, ntheta));
}

}  // namespace topochain::topo
