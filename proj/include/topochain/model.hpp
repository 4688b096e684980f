#pragma once

// Chain model construction: the cosine coupling law J_k = g0 + g1*cos(2*pi*k/p
// + theta), reproducible bond disorder, and the real-space / Bloch
// Hamiltonians assembled from a coupling profile.
//
// Site layout: site i = p*(x-1) + s for cell x in 1..N and sublattice
// s in 1..p (1-based); stored 0-based.  Bond k couples site k to site k+1,
// and for a periodic chain bond L closes the ring back to site 1.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "topochain/errors.hpp"
#include "topochain/types.hpp"

namespace topochain {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum class Boundary { kOpen, kPeriodic };

inline std::string to_string(Boundary b) {
  return b == Boundary::kOpen ? "open" : "periodic";
}

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::kOpen;
  if (s == "periodic") return Boundary::kPeriodic;
  throw ConfigError("unknown boundary '" + s + "' (expected 'open' or 'periodic')");
}

struct ChainSpec {
  int cell_size = 2;   // p, sites per unit cell
  int num_cells = 1;   // N
  double g0 = 1.0;     // constant coupling, in units of g1
  double g1 = 1.0;     // modulation amplitude; the global energy unit
  double theta = 0.0;  // modulation phase, radians
  Boundary boundary = Boundary::kOpen;

  int sites() const { return cell_size * num_cells; }
  int bond_count() const { return boundary == Boundary::kOpen ? sites() - 1 : sites(); }

  void validate() const {
    if (cell_size < 2) throw ConfigError("ChainSpec: p must be >= 2, got " + std::to_string(cell_size));
    if (num_cells < 1) throw ConfigError("ChainSpec: N must be >= 1, got " + std::to_string(num_cells));
  }

  // 1-based (cell, sublattice) -> 0-based site index.
  int site_index(int cell, int sublattice) const {
    if (cell < 1 || cell > num_cells) {
      throw std::invalid_argument("cell index " + std::to_string(cell) + " outside 1.." +
                                  std::to_string(num_cells));
    }
    if (sublattice < 1 || sublattice > cell_size) {
      throw std::invalid_argument("sublattice index " + std::to_string(sublattice) + " outside 1.." +
                                  std::to_string(cell_size));
    }
    return cell_size * (cell - 1) + (sublattice - 1);
  }
};

struct CouplingProfile {
  std::vector<double> bonds;  // bonds[k-1] couples site k to site k+1 (1-based k)
  Boundary boundary = Boundary::kOpen;
};

struct DisorderSpec {
  double strength = 0.0;  // W, in units of g1
  std::uint64_t seed = kDefaultSeed;
  int samples = 1;

  void validate() const {
    if (strength < 0.0) throw ConfigError("DisorderSpec: W must be >= 0");
    if (samples < 1) throw ConfigError("DisorderSpec: samples must be >= 1");
  }
};

// Coupling law, 1-based bond index.  The index is reduced mod p before the
// cosine so that J_{k+p} == J_k holds exactly, not just to rounding.
inline double coupling_value(int p, double g0, double g1, double theta, int k) {
  const int r = ((k % p) + p) % p;
  return g0 + g1 * std::cos(2.0 * std::numbers::pi * r / p + theta);
}

inline CouplingProfile build_couplings(const ChainSpec& spec) {
  spec.validate();
  CouplingProfile profile;
  profile.boundary = spec.boundary;
  const int nb = spec.bond_count();
  profile.bonds.resize(nb);
  for (int k = 1; k <= nb; ++k) {
    profile.bonds[k - 1] = coupling_value(spec.cell_size, spec.g0, spec.g1, spec.theta, k);
  }
  return profile;
}

// Intracell / intercell couplings (J1, J2) of the two-site chain.
inline std::pair<double, double> ssh_couplings(const ChainSpec& spec) {
  if (spec.cell_size != 2) {
    throw std::invalid_argument("ssh_couplings: defined for p = 2 chains only");
  }
  return {coupling_value(2, spec.g0, spec.g1, spec.theta, 1),
          coupling_value(2, spec.g0, spec.g1, spec.theta, 2)};
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based uniform draw on [-0.5, 0.5], keyed on (seed, sample, bond).
// No generator state: every draw is addressable, so ensembles are
// reproducible and independent of evaluation order.
inline double disorder_draw(std::uint64_t seed, std::uint64_t sample, std::uint64_t bond) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ sample);
  h = detail::splitmix64(h ^ bond);
  return static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5;
}

// Additive bond perturbations W * delta_k for one disorder realization.
inline std::vector<double> disorder_offsets(const DisorderSpec& disorder, int sample_index,
                                            int bond_count) {
  disorder.validate();
  if (sample_index < 0 || sample_index >= disorder.samples) {
    throw std::invalid_argument("sample_index " + std::to_string(sample_index) + " outside 0.." +
                                std::to_string(disorder.samples - 1));
  }
  std::vector<double> offsets(bond_count);
  for (int k = 0; k < bond_count; ++k) {
    offsets[k] = disorder.strength *
                 disorder_draw(disorder.seed, static_cast<std::uint64_t>(sample_index),
                               static_cast<std::uint64_t>(k));
  }
  return offsets;
}

inline CouplingProfile apply_disorder(const CouplingProfile& profile, const DisorderSpec& disorder,
                                      int sample_index) {
  disorder.validate();
  if (sample_index < 0 || sample_index >= disorder.samples) {
    throw std::invalid_argument("sample_index " + std::to_string(sample_index) + " outside 0.." +
                                std::to_string(disorder.samples - 1));
  }
  if (disorder.strength == 0.0) return profile;  // bit-for-bit unchanged
  CouplingProfile out = profile;
  const auto offsets = disorder_offsets(disorder, sample_index, static_cast<int>(profile.bonds.size()));
  for (std::size_t k = 0; k < out.bonds.size(); ++k) out.bonds[k] += offsets[k];
  return out;
}

// Single-excitation hopping matrix: off-diagonal (k, k+1) = J_k, zero
// diagonal (constant qubit frequencies dropped), corner entries for a
// periodic chain.
inline CMatrix realspace_hamiltonian(const CouplingProfile& profile, int num_sites) {
  const int expected = profile.boundary == Boundary::kOpen ? num_sites - 1 : num_sites;
  if (static_cast<int>(profile.bonds.size()) != expected) {
    throw std::invalid_argument("realspace_hamiltonian: profile has " +
                                std::to_string(profile.bonds.size()) + " bonds, expected " +
                                std::to_string(expected) + " for " + to_string(profile.boundary) +
                                " boundary with L = " + std::to_string(num_sites));
  }
  CMatrix h = CMatrix::Zero(num_sites, num_sites);
  for (int k = 0; k < static_cast<int>(profile.bonds.size()); ++k) {
    const int a = k;
    const int b = (k + 1) % num_sites;
    h(a, b) += profile.bonds[k];
    h(b, a) += profile.bonds[k];
  }
  return h;
}

// Bloch Hamiltonian at cell quasimomentum q in [0, 2pi): entries
// (s, s+1) = J_s for s = 1..p-1 and corner (p, 1) = J_p e^{+iq}, plus
// Hermitian conjugates.  For p = 2 this is d_x tau_x + d_y tau_y with
// d_x = J1 + J2 cos q and d_y = J2 sin q.
inline CMatrix bloch_hamiltonian(const ChainSpec& spec, double q, double theta) {
  spec.validate();
  const int p = spec.cell_size;
  CMatrix h = CMatrix::Zero(p, p);
  for (int s = 1; s < p; ++s) {
    const double j = coupling_value(p, spec.g0, spec.g1, theta, s);
    h(s - 1, s) += j;
    h(s, s - 1) += j;
  }
  const double jp = coupling_value(p, spec.g0, spec.g1, theta, p);
  const Complex phase = std::polar(1.0, q);
  h(p - 1, 0) += jp * phase;
  h(0, p - 1) += jp * std::conj(phase);
  return h;
}

inline CMatrix bloch_hamiltonian(const ChainSpec& spec, double q) {
  return bloch_hamiltonian(spec, q, spec.theta);
}

inline double state_norm_error(const StateVector& psi) { return std::abs(psi.norm() - 1.0); }

}  // namespace topochain
