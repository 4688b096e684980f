#pragma once

// Quench dynamics of a single excitation in the p = 2 chain and the CED
// (center of excitation difference) readout of the winding number.
//
// Two CED series are recorded per run.  `values` holds the raw operator
// sum_x x (P^a_x - P^b_x), whose t = 0 value is the starting cell index.
// `values_rel` holds the same operator with cells renumbered about the
// starting cell, sum_x (x - x0)(P^a_x - P^b_x); this is the object the
// winding-number relations hold for verbatim, and it stays clean under
// bond disorder where the raw series picks up noise proportional to x0
// through the chiral charge.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "topochain/ensemble.hpp"
#include "topochain/errors.hpp"
#include "topochain/model.hpp"
#include "topochain/numerics.hpp"
#include "topochain/types.hpp"

namespace topochain::dynamics {

struct EvolutionTrace {
  std::vector<double> times;       // strictly increasing, units 1/g1
  std::vector<double> values;      // raw CED or CE samples, units of unit cells
  std::vector<double> values_rel;  // offset-corrected CED (quench traces only)
  std::vector<StateVector> snapshots;  // optional, clean runs only

  double start_cell = 0.0;  // cell index of the initial excitation
  // Earliest time a wavefront moving at 2*max|J| sites per unit time could
  // reach a chain end, and whether the recorded window extends past it.
  double edge_arrival_time = std::numeric_limits<double>::infinity();
  bool edge_window_flag = false;
  // Set when the run is outside the a-site readout contract (b-site start).
  bool outside_readout_contract = false;
};

// Basis state |g...e...g> with the excitation at (cell, sublattice), 1-based.
inline StateVector initial_bulk_excitation(const ChainSpec& spec, int cell, int sublattice) {
  spec.validate();
  StateVector psi = StateVector::Zero(spec.sites());
  psi[spec.site_index(cell, sublattice)] = Complex(1.0, 0.0);
  return psi;
}

// Position weights of the CED operator: +x on a-sites, -x on b-sites.
inline RVector ced_weights(const ChainSpec& spec) {
  if (spec.cell_size != 2) {
    throw ConfigError("CED is defined for the p = 2 chain, got p = " +
                      std::to_string(spec.cell_size));
  }
  RVector w(spec.sites());
  for (int x = 1; x <= spec.num_cells; ++x) {
    w[spec.site_index(x, 1)] = static_cast<double>(x);
    w[spec.site_index(x, 2)] = -static_cast<double>(x);
  }
  return w;
}

inline double ced_expectation(const StateVector& psi, const ChainSpec& spec) {
  const RVector w = ced_weights(spec);
  if (psi.size() != w.size()) {
    throw std::invalid_argument("ced_expectation: state dimension does not match chain");
  }
  return (w.array() * psi.array().abs2()).sum();
}

// Chiral charge sum_x (P^a_x - P^b_x).
inline double chiral_expectation(const StateVector& psi, const ChainSpec& spec) {
  if (spec.cell_size != 2) {
    throw ConfigError("chiral charge is defined for the p = 2 chain");
  }
  double g = 0.0;
  for (int x = 1; x <= spec.num_cells; ++x) {
    g += std::norm(psi[spec.site_index(x, 1)]) - std::norm(psi[spec.site_index(x, 2)]);
  }
  return g;
}

// CED with cells renumbered so the starting cell is the origin:
// <P_d> - x0 <Gamma>.
inline double ced_relative(const StateVector& psi, const ChainSpec& spec, int start_cell) {
  return ced_expectation(psi, spec) - start_cell * chiral_expectation(psi, spec);
}

namespace detail {

inline void require_quench_spec(const ChainSpec& spec) {
  spec.validate();
  if (spec.cell_size != 2) {
    throw ConfigError("quench protocol requires p = 2, got p = " + std::to_string(spec.cell_size));
  }
  if (spec.boundary != Boundary::kOpen) {
    throw ConfigError("quench protocol requires an open chain");
  }
}

inline double max_abs_bond(const CouplingProfile& profile) {
  double m = 0.0;
  for (double j : profile.bonds) m = std::max(m, std::abs(j));
  return m;
}

// Raw and offset-corrected CED on the given time grid for one coupling
// realization, packed as [raw..., rel...].
inline RVector quench_trace_values(const CouplingProfile& profile, const ChainSpec& spec,
                                   const StateVector& psi0, int start_cell,
                                   const std::vector<double>& times,
                                   std::vector<StateVector>* snapshots) {
  const auto es = numerics::eigh(realspace_hamiltonian(profile, spec.sites()));
  const Eigen::Index n = static_cast<Eigen::Index>(times.size());
  RVector values(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    const StateVector psi = t == 0.0 ? psi0 : numerics::evolve_spectral(es, psi0, t);
    const double raw = ced_expectation(psi, spec);
    values[i] = raw;
    values[n + i] = raw - start_cell * chiral_expectation(psi, spec);
    if (snapshots) snapshots->push_back(psi);
  }
  return values;
}

}  // namespace detail

// Evolves the basis state at (cell, sublattice) under the static chain
// Hamiltonian and records the CED on a uniform grid of n_samples points
// covering [0, t_max].  With disorder the returned series are the mean
// over disorder.samples realizations.
inline EvolutionTrace run_quench(const ChainSpec& spec, int cell, int sublattice, double t_max,
                                 int n_samples,
                                 const std::optional<DisorderSpec>& disorder = std::nullopt,
                                 bool record_snapshots = false) {
  detail::require_quench_spec(spec);
  if (!(t_max > 0.0)) throw std::invalid_argument("run_quench: t_max must be positive");
  if (n_samples < 2) throw std::invalid_argument("run_quench: need at least 2 time samples");

  EvolutionTrace trace;
  trace.times.resize(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    trace.times[static_cast<std::size_t>(i)] = t_max * i / (n_samples - 1);
  }
  trace.start_cell = cell;
  trace.outside_readout_contract = (sublattice != 1);

  const StateVector psi0 = initial_bulk_excitation(spec, cell, sublattice);
  const CouplingProfile clean = build_couplings(spec);

  // Edge-arrival guard at the Lieb-Robinson-style speed 2*max|J|.
  const int site0 = spec.site_index(cell, sublattice);
  const int dist = std::min(site0, spec.sites() - 1 - site0);
  const double w_half = disorder ? 0.5 * disorder->strength : 0.0;
  const double speed = 2.0 * (detail::max_abs_bond(clean) + w_half);
  trace.edge_arrival_time = speed > 0.0 ? dist / speed : std::numeric_limits<double>::infinity();
  trace.edge_window_flag = t_max > trace.edge_arrival_time;

  RVector packed;
  if (!disorder || disorder->strength == 0.0) {
    packed = detail::quench_trace_values(clean, spec, psi0, cell, trace.times,
                                         record_snapshots ? &trace.snapshots : nullptr);
  } else {
    const auto report = ensemble::run_ensemble(*disorder, [&](int sample) {
      const CouplingProfile profile = apply_disorder(clean, *disorder, sample);
      return detail::quench_trace_values(profile, spec, psi0, cell, trace.times, nullptr);
    });
    packed = report.mean;
  }
  trace.values.assign(packed.data(), packed.data() + n_samples);
  trace.values_rel.assign(packed.data() + n_samples, packed.data() + 2 * n_samples);
  return trace;
}

namespace detail {

inline double trapezoid_average(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.empty() || values.size() != times.size()) {
    throw std::invalid_argument("trapezoid_average: empty or inconsistent trace");
  }
  if (times.size() == 1) return values.front();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    acc += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
  }
  return acc / (times.back() - times.front());
}

}  // namespace detail

// Trapezoid time average of the CED relative to the starting cell: uses the
// offset-corrected series when the trace carries one, otherwise the plain
// values.  Doubling the result estimates the winding number.
inline double time_averaged_ced(const EvolutionTrace& trace) {
  const auto& v = trace.values_rel.empty() ? trace.values : trace.values_rel;
  return detail::trapezoid_average(trace.times, v);
}

// Plain trapezoid average of the raw recorded series.
inline double raw_time_average(const EvolutionTrace& trace) {
  return detail::trapezoid_average(trace.times, trace.values);
}

// t_c(s) = (2s+1) pi / (4 sqrt(J1^2 + J2^2)) for s = 0..s_max.
inline std::vector<double> critical_times(double j1, double j2, int s_max) {
  if (s_max < 0) throw std::invalid_argument("critical_times: s_max must be >= 0");
  const double norm = std::sqrt(j1 * j1 + j2 * j2);
  if (!(norm > 0.0)) throw std::invalid_argument("critical_times: J1 and J2 cannot both vanish");
  std::vector<double> ts(static_cast<std::size_t>(s_max) + 1);
  for (int s = 0; s <= s_max; ++s) {
    ts[static_cast<std::size_t>(s)] = (2.0 * s + 1.0) * std::numbers::pi / (4.0 * norm);
  }
  return ts;
}

// Single-shot readout nu = 2 * P_d(t_c) with the offset-corrected CED.
// With disorder the readout is the ensemble mean.
inline double winding_from_critical_time(const ChainSpec& spec, double t_c, int cell,
                                         int sublattice = 1,
                                         const std::optional<DisorderSpec>& disorder = std::nullopt) {
  detail::require_quench_spec(spec);
  if (!(t_c >= 0.0)) throw std::invalid_argument("winding_from_critical_time: t_c must be >= 0");

  const StateVector psi0 = initial_bulk_excitation(spec, cell, sublattice);
  const CouplingProfile clean = build_couplings(spec);

  const auto readout = [&](const CouplingProfile& profile) {
    const auto es = numerics::eigh(realspace_hamiltonian(profile, spec.sites()));
    const StateVector psi = numerics::evolve_spectral(es, psi0, t_c);
    return ced_relative(psi, spec, cell);
  };

  if (!disorder || disorder->strength == 0.0) return 2.0 * readout(clean);

  const auto report = ensemble::run_ensemble(*disorder, [&](int sample) {
    RVector out(1);
    out[0] = readout(apply_disorder(clean, *disorder, sample));
    return out;
  });
  return 2.0 * report.mean[0];
}

}  // namespace topochain::dynamics
