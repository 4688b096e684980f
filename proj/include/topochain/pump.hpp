#pragma once

// Adiabatic topological pumping in the p = 3 chain: single-cell chi_n
// eigenstates, the theta(t) = Omega t + phi0 ramp, CE tracking, and the
// quantized-shift extraction over one pumping period.
//
// Preparation happens at the decoupled-cell point theta = phi0 = pi where
// the chi_n states are exact eigenstates of the full chain.  During the
// ramp an adiabaticity monitor tracks the overlap of the evolving state
// with the instantaneous n-th band block (the n-th group of N eigenvectors
// in ascending energy order); dropping below 0.9 flags the run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "topochain/dynamics.hpp"
#include "topochain/ensemble.hpp"
#include "topochain/errors.hpp"
#include "topochain/model.hpp"
#include "topochain/numerics.hpp"
#include "topochain/types.hpp"

namespace topochain::pump {

inline constexpr double kAdiabaticOverlapFloor = 0.9;
inline constexpr double kPreparationResidualTol = 1e-8;

struct PumpSchedule {
  double omega = 0.39;               // ramp rate, units of g1
  double phi0 = std::numbers::pi;    // initial phase theta(0)
  int cycles = 1;
  int steps_per_cycle = 4096;

  double period() const { return 2.0 * std::numbers::pi / omega; }
  double theta_at(double t) const { return omega * t + phi0; }

  void validate() const {
    if (!(omega > 0.0)) throw ConfigError("PumpSchedule: omega must be positive");
    if (cycles < 1) throw ConfigError("PumpSchedule: cycles must be >= 1");
    if (steps_per_cycle < 1) throw ConfigError("PumpSchedule: steps_per_cycle must be >= 1");
  }
};

// Single-cell eigenstates at the decoupled point (J1 = J2 = J, J3 = 0):
//   chi_1 = (1, -sqrt2, 1)/2,  chi_2 = (1, 0, -1)/sqrt2,  chi_3 = (1, +sqrt2, 1)/2
// with energies -sqrt2 J, 0, +sqrt2 J.
inline StateVector chi_state(int n) {
  StateVector chi(3);
  const double r = std::numbers::sqrt2;
  switch (n) {
    case 1: chi << 0.5, -r / 2.0, 0.5; break;
    case 2: chi << 1.0 / r, 0.0, -1.0 / r; break;
    case 3: chi << 0.5, r / 2.0, 0.5; break;
    default:
      throw std::invalid_argument("chi_state: band index must be 1, 2 or 3, got " +
                                  std::to_string(n));
  }
  return chi;
}

// Embeds chi_n into the chosen cell, all other qubits in the ground state.
inline StateVector prepare_pump_state(const ChainSpec& spec, int cell, int n) {
  spec.validate();
  if (spec.cell_size != 3) {
    throw ConfigError("prepare_pump_state: chi states are defined for p = 3, got p = " +
                      std::to_string(spec.cell_size));
  }
  const StateVector chi = chi_state(n);
  StateVector psi = StateVector::Zero(spec.sites());
  const int base = spec.site_index(cell, 1);
  psi.segment(base, 3) = chi;
  return psi;
}

// CE weights: +x on every sublattice of cell x (any p).
inline RVector ce_weights(const ChainSpec& spec) {
  RVector w(spec.sites());
  for (int x = 1; x <= spec.num_cells; ++x) {
    for (int s = 1; s <= spec.cell_size; ++s) {
      w[spec.site_index(x, s)] = static_cast<double>(x);
    }
  }
  return w;
}

inline double ce_expectation(const StateVector& psi, const ChainSpec& spec) {
  const RVector w = ce_weights(spec);
  if (psi.size() != w.size()) {
    throw std::invalid_argument("ce_expectation: state dimension does not match chain");
  }
  return (w.array() * psi.array().abs2()).sum();
}

struct PumpResult {
  dynamics::EvolutionTrace trace;  // CE samples across the ramp
  double shift = 0.0;              // CE(end) - CE(0)
  double shift_stderr = 0.0;       // over disorder samples (0 for clean runs)
  int band_index = 0;
  std::optional<int> chern_reference;

  double min_band_overlap = 1.0;
  bool adiabaticity_flag = false;

  double preparation_residual = 0.0;  // ||H psi0 - <H> psi0|| at t = 0, clean chain
  bool eigenstate_flag = false;       // initial state is not an eigenstate (theta(0) != pi)
};

namespace detail {

struct SamplePumpOutcome {
  RVector ce_values;  // length total_steps + 1
  double min_band_overlap = 1.0;
};

// One ramp for one (possibly disordered) coupling realization.
inline SamplePumpOutcome pump_sample(const ChainSpec& spec, const PumpSchedule& schedule,
                                     const StateVector& psi0, int band,
                                     const std::vector<double>& bond_offsets) {
  const int sites = spec.sites();
  const int cells = spec.num_cells;
  const int total_steps = schedule.cycles * schedule.steps_per_cycle;
  const double t_end = schedule.cycles * schedule.period();
  const RVector weights = ce_weights(spec);

  const auto h_of_t = [&](double t) {
    ChainSpec at_t = spec;
    at_t.theta = schedule.theta_at(t);
    CouplingProfile profile = build_couplings(at_t);
    for (std::size_t k = 0; k < bond_offsets.size(); ++k) profile.bonds[k] += bond_offsets[k];
    return realspace_hamiltonian(profile, sites);
  };

  SamplePumpOutcome out;
  out.ce_values.resize(total_steps + 1);
  out.ce_values[0] = (weights.array() * psi0.array().abs2()).sum();

  const auto observer = [&](int step, double /*t*/, const numerics::EigenSystem& es,
                            const StateVector& psi) {
    out.ce_values[step + 1] = (weights.array() * psi.array().abs2()).sum();
    const auto block = es.eigenvectors.middleCols((band - 1) * cells, cells);
    const double overlap = (block.adjoint() * psi).squaredNorm();
    out.min_band_overlap = std::min(out.min_band_overlap, overlap);
  };

  const StateVector psi_end =
      numerics::evolve_schedule(h_of_t, psi0, 0.0, t_end, total_steps, observer);
  if (state_norm_error(psi_end) > 1e-9) {
    throw ContractError("pump evolution lost unitarity: |norm - 1| = " +
                        std::to_string(state_norm_error(psi_end)));
  }
  return out;
}

struct ShiftStats {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

// Per-sample CE(end) - CE(0) statistics from a trace ensemble.
inline ShiftStats shift_statistics(const ensemble::EnsembleReport& report) {
  std::vector<double> shifts(report.sample_values.size());
  for (std::size_t s = 0; s < report.sample_values.size(); ++s) {
    const auto& v = report.sample_values[s];
    shifts[s] = v[v.size() - 1] - v[0];
  }
  ShiftStats st;
  st.mean = ensemble::pairwise_sum(shifts) / static_cast<double>(shifts.size());
  if (shifts.size() > 1) {
    std::vector<double> sq(shifts.size());
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      sq[s] = (shifts[s] - st.mean) * (shifts[s] - st.mean);
    }
    const double var = ensemble::pairwise_sum(sq) / static_cast<double>(shifts.size() - 1);
    st.stderr_of_mean = std::sqrt(var / static_cast<double>(shifts.size()));
  }
  return st;
}

}  // namespace detail

// Raw CE-trace ensemble of the disordered pump; the mean trace and its
// stderr feed the plateau tables.
inline ensemble::EnsembleReport pump_ce_ensemble(const ChainSpec& spec,
                                                 const PumpSchedule& schedule, int cell, int band,
                                                 const DisorderSpec& disorder,
                                                 std::vector<double>* min_overlaps = nullptr) {
  const StateVector psi0 = prepare_pump_state(spec, cell, band);
  const int bonds = spec.bond_count();
  if (min_overlaps) min_overlaps->assign(static_cast<std::size_t>(disorder.samples), 1.0);
  return ensemble::run_ensemble(disorder, [&](int sample) {
    const std::vector<double> offsets = disorder_offsets(disorder, sample, bonds);
    auto outcome = detail::pump_sample(spec, schedule, psi0, band, offsets);
    if (min_overlaps) (*min_overlaps)[static_cast<std::size_t>(sample)] = outcome.min_band_overlap;
    return outcome.ce_values;
  });
}

// Evolves the prepared chi_n state across `cycles` ramp periods, sampling
// the CE after every integrator step.  With disorder, the trace is the
// ensemble mean and the shift carries its standard error.
inline PumpResult run_pump(const ChainSpec& spec, const PumpSchedule& schedule, int cell, int band,
                           const std::optional<DisorderSpec>& disorder = std::nullopt) {
  spec.validate();
  schedule.validate();
  if (band < 1 || band > 3) {
    throw std::invalid_argument("run_pump: band index must be 1, 2 or 3");
  }
  if (std::abs(spec.theta - schedule.phi0) > 1e-6) {
    throw ConfigError("run_pump: chain theta must equal the ramp phase phi0 so the prepared state "
                      "is an eigenstate at t = 0");
  }

  const StateVector psi0 = prepare_pump_state(spec, cell, band);
  const int total_steps = schedule.cycles * schedule.steps_per_cycle;
  const double t_end = schedule.cycles * schedule.period();

  PumpResult result;
  result.band_index = band;

  // Preparation contract: psi0 must be an eigenstate of the clean chain at
  // theta(0).  Holds exactly at phi0 = pi where the cells decouple.
  {
    const CMatrix h0 = realspace_hamiltonian(build_couplings(spec), spec.sites());
    const Complex energy = psi0.dot(h0 * psi0);
    result.preparation_residual = (h0 * psi0 - energy * psi0).norm();
    result.eigenstate_flag = result.preparation_residual > kPreparationResidualTol;
  }

  result.trace.times.resize(static_cast<std::size_t>(total_steps) + 1);
  for (int i = 0; i <= total_steps; ++i) {
    result.trace.times[static_cast<std::size_t>(i)] = t_end * i / total_steps;
  }
  result.trace.start_cell = cell;

  if (!disorder || disorder->strength == 0.0) {
    auto outcome = detail::pump_sample(spec, schedule, psi0, band, {});
    result.trace.values.assign(outcome.ce_values.data(),
                               outcome.ce_values.data() + outcome.ce_values.size());
    result.min_band_overlap = outcome.min_band_overlap;
  } else {
    std::vector<double> overlaps;
    const auto report = pump_ce_ensemble(spec, schedule, cell, band, *disorder, &overlaps);
    result.trace.values.assign(report.mean.data(), report.mean.data() + report.mean.size());
    result.min_band_overlap = *std::min_element(overlaps.begin(), overlaps.end());
    result.shift_stderr = detail::shift_statistics(report).stderr_of_mean;
  }

  result.shift = result.trace.values.back() - result.trace.values.front();
  result.adiabaticity_flag = result.min_band_overlap < kAdiabaticOverlapFloor;
  return result;
}

struct PlateauRow {
  double strength = 0.0;  // W
  double shift = 0.0;     // delta P_n, ensemble mean
  double stderr_of_shift = 0.0;
  double min_band_overlap = 1.0;
};

// delta P_n versus imperfection strength: one disorder-averaged pump per W.
inline std::vector<PlateauRow> disorder_plateau_sweep(const ChainSpec& spec,
                                                      const PumpSchedule& schedule, int cell,
                                                      int band, const std::vector<double>& w_list,
                                                      const DisorderSpec& base) {
  for (double w : w_list) {
    if (w < 0.0) throw ConfigError("disorder_plateau_sweep: W values must be >= 0");
  }
  std::vector<std::vector<double>> all_overlaps;
  const auto table = ensemble::sweep(w_list, [&](double w) {
    DisorderSpec d = base;
    d.strength = w;
    std::vector<double> overlaps;
    auto report = pump_ce_ensemble(spec, schedule, cell, band, d, &overlaps);
    all_overlaps.push_back(std::move(overlaps));
    return report;
  });

  std::vector<PlateauRow> rows;
  rows.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& [w, report] = table[i];
    PlateauRow row;
    row.strength = w;
    row.min_band_overlap = *std::min_element(all_overlaps[i].begin(), all_overlaps[i].end());
    const auto stats = detail::shift_statistics(report);
    row.shift = stats.mean;
    row.stderr_of_shift = stats.stderr_of_mean;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace topochain::pump
