#pragma once

// Protocol executors shared by the CLI subcommands and the figure presets.
// These wrap the library calls into result bundles that the writers turn
// into trace.csv / table.csv / summary.json artifacts.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topochain/config.hpp"
#include "topochain/dynamics.hpp"
#include "topochain/ensemble.hpp"
#include "topochain/model.hpp"
#include "topochain/pump.hpp"
#include "topochain/topo.hpp"

namespace topochain::cli::exec {

inline ordered_json manifest_json(const DisorderSpec& d) {
  ordered_json j;
  j["seed"] = d.seed;
  j["samples"] = d.samples;
  j["stream"] = ensemble::kStreamLayout;
  return j;
}

// ---------------------------------------------------------------------------
// quench
// ---------------------------------------------------------------------------

struct QuenchOutcome {
  dynamics::EvolutionTrace trace;
  double j1 = 0.0;
  double j2 = 0.0;
  double time_average = 0.0;               // offset-corrected series
  double raw_time_average = 0.0;
  double nu_from_average = 0.0;            // 2 * time average
  std::vector<double> critical_times;      // s = 0..s_max
  std::vector<double> critical_readouts;   // 2 * P_d(t_c), offset-corrected
};

inline QuenchOutcome compute_quench(const ChainSpec& model, const ProtocolSpec& p,
                                    const DisorderSpec& disorder, bool snapshots = false) {
  QuenchOutcome q;
  const int n_samples = static_cast<int>(std::lround(p.t_max / p.dt)) + 1;
  q.trace = dynamics::run_quench(model, p.cell, p.sublattice, p.t_max, n_samples, disorder,
                                 snapshots);
  const auto [j1, j2] = ssh_couplings(model);
  q.j1 = j1;
  q.j2 = j2;
  q.time_average = dynamics::time_averaged_ced(q.trace);
  q.raw_time_average = dynamics::raw_time_average(q.trace);
  q.nu_from_average = 2.0 * q.time_average;
  q.critical_times = dynamics::critical_times(j1, j2, p.s_max);
  q.critical_readouts.reserve(q.critical_times.size());
  for (double tc : q.critical_times) {
    q.critical_readouts.push_back(
        dynamics::winding_from_critical_time(model, tc, p.cell, p.sublattice, disorder));
  }
  return q;
}

inline ordered_json quench_summary(const QuenchOutcome& q) {
  ordered_json j;
  j["start_cell"] = q.trace.start_cell;
  j["J1"] = q.j1;
  j["J2"] = q.j2;
  j["time_averaged_ced"] = q.time_average;
  j["raw_time_average"] = q.raw_time_average;
  j["nu_from_average"] = q.nu_from_average;
  j["nu_from_average_rounded"] = std::lround(q.nu_from_average);
  ordered_json readouts = ordered_json::array();
  for (std::size_t s = 0; s < q.critical_times.size(); ++s) {
    readouts.push_back({{"s", s},
                        {"t_c", q.critical_times[s]},
                        {"nu_estimate", q.critical_readouts[s]},
                        {"nu_rounded", std::lround(q.critical_readouts[s])}});
  }
  j["critical_readouts"] = readouts;
  j["edge_guard"] = {{"arrival_time", q.trace.edge_arrival_time},
                     {"window_exceeds_arrival", q.trace.edge_window_flag}};
  j["outside_readout_contract"] = q.trace.outside_readout_contract;
  return j;
}

// ---------------------------------------------------------------------------
// pump
// ---------------------------------------------------------------------------

struct PumpOutcome {
  pump::PumpResult result;
  double convergence_ce_diff = 0.0;  // |CE_end(steps) - CE_end(2*steps)|, clean chain
};

inline PumpOutcome compute_pump(const ChainSpec& model, const ProtocolSpec& p,
                                const DisorderSpec& disorder, bool with_chern_reference = true,
                                bool with_convergence_check = true) {
  PumpOutcome out;
  out.result = pump::run_pump(model, p.schedule, p.cell, p.band,
                              disorder.strength > 0.0 ? std::optional<DisorderSpec>(disorder)
                                                      : std::nullopt);
  if (with_chern_reference) {
    try {
      const auto cs = topo::chern_numbers(model, 24, 24);
      out.result.chern_reference = cs.chern[static_cast<std::size_t>(p.band - 1)];
    } catch (const ContractError&) {
      out.result.chern_reference.reset();  // gap closes somewhere on the torus
    }
  }
  if (with_convergence_check) {
    pump::PumpSchedule doubled = p.schedule;
    doubled.steps_per_cycle *= 2;
    const auto fine = pump::run_pump(model, doubled, p.cell, p.band);
    out.convergence_ce_diff =
        std::abs(fine.trace.values.back() - out.result.trace.values.back());
  }
  return out;
}

inline ordered_json pump_summary(const PumpOutcome& o, const ProtocolSpec& p) {
  ordered_json j;
  j["band"] = o.result.band_index;
  j["start_cell"] = o.result.trace.start_cell;
  j["period"] = p.schedule.period();
  j["ce_initial"] = o.result.trace.values.front();
  j["ce_final"] = o.result.trace.values.back();
  j["shift"] = o.result.shift;
  j["shift_stderr"] = o.result.shift_stderr;
  if (o.result.chern_reference) {
    j["chern_reference"] = *o.result.chern_reference;
  } else {
    j["chern_reference"] = nullptr;
  }
  j["adiabaticity"] = {{"min_band_overlap", o.result.min_band_overlap},
                       {"flagged", o.result.adiabaticity_flag}};
  j["preparation"] = {{"residual", o.result.preparation_residual},
                      {"eigenstate_flag", o.result.eigenstate_flag}};
  j["convergence"] = {{"steps_per_cycle", p.schedule.steps_per_cycle},
                      {"ce_diff_vs_doubled_steps", o.convergence_ce_diff}};
  return j;
}

// ---------------------------------------------------------------------------
// winding / chern / bands
// ---------------------------------------------------------------------------

struct WindingOutcome {
  double j1 = 0.0, j2 = 0.0;
  int nu_analytic = 0;
  double nu_integral = 0.0;
};

inline WindingOutcome compute_winding(const ChainSpec& model, const ProtocolSpec& p) {
  WindingOutcome w;
  const auto [j1, j2] = ssh_couplings(model);
  w.j1 = j1;
  w.j2 = j2;
  w.nu_analytic = topo::winding_number_analytic(model.g0, model.g1, model.theta);
  w.nu_integral = topo::winding_number_integral(j1, j2, p.nk);
  return w;
}

struct ChernOutcome {
  topo::ChernSet coarse;
  topo::ChernSet doubled;
  bool grids_agree = false;
};

inline ChernOutcome compute_chern(const ChainSpec& model, const ProtocolSpec& p) {
  ChernOutcome c;
  c.coarse = topo::chern_numbers(model, p.nq, p.ntheta);
  c.doubled = topo::chern_numbers(model, 2 * p.nq, 2 * p.ntheta);
  c.grids_agree = (c.coarse.chern == c.doubled.chern);
  return c;
}

inline ordered_json chern_summary(const ChernOutcome& c, const ProtocolSpec& p) {
  ordered_json j;
  j["chern"] = c.coarse.chern;
  j["field_sums"] = c.coarse.field_sums;
  j["min_gap"] = c.coarse.min_gap;
  j["min_gap_at"] = {{"q", c.coarse.min_gap_q}, {"theta", c.coarse.min_gap_theta}};
  j["grid"] = {{"nq", p.nq}, {"ntheta", p.ntheta}};
  j["doubled_grid_agrees"] = c.grids_agree;
  return j;
}

}  // namespace topochain::cli::exec
