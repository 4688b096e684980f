#pragma once

// Canned experiment presets: the quench traces for chains of 4/8/16 qubits
// in both phases (clean and disordered), the three-band pump at Omega =
// 0.39, the disorder plateau scan, and the Chern phase diagram across the
// g0 = g1/4 transition.

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "topochain/exec.hpp"
#include "topochain/io.hpp"
#include "topochain/version.hpp"

namespace topochain::cli::presets {

struct PresetContext {
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> steps_override;
};

struct PresetInfo {
  std::string name;
  std::string description;
};

inline std::vector<PresetInfo> preset_list() {
  return {
      {"fig2-nontrivial", "quench traces, theta = 0.1*pi (winding 1), L = 4/8/16"},
      {"fig2-trivial", "quench traces, theta = 0.9*pi (winding 0), L = 4/8/16"},
      {"fig2-nontrivial-disordered", "same as fig2-nontrivial with W = 0.2, 30 samples"},
      {"fig2-trivial-disordered", "same as fig2-trivial with W = 0.2, 30 samples"},
      {"fig3-pump", "clean pump, L = 18, Omega = 0.39, bands 1..3"},
      {"fig3-plateau", "pump shift vs disorder strength, bands 1 and 2, 50 samples"},
      {"chern-scan", "Chern sets across g0 in [0, 0.5] (transition at g0 = 0.25)"},
  };
}

namespace detail {

inline ordered_json base_summary(const std::string& preset, const DisorderSpec& d) {
  ordered_json j;
  j["tool"] = tool_version_string();
  j["preset"] = preset;
  j["seed_manifest"] = exec::manifest_json(d);
  return j;
}

// Quench family: one chain length per column, shared time grid.
inline int run_fig2(const std::string& name, bool nontrivial, bool disordered,
                    const PresetContext& ctx) {
  const double theta = (nontrivial ? 0.1 : 0.9) * std::numbers::pi;
  const std::vector<int> cell_counts = {2, 4, 8};  // N; L = 2N

  DisorderSpec disorder;
  disorder.seed = ctx.seed;
  if (disordered) {
    disorder.strength = 0.2;
    disorder.samples = 30;
  }

  std::vector<exec::QuenchOutcome> outcomes;
  ordered_json echo_runs = ordered_json::array();
  for (int n_cells : cell_counts) {
    ExperimentConfig cfg;
    cfg.model = ChainSpec{2, n_cells, 1.0, 1.0, theta, Boundary::kOpen};
    cfg.protocol.kind = Protocol::kQuench;
    cfg.protocol.t_max = 50.0;
    cfg.protocol.dt = 0.02;
    cfg.protocol.cell = (n_cells + 2) / 2;  // cell whose a-site is a middle qubit
    cfg.protocol.sublattice = 1;
    cfg.protocol.s_max = 2;
    cfg.disorder = disorder;
    cfg.output.dir = ctx.out_dir.string();
    echo_runs.push_back(echo_json(cfg));
    outcomes.push_back(exec::compute_quench(cfg.model, cfg.protocol, cfg.disorder));
  }

  // trace.csv: t, ced_L4, ced_L8, ced_L16
  std::vector<std::string> header = {"t"};
  for (int n_cells : cell_counts) header.push_back("ced_L" + std::to_string(2 * n_cells));
  const auto& times = outcomes.front().trace.times;
  std::vector<std::vector<double>> rows(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    rows[i].push_back(times[i]);
    for (const auto& oc : outcomes) rows[i].push_back(oc.trace.values[i]);
  }
  io::write_csv(ctx.out_dir / "trace.csv", header, rows);

  // table.csv: per-chain averages and first critical-time readout
  std::vector<std::vector<double>> table;
  for (std::size_t c = 0; c < outcomes.size(); ++c) {
    const auto& oc = outcomes[c];
    table.push_back({static_cast<double>(2 * cell_counts[c]), oc.time_average,
                     oc.nu_from_average, oc.critical_times[0], oc.critical_readouts[0]});
  }
  io::write_csv(ctx.out_dir / "table.csv",
                {"L", "time_averaged_ced", "nu_from_average", "t_c0", "nu_from_t_c0"}, table);

  ordered_json summary = base_summary(name, disorder);
  summary["theta"] = theta;
  ordered_json per_chain = ordered_json::array();
  for (std::size_t c = 0; c < outcomes.size(); ++c) {
    ordered_json one = exec::quench_summary(outcomes[c]);
    one["L"] = 2 * cell_counts[c];
    per_chain.push_back(one);
  }
  summary["runs"] = per_chain;
  io::write_json_file(ctx.out_dir / "summary.json", summary);

  ordered_json echo;
  echo["preset"] = name;
  echo["runs"] = echo_runs;
  io::write_json_file(ctx.out_dir / "config.echo.json", echo);
  return 0;
}

inline int run_fig3_pump(const PresetContext& ctx) {
  ExperimentConfig cfg;
  cfg.model = ChainSpec{3, 6, 1.0, 1.0, std::numbers::pi, Boundary::kOpen};
  cfg.protocol.kind = Protocol::kPump;
  cfg.protocol.cell = 3;
  cfg.protocol.schedule.omega = 0.39;
  cfg.protocol.schedule.steps_per_cycle = ctx.steps_override.value_or(4096);
  cfg.disorder.seed = ctx.seed;
  cfg.output.dir = ctx.out_dir.string();

  std::vector<exec::PumpOutcome> outcomes;
  ordered_json echo_runs = ordered_json::array();
  for (int band = 1; band <= 3; ++band) {
    cfg.protocol.band = band;
    echo_runs.push_back(echo_json(cfg));
    outcomes.push_back(exec::compute_pump(cfg.model, cfg.protocol, cfg.disorder,
                                          /*with_chern_reference=*/true,
                                          /*with_convergence_check=*/band == 1));
  }

  // trace.csv: t, theta, ce_n1, ce_n2, ce_n3
  const auto& times = outcomes.front().result.trace.times;
  std::vector<std::vector<double>> rows(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    rows[i].push_back(times[i]);
    rows[i].push_back(cfg.protocol.schedule.theta_at(times[i]));
    for (const auto& oc : outcomes) rows[i].push_back(oc.result.trace.values[i]);
  }
  io::write_csv(ctx.out_dir / "trace.csv", {"t", "theta", "ce_n1", "ce_n2", "ce_n3"}, rows);

  std::vector<std::vector<double>> table;
  bool flagged = false;
  for (const auto& oc : outcomes) {
    table.push_back({static_cast<double>(oc.result.band_index), oc.result.shift,
                     oc.result.chern_reference ? static_cast<double>(*oc.result.chern_reference)
                                               : std::nan(""),
                     oc.result.min_band_overlap});
    flagged = flagged || oc.result.adiabaticity_flag;
  }
  io::write_csv(ctx.out_dir / "table.csv", {"band", "shift", "chern_reference", "min_band_overlap"},
                table);

  ordered_json summary = base_summary("fig3-pump", cfg.disorder);
  ordered_json per_band = ordered_json::array();
  for (std::size_t c = 0; c < outcomes.size(); ++c) {
    cfg.protocol.band = static_cast<int>(c) + 1;
    per_band.push_back(exec::pump_summary(outcomes[c], cfg.protocol));
  }
  summary["runs"] = per_band;
  io::write_json_file(ctx.out_dir / "summary.json", summary);

  ordered_json echo;
  echo["preset"] = "fig3-pump";
  echo["runs"] = echo_runs;
  io::write_json_file(ctx.out_dir / "config.echo.json", echo);
  return flagged ? 3 : 0;
}

inline int run_fig3_plateau(const PresetContext& ctx) {
  const std::vector<double> w_values = {0.0, 0.025, 0.05, 0.075, 0.1};
  ChainSpec model{3, 6, 1.0, 1.0, std::numbers::pi, Boundary::kOpen};
  pump::PumpSchedule schedule;
  schedule.omega = 0.39;
  schedule.steps_per_cycle = ctx.steps_override.value_or(4096);
  DisorderSpec base;
  base.seed = ctx.seed;
  base.samples = 50;

  const auto rows1 = pump::disorder_plateau_sweep(model, schedule, 3, 1, w_values, base);
  const auto rows2 = pump::disorder_plateau_sweep(model, schedule, 3, 2, w_values, base);

  std::vector<std::vector<double>> table;
  for (std::size_t i = 0; i < w_values.size(); ++i) {
    table.push_back({w_values[i], rows1[i].shift, rows1[i].stderr_of_shift, rows2[i].shift,
                     rows2[i].stderr_of_shift});
  }
  io::write_csv(ctx.out_dir / "table.csv",
                {"W", "shift_n1", "stderr_n1", "shift_n2", "stderr_n2"}, table);

  ordered_json summary = base_summary("fig3-plateau", base);
  summary["omega"] = schedule.omega;
  summary["steps_per_cycle"] = schedule.steps_per_cycle;
  ordered_json per_w = ordered_json::array();
  for (std::size_t i = 0; i < w_values.size(); ++i) {
    per_w.push_back({{"W", w_values[i]},
                     {"shift_n1", rows1[i].shift},
                     {"stderr_n1", rows1[i].stderr_of_shift},
                     {"min_overlap_n1", rows1[i].min_band_overlap},
                     {"shift_n2", rows2[i].shift},
                     {"stderr_n2", rows2[i].stderr_of_shift},
                     {"min_overlap_n2", rows2[i].min_band_overlap}});
  }
  summary["rows"] = per_w;
  io::write_json_file(ctx.out_dir / "summary.json", summary);

  ordered_json echo;
  echo["preset"] = "fig3-plateau";
  echo["W_values"] = w_values;
  echo["samples"] = base.samples;
  echo["seed"] = base.seed;
  io::write_json_file(ctx.out_dir / "config.echo.json", echo);
  return 0;
}

inline int run_chern_scan(const PresetContext& ctx) {
  // Step 0.05 with extra points bracketing the g0 = 0.25 transition, which
  // itself is excluded (the gap closes there and the invariant is undefined).
  const std::vector<double> g0_values = {0.0,   0.05, 0.1,  0.15, 0.2,  0.225,
                                         0.275, 0.3,  0.35, 0.4,  0.45, 0.5};
  DisorderSpec clean;
  clean.seed = ctx.seed;

  std::vector<std::vector<double>> table;
  ordered_json per_point = ordered_json::array();
  std::vector<std::vector<int>> sets;
  for (double g0 : g0_values) {
    ChainSpec model{3, 1, g0, 1.0, 0.0, Boundary::kOpen};
    const auto report = ensemble::run_ensemble(clean, [&](int) {
      const auto cs = topo::chern_numbers(model, 24, 24);
      RVector v(4);
      v << cs.chern[0], cs.chern[1], cs.chern[2], cs.min_gap;
      return v;
    });
    table.push_back({g0, report.mean[0], report.mean[1], report.mean[2], report.mean[3]});
    sets.push_back({static_cast<int>(report.mean[0]), static_cast<int>(report.mean[1]),
                    static_cast<int>(report.mean[2])});
    per_point.push_back({{"g0", g0},
                         {"chern", sets.back()},
                         {"min_gap", report.mean[3]}});
  }
  io::write_csv(ctx.out_dir / "table.csv", {"g0", "C1", "C2", "C3", "min_gap"}, table);

  ordered_json summary = base_summary("chern-scan", clean);
  summary["rows"] = per_point;
  ordered_json transitions = ordered_json::array();
  for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
    if (sets[i] != sets[i + 1]) {
      transitions.push_back({{"between_g0", {g0_values[i], g0_values[i + 1]}}});
    }
  }
  summary["transitions"] = transitions;
  io::write_json_file(ctx.out_dir / "summary.json", summary);

  ordered_json echo;
  echo["preset"] = "chern-scan";
  echo["g0_values"] = g0_values;
  io::write_json_file(ctx.out_dir / "config.echo.json", echo);
  return 0;
}

}  // namespace detail

inline int run_preset(const std::string& name, const PresetContext& ctx, std::ostream& err) {
  io::ensure_directory(ctx.out_dir);
  if (name == "fig2-nontrivial") return detail::run_fig2(name, true, false, ctx);
  if (name == "fig2-trivial") return detail::run_fig2(name, false, false, ctx);
  if (name == "fig2-nontrivial-disordered") return detail::run_fig2(name, true, true, ctx);
  if (name == "fig2-trivial-disordered") return detail::run_fig2(name, false, true, ctx);
  if (name == "fig3-pump") return detail::run_fig3_pump(ctx);
  if (name == "fig3-plateau") return detail::run_fig3_plateau(ctx);
  if (name == "chern-scan") return detail::run_chern_scan(ctx);
  err << "unknown preset '" << name << "'; available presets:\n";
  for (const auto& info : preset_list()) err << "  " << info.name << "  - " << info.description << "\n";
  return 2;
}

}  // namespace topochain::cli::presets
