#pragma once

// Command-line surface.  Subcommands mirror the protocols (bands, winding,
// chern, quench, pump, sweep) plus `preset <name>`; every run writes a
// normalized config echo, CSV artifacts, and a JSON summary into the output
// directory.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-contract
// violation (gap closure, adiabaticity failure), 4 I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topochain/config.hpp"
#include "topochain/exec.hpp"
#include "topochain/io.hpp"
#include "topochain/presets.hpp"
#include "topochain/version.hpp"

namespace topochain::cli {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<std::string> out_dir;
};

namespace detail {

// Seed priority: --seed flag, then config, then TOPOCHAIN_SEED, then default.
inline std::uint64_t resolve_seed(const ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.seed) return *ov.seed;
  if (cfg.seed_from_config) return cfg.disorder.seed;
  if (const char* env = std::getenv("TOPOCHAIN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("TOPOCHAIN_SEED is set but is not an unsigned integer: '" +
                        std::string(env) + "'");
    }
  }
  return kDefaultSeed;
}

inline void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
  cfg.disorder.seed = resolve_seed(cfg, ov);
  if (ov.out_dir) cfg.output.dir = *ov.out_dir;
  if (ov.steps) {
    if (*ov.steps < 1) throw ConfigError("--steps: must be >= 1");
    if (cfg.protocol.kind == Protocol::kPump) {
      cfg.protocol.schedule.steps_per_cycle = *ov.steps;
    } else if (cfg.protocol.kind == Protocol::kSweep && cfg.protocol.inner &&
               cfg.protocol.inner->kind == Protocol::kPump) {
      cfg.protocol.inner->schedule.steps_per_cycle = *ov.steps;
    } else {
      throw ConfigError("--steps: integrator override applies to pump protocols only");
    }
  }
}

inline ordered_json base_summary(const ExperimentConfig& cfg) {
  ordered_json j;
  j["tool"] = tool_version_string();
  j["protocol"] = protocol_name(cfg.protocol.kind);
  j["seed_manifest"] = exec::manifest_json(cfg.disorder);
  return j;
}

inline void write_snapshots_csv(const std::filesystem::path& path,
                                const dynamics::EvolutionTrace& trace) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    const auto& psi = trace.snapshots[i];
    for (Eigen::Index s = 0; s < psi.size(); ++s) {
      rows.push_back({trace.times[i], static_cast<double>(s + 1), psi[s].real(), psi[s].imag(),
                      std::norm(psi[s])});
    }
  }
  io::write_csv(path, {"t", "site", "re", "im", "prob"}, rows);
}

// ---------------------------------------------------------------------------
// per-protocol runs (artifacts + summary + exit code)
// ---------------------------------------------------------------------------

inline int run_bands(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     ordered_json& summary) {
  const auto bs = topo::band_spectrum(cfg.model, cfg.protocol.nq, cfg.protocol.ntheta);
  std::vector<std::string> header = {"q", "theta"};
  for (int n = 1; n <= cfg.model.cell_size; ++n) header.push_back("e" + std::to_string(n));
  std::vector<std::vector<double>> rows;
  for (int iq = 0; iq < bs.nq(); ++iq) {
    for (int it = 0; it < bs.ntheta(); ++it) {
      std::vector<double> row = {bs.qs[iq], bs.thetas[it]};
      for (int n = 0; n < cfg.model.cell_size; ++n) row.push_back(bs.energies(bs.index(iq, it), n));
      rows.push_back(row);
    }
  }
  io::write_csv(out_dir / "table.csv", header, rows);
  summary["results"] = {{"min_gap", bs.min_gap},
                        {"min_gap_at", {{"q", bs.min_gap_q}, {"theta", bs.min_gap_theta}}},
                        {"grid", {{"nq", cfg.protocol.nq}, {"ntheta", cfg.protocol.ntheta}}}};
  return 0;
}

inline int run_winding(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                       ordered_json& summary) {
  const auto w = exec::compute_winding(cfg.model, cfg.protocol);
  io::write_csv(out_dir / "table.csv",
                {"g0", "g1", "theta", "J1", "J2", "nu_analytic", "nu_integral"},
                {{cfg.model.g0, cfg.model.g1, cfg.model.theta, w.j1, w.j2,
                  static_cast<double>(w.nu_analytic), w.nu_integral}});
  summary["results"] = {{"J1", w.j1},
                        {"J2", w.j2},
                        {"nu_analytic", w.nu_analytic},
                        {"nu_integral", w.nu_integral},
                        {"nk", cfg.protocol.nk}};
  return 0;
}

inline int run_chern(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     ordered_json& summary) {
  const auto c = exec::compute_chern(cfg.model, cfg.protocol);
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < c.coarse.chern.size(); ++n) {
    rows.push_back({static_cast<double>(n + 1), static_cast<double>(c.coarse.chern[n]),
                    c.coarse.field_sums[n]});
  }
  io::write_csv(out_dir / "table.csv", {"band", "chern", "field_sum"}, rows);
  summary["results"] = exec::chern_summary(c, cfg.protocol);
  return 0;
}

inline int run_quench_cmd(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                          ordered_json& summary) {
  const auto q = exec::compute_quench(cfg.model, cfg.protocol, cfg.disorder, cfg.output.snapshots);
  {
    std::vector<std::vector<double>> rows(q.trace.times.size());
    for (std::size_t i = 0; i < q.trace.times.size(); ++i) {
      rows[i] = {q.trace.times[i], q.trace.values[i], q.trace.values_rel[i]};
    }
    io::write_csv(out_dir / "trace.csv", {"t", "ced", "ced_rel"}, rows);
  }
  if (cfg.output.snapshots && !q.trace.snapshots.empty()) {
    write_snapshots_csv(out_dir / "snapshots.csv", q.trace);
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t s = 0; s < q.critical_times.size(); ++s) {
    rows.push_back({static_cast<double>(s), q.critical_times[s], q.critical_readouts[s],
                    static_cast<double>(std::lround(q.critical_readouts[s]))});
  }
  io::write_csv(out_dir / "table.csv", {"s", "t_c", "nu_estimate", "nu_rounded"}, rows);
  summary["results"] = exec::quench_summary(q);
  return 0;
}

inline int run_pump_cmd(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                        ordered_json& summary) {
  const auto o = exec::compute_pump(cfg.model, cfg.protocol, cfg.disorder);
  std::vector<std::vector<double>> rows(o.result.trace.times.size());
  for (std::size_t i = 0; i < o.result.trace.times.size(); ++i) {
    rows[i] = {o.result.trace.times[i], cfg.protocol.schedule.theta_at(o.result.trace.times[i]),
               o.result.trace.values[i]};
  }
  io::write_csv(out_dir / "trace.csv", {"t", "theta", "ce"}, rows);
  io::write_csv(out_dir / "table.csv",
                {"band", "shift", "stderr", "chern_reference", "min_band_overlap"},
                {{static_cast<double>(o.result.band_index), o.result.shift, o.result.shift_stderr,
                  o.result.chern_reference ? static_cast<double>(*o.result.chern_reference)
                                           : std::nan(""),
                  o.result.min_band_overlap}});
  summary["results"] = exec::pump_summary(o, cfg.protocol);
  return o.result.adiabaticity_flag ? 3 : 0;
}

inline int run_sweep_cmd(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         ordered_json& summary) {
  const ProtocolSpec& inner = *cfg.protocol.inner;
  const std::string& param = cfg.protocol.sweep_parameter;
  const std::vector<double>& values = cfg.protocol.sweep_values;

  const auto point_config = [&](double v) {
    ExperimentConfig point = cfg;
    point.protocol = inner;
    if (param == "W") {
      point.disorder.strength = v;
    } else if (param == "g0") {
      point.model.g0 = v;
    } else {
      point.model.theta = v;
    }
    return point;
  };

  std::vector<std::string> header = {param};
  std::vector<std::vector<double>> rows;
  ordered_json points = ordered_json::array();
  int exit_code = 0;

  if (inner.kind == Protocol::kPump && param == "W") {
    const auto plateau = pump::disorder_plateau_sweep(cfg.model, inner.schedule, inner.cell,
                                                      inner.band, values, cfg.disorder);
    header.insert(header.end(), {"shift", "stderr", "min_band_overlap"});
    for (const auto& row : plateau) {
      rows.push_back({row.strength, row.shift, row.stderr_of_shift, row.min_band_overlap});
      points.push_back({{"W", row.strength},
                        {"shift", row.shift},
                        {"stderr", row.stderr_of_shift},
                        {"min_band_overlap", row.min_band_overlap}});
      if (row.min_band_overlap < pump::kAdiabaticOverlapFloor) exit_code = 3;
    }
  } else if (inner.kind == Protocol::kPump) {
    header.insert(header.end(), {"shift", "stderr", "min_band_overlap"});
    for (double v : values) {
      const ExperimentConfig point = point_config(v);
      const auto o = exec::compute_pump(point.model, point.protocol, point.disorder,
                                        /*with_chern_reference=*/false,
                                        /*with_convergence_check=*/false);
      rows.push_back({v, o.result.shift, o.result.shift_stderr, o.result.min_band_overlap});
      points.push_back({{param, v}, {"summary", exec::pump_summary(o, point.protocol)}});
      if (o.result.adiabaticity_flag) exit_code = 3;
    }
  } else if (inner.kind == Protocol::kQuench) {
    header.insert(header.end(), {"time_averaged_ced", "nu_from_average", "nu_from_t_c0"});
    for (double v : values) {
      const ExperimentConfig point = point_config(v);
      const auto q = exec::compute_quench(point.model, point.protocol, point.disorder);
      rows.push_back({v, q.time_average, q.nu_from_average, q.critical_readouts[0]});
      points.push_back({{param, v}, {"summary", exec::quench_summary(q)}});
    }
  } else if (inner.kind == Protocol::kChern) {
    const int n_bands = cfg.model.cell_size;
    for (int n = 1; n <= n_bands; ++n) header.push_back("C" + std::to_string(n));
    header.push_back("min_gap");
    for (double v : values) {
      const ExperimentConfig point = point_config(v);
      // Single-sample ensemble: keeps the seed manifest in the report chain.
      DisorderSpec clean = point.disorder;
      clean.strength = 0.0;
      clean.samples = 1;
      const auto report = ensemble::run_ensemble(clean, [&](int) {
        const auto cs = topo::chern_numbers(point.model, inner.nq, inner.ntheta);
        RVector out(n_bands + 1);
        for (int n = 0; n < n_bands; ++n) out[n] = cs.chern[static_cast<std::size_t>(n)];
        out[n_bands] = cs.min_gap;
        return out;
      });
      std::vector<double> row = {v};
      ordered_json chern = ordered_json::array();
      for (int n = 0; n < n_bands; ++n) {
        row.push_back(report.mean[n]);
        chern.push_back(static_cast<int>(report.mean[n]));
      }
      row.push_back(report.mean[n_bands]);
      rows.push_back(row);
      points.push_back({{param, v}, {"chern", chern}, {"min_gap", report.mean[n_bands]}});
    }
  } else if (inner.kind == Protocol::kWinding) {
    header.insert(header.end(), {"nu_analytic", "nu_integral"});
    for (double v : values) {
      const ExperimentConfig point = point_config(v);
      const auto w = exec::compute_winding(point.model, point.protocol);
      rows.push_back({v, static_cast<double>(w.nu_analytic), w.nu_integral});
      points.push_back({{param, v}, {"nu_analytic", w.nu_analytic}, {"nu_integral", w.nu_integral}});
    }
  } else {  // bands
    header.push_back("min_gap");
    for (double v : values) {
      const ExperimentConfig point = point_config(v);
      const auto bs = topo::band_spectrum(point.model, inner.nq, inner.ntheta);
      rows.push_back({v, bs.min_gap});
      points.push_back({{param, v}, {"min_gap", bs.min_gap}});
    }
  }

  io::write_csv(out_dir / "table.csv", header, rows);
  summary["results"] = {{"parameter", param}, {"points", points}};
  return exit_code;
}

inline int run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  const std::filesystem::path out_dir = cfg.output.dir;
  io::ensure_directory(out_dir);
  io::write_json_file(out_dir / "config.echo.json", echo_json(cfg));

  ordered_json summary = base_summary(cfg);
  int code = 0;
  switch (cfg.protocol.kind) {
    case Protocol::kBands: code = run_bands(cfg, out_dir, summary); break;
    case Protocol::kWinding: code = run_winding(cfg, out_dir, summary); break;
    case Protocol::kChern: code = run_chern(cfg, out_dir, summary); break;
    case Protocol::kQuench: code = run_quench_cmd(cfg, out_dir, summary); break;
    case Protocol::kPump: code = run_pump_cmd(cfg, out_dir, summary); break;
    case Protocol::kSweep: code = run_sweep_cmd(cfg, out_dir, summary); break;
  }
  summary["exit_code"] = code;
  io::write_json_file(out_dir / "summary.json", summary);
  out << protocol_name(cfg.protocol.kind) << ": wrote " << (out_dir / "summary.json").string()
      << "\n";
  return code;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SSH-type coupled-qubit chain simulator: winding numbers, Chern numbers, "
               "single-excitation quench dynamics and adiabatic topological pumping"};
  app.name("topochain");
  app.set_version_flag("--version", tool_version_string());
  app.require_subcommand(0, 1);

  struct SubState {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int steps = 0;
  };

  const std::vector<std::pair<std::string, std::string>> protocol_subs = {
      {"bands", "band structure over the (q, theta) grid"},
      {"winding", "winding number, closed form and BZ integral"},
      {"chern", "per-band Chern numbers on the (q, theta) torus"},
      {"quench", "single-excitation quench and CED winding readout"},
      {"pump", "adiabatic pumping of a chi_n state and CE shift"},
      {"sweep", "parameter sweep driving one of the other protocols"},
  };

  std::vector<SubState> states(protocol_subs.size());
  for (std::size_t i = 0; i < protocol_subs.size(); ++i) {
    auto& st = states[i];
    st.sub = app.add_subcommand(protocol_subs[i].first, protocol_subs[i].second);
    st.sub->add_option("--config", st.config_path, "experiment config (JSON)")->required();
    st.sub->add_option("--out", st.out_dir, "output directory (overrides config)");
    st.sub->add_option("--seed", st.seed, "seed override (highest priority)");
    st.sub->add_option("--steps", st.steps, "integrator steps-per-cycle override (pump)");
  }

  auto* preset_sub = app.add_subcommand("preset", "run a canned experiment");
  std::string preset_name;
  std::string preset_out = "out";
  std::uint64_t preset_seed = 0;
  int preset_steps = 0;
  bool preset_list_flag = false;
  preset_sub->add_option("name", preset_name, "preset name");
  preset_sub->add_flag("--list", preset_list_flag, "list available presets");
  preset_sub->add_option("--out", preset_out, "output directory");
  preset_sub->add_option("--seed", preset_seed, "seed override");
  preset_sub->add_option("--steps", preset_steps, "integrator steps-per-cycle override");

  std::vector<const char*> argv;
  argv.push_back("topochain");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << tool_version_string() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (preset_sub->parsed()) {
      if (preset_list_flag || preset_name.empty()) {
        for (const auto& info : presets::preset_list()) {
          out << info.name << "  - " << info.description << "\n";
        }
        return preset_name.empty() && !preset_list_flag ? 2 : 0;
      }
      presets::PresetContext ctx;
      ctx.out_dir = preset_out;
      ctx.seed = preset_sub->count("--seed") ? preset_seed : kDefaultSeed;
      if (preset_sub->count("--steps")) {
        if (preset_steps < 1) throw ConfigError("--steps: must be >= 1");
        ctx.steps_override = preset_steps;
      }
      const int code = presets::run_preset(preset_name, ctx, err);
      if (code == 0) out << "preset " << preset_name << ": wrote " << ctx.out_dir.string() << "\n";
      return code;
    }

    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& st = states[i];
      if (!st.sub->parsed()) continue;
      ExperimentConfig cfg = parse_config(io::read_text_file(st.config_path));
      const std::string expected = protocol_subs[i].first;
      if (protocol_name(cfg.protocol.kind) != expected) {
        throw ConfigError("config declares protocol '" + protocol_name(cfg.protocol.kind) +
                          "' but the subcommand is '" + expected + "'");
      }
      Overrides ov;
      if (st.sub->count("--seed")) ov.seed = st.seed;
      if (st.sub->count("--steps")) ov.steps = st.steps;
      if (st.sub->count("--out")) ov.out_dir = st.out_dir;
      detail::apply_overrides(cfg, ov);
      return detail::run_experiment(cfg, out);
    }

    out << app.help();
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    err << "numerical contract violation: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace topochain::cli
