#pragma once

// Experiment configuration: a single JSON document with model, protocol,
// disorder and output blocks.  Parsing validates every field, fills
// defaults, and the echo emits the fully resolved configuration in a
// canonical order so each run is self-documenting.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topochain/errors.hpp"
#include "topochain/model.hpp"
#include "topochain/pump.hpp"

namespace topochain::cli {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class Protocol { kBands, kWinding, kChern, kQuench, kPump, kSweep };

inline std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kBands: return "bands";
    case Protocol::kWinding: return "winding";
    case Protocol::kChern: return "chern";
    case Protocol::kQuench: return "quench";
    case Protocol::kPump: return "pump";
    case Protocol::kSweep: return "sweep";
  }
  return "?";
}

inline Protocol protocol_from_name(const std::string& s, const std::string& path) {
  if (s == "bands") return Protocol::kBands;
  if (s == "winding") return Protocol::kWinding;
  if (s == "chern") return Protocol::kChern;
  if (s == "quench") return Protocol::kQuench;
  if (s == "pump") return Protocol::kPump;
  if (s == "sweep") return Protocol::kSweep;
  throw ConfigError(path + ": unknown protocol '" + s +
                    "' (expected bands|winding|chern|quench|pump|sweep)");
}

struct ProtocolSpec {
  Protocol kind = Protocol::kQuench;

  // quench
  double t_max = 50.0;
  double dt = 0.02;
  int cell = 0;  // resolved against the model during parsing
  int sublattice = 1;
  int s_max = 2;

  // pump
  pump::PumpSchedule schedule;
  int band = 1;

  // winding
  int nk = 256;

  // chern / bands grids
  int nq = 24;
  int ntheta = 24;

  // sweep
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::shared_ptr<ProtocolSpec> inner;
};

struct OutputSpec {
  std::string dir = "out";
  bool snapshots = false;
};

struct ExperimentConfig {
  ChainSpec model;
  ProtocolSpec protocol;
  DisorderSpec disorder;
  bool seed_from_config = false;
  OutputSpec output;
};

namespace detail {

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

inline void check_allowed_keys(const json& obj, const std::string& path,
                               std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(path + "." + item.key() + ": unknown key");
  }
}

inline int get_int(const json& obj, const std::string& path, const char* key,
                   std::optional<int> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing required field");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

inline double get_double(const json& obj, const std::string& path, const char* key,
                         std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing required field");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v.get<double>();
}

inline bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(path + "." + key + ": expected a boolean");
  return v.get<bool>();
}

inline std::string get_string(const json& obj, const std::string& path, const char* key,
                              std::optional<std::string> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing required field");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline std::uint64_t get_u64(const json& obj, const std::string& path, const char* key,
                             std::uint64_t fallback, bool* present = nullptr) {
  if (!obj.contains(key)) {
    if (present) *present = false;
    return fallback;
  }
  if (present) *present = true;
  const json& v = obj.at(key);
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
    throw ConfigError(path + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

// Sublattice as an integer 1..p or a letter "a", "b", "c", ...
inline int get_sublattice(const json& obj, const std::string& path, const char* key, int p,
                          int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  int s = 0;
  if (v.is_number_integer()) {
    s = v.get<int>();
  } else if (v.is_string()) {
    const std::string letter = v.get<std::string>();
    if (letter.size() != 1 || letter[0] < 'a' || letter[0] >= 'a' + p) {
      throw ConfigError(path + "." + key + ": expected a sublattice letter 'a'..'" +
                        std::string(1, static_cast<char>('a' + p - 1)) + "'");
    }
    s = letter[0] - 'a' + 1;
  } else {
    throw ConfigError(path + "." + key + ": expected an integer or a sublattice letter");
  }
  if (s < 1 || s > p) {
    throw ConfigError(path + "." + key + ": sublattice " + std::to_string(s) + " outside 1.." +
                      std::to_string(p));
  }
  return s;
}

inline ChainSpec parse_model(const json& block) {
  require_object(block, "model");
  check_allowed_keys(block, "model", {"p", "N", "g0", "g1", "theta", "boundary"});
  ChainSpec spec;
  spec.cell_size = get_int(block, "model", "p", std::nullopt);
  spec.num_cells = get_int(block, "model", "N", std::nullopt);
  spec.g0 = get_double(block, "model", "g0", 1.0);
  spec.g1 = get_double(block, "model", "g1", 1.0);
  spec.theta = get_double(block, "model", "theta", 0.0);
  const std::string boundary = get_string(block, "model", "boundary", std::string("open"));
  if (boundary != "open" && boundary != "periodic") {
    throw ConfigError("model.boundary: expected 'open' or 'periodic'");
  }
  spec.boundary = boundary_from_string(boundary);
  if (spec.cell_size < 2) throw ConfigError("model.p: must be >= 2");
  if (spec.num_cells < 1) throw ConfigError("model.N: must be >= 1");
  return spec;
}

inline ProtocolSpec parse_protocol(const json& block, const ChainSpec& model,
                                   const std::string& path, bool allow_sweep);

inline ProtocolSpec parse_quench(const json& block, const ChainSpec& model,
                                 const std::string& path) {
  check_allowed_keys(block, path, {"type", "t_max", "dt", "cell", "sublattice", "s_max"});
  if (model.cell_size != 2) throw ConfigError(path + ": quench protocol requires model.p = 2");
  if (model.boundary != Boundary::kOpen) {
    throw ConfigError(path + ": quench protocol requires an open chain");
  }
  ProtocolSpec p;
  p.kind = Protocol::kQuench;
  p.t_max = get_double(block, path, "t_max", 50.0);
  p.dt = get_double(block, path, "dt", 0.02);
  // Default start: the cell whose a-site sits at the middle of the chain.
  p.cell = get_int(block, path, "cell", (model.num_cells + 2) / 2);
  p.sublattice = get_sublattice(block, path, "sublattice", model.cell_size, 1);
  p.s_max = get_int(block, path, "s_max", 2);
  if (!(p.t_max > 0.0)) throw ConfigError(path + ".t_max: must be > 0");
  if (!(p.dt > 0.0) || p.dt > p.t_max) throw ConfigError(path + ".dt: must be in (0, t_max]");
  if (p.cell < 1 || p.cell > model.num_cells) {
    throw ConfigError(path + ".cell: outside 1.." + std::to_string(model.num_cells));
  }
  if (p.s_max < 0) throw ConfigError(path + ".s_max: must be >= 0");
  return p;
}

inline ProtocolSpec parse_pump(const json& block, const ChainSpec& model, const std::string& path) {
  check_allowed_keys(block, path,
                     {"type", "omega", "phi0", "cycles", "steps_per_cycle", "cell", "band"});
  if (model.cell_size != 3) throw ConfigError(path + ": pump protocol requires model.p = 3");
  if (model.boundary != Boundary::kOpen) {
    throw ConfigError(path + ": pump protocol requires an open chain");
  }
  ProtocolSpec p;
  p.kind = Protocol::kPump;
  p.schedule.omega = get_double(block, path, "omega", 0.39);
  p.schedule.phi0 = get_double(block, path, "phi0", std::numbers::pi);
  p.schedule.cycles = get_int(block, path, "cycles", 1);
  p.schedule.steps_per_cycle = get_int(block, path, "steps_per_cycle", 4096);
  p.cell = get_int(block, path, "cell", (model.num_cells + 1) / 2);
  p.band = get_int(block, path, "band", 1);
  if (!(p.schedule.omega > 0.0)) throw ConfigError(path + ".omega: must be > 0");
  if (std::abs(p.schedule.phi0 - std::numbers::pi) > 1e-6) {
    throw ConfigError(path + ".phi0: pump preparation requires phi0 = pi, where the cells decouple "
                      "and the chi states are exact eigenstates");
  }
  if (std::abs(model.theta - p.schedule.phi0) > 1e-6) {
    throw ConfigError("model.theta: must equal protocol.phi0 (= pi) so the prepared state is an "
                      "eigenstate at t = 0");
  }
  if (p.schedule.cycles < 1) throw ConfigError(path + ".cycles: must be >= 1");
  if (p.schedule.steps_per_cycle < 1) throw ConfigError(path + ".steps_per_cycle: must be >= 1");
  if (p.cell < 1 || p.cell > model.num_cells) {
    throw ConfigError(path + ".cell: outside 1.." + std::to_string(model.num_cells));
  }
  if (p.band < 1 || p.band > 3) throw ConfigError(path + ".band: must be 1, 2 or 3");
  return p;
}

inline ProtocolSpec parse_winding(const json& block, const ChainSpec& model,
                                  const std::string& path) {
  check_allowed_keys(block, path, {"type", "nk"});
  if (model.cell_size != 2) throw ConfigError(path + ": winding protocol requires model.p = 2");
  ProtocolSpec p;
  p.kind = Protocol::kWinding;
  p.nk = get_int(block, path, "nk", 256);
  if (p.nk < 16) throw ConfigError(path + ".nk: must be >= 16");
  return p;
}

inline ProtocolSpec parse_chern(const json& block, const std::string& path) {
  check_allowed_keys(block, path, {"type", "nq", "ntheta"});
  ProtocolSpec p;
  p.kind = Protocol::kChern;
  p.nq = get_int(block, path, "nq", 24);
  p.ntheta = get_int(block, path, "ntheta", 24);
  if (p.nq < 12) throw ConfigError(path + ".nq: must be >= 12");
  if (p.ntheta < 12) throw ConfigError(path + ".ntheta: must be >= 12");
  return p;
}

inline ProtocolSpec parse_bands(const json& block, const std::string& path) {
  check_allowed_keys(block, path, {"type", "nq", "ntheta"});
  ProtocolSpec p;
  p.kind = Protocol::kBands;
  p.nq = get_int(block, path, "nq", 128);
  p.ntheta = get_int(block, path, "ntheta", 1);
  if (p.nq < 2) throw ConfigError(path + ".nq: must be >= 2");
  if (p.ntheta < 1) throw ConfigError(path + ".ntheta: must be >= 1");
  return p;
}

inline ProtocolSpec parse_sweep(const json& block, const ChainSpec& model,
                                const std::string& path) {
  check_allowed_keys(block, path, {"type", "parameter", "values", "protocol"});
  ProtocolSpec p;
  p.kind = Protocol::kSweep;
  p.sweep_parameter = get_string(block, path, "parameter", std::nullopt);
  if (p.sweep_parameter != "W" && p.sweep_parameter != "g0" && p.sweep_parameter != "theta") {
    throw ConfigError(path + ".parameter: expected 'W', 'g0' or 'theta'");
  }
  if (!block.contains("values") || !block.at("values").is_array() || block.at("values").empty()) {
    throw ConfigError(path + ".values: expected a non-empty array of numbers");
  }
  for (const auto& v : block.at("values")) {
    if (!v.is_number()) throw ConfigError(path + ".values: expected a non-empty array of numbers");
    p.sweep_values.push_back(v.get<double>());
  }
  if (p.sweep_parameter == "W") {
    for (double v : p.sweep_values) {
      if (v < 0.0) throw ConfigError(path + ".values: W values must be >= 0");
    }
  }
  if (!block.contains("protocol")) {
    throw ConfigError(path + ".protocol: missing required field (the protocol to sweep)");
  }
  p.inner = std::make_shared<ProtocolSpec>(
      parse_protocol(block.at("protocol"), model, path + ".protocol", /*allow_sweep=*/false));

  if (p.sweep_parameter == "W" &&
      !(p.inner->kind == Protocol::kQuench || p.inner->kind == Protocol::kPump)) {
    throw ConfigError(path + ".parameter: disorder sweeps apply to quench or pump protocols only");
  }
  if (p.sweep_parameter == "theta" && p.inner->kind == Protocol::kPump) {
    throw ConfigError(path + ".parameter: theta is ramped by the pump itself and cannot be swept");
  }
  return p;
}

inline ProtocolSpec parse_protocol(const json& block, const ChainSpec& model,
                                   const std::string& path, bool allow_sweep) {
  require_object(block, path);
  const std::string type = get_string(block, path, "type", std::nullopt);
  const Protocol kind = protocol_from_name(type, path + ".type");
  switch (kind) {
    case Protocol::kQuench: return parse_quench(block, model, path);
    case Protocol::kPump: return parse_pump(block, model, path);
    case Protocol::kWinding: return parse_winding(block, model, path);
    case Protocol::kChern: return parse_chern(block, path);
    case Protocol::kBands: return parse_bands(block, path);
    case Protocol::kSweep:
      if (!allow_sweep) throw ConfigError(path + ".type: sweeps cannot be nested");
      return parse_sweep(block, model, path);
  }
  throw ConfigError(path + ".type: unknown protocol");
}

inline DisorderSpec parse_disorder(const json& root, bool* seed_present) {
  DisorderSpec d;
  *seed_present = false;
  if (!root.contains("disorder")) return d;
  const json& block = root.at("disorder");
  require_object(block, "disorder");
  check_allowed_keys(block, "disorder", {"W", "seed", "samples"});
  d.strength = get_double(block, "disorder", "W", 0.0);
  d.seed = get_u64(block, "disorder", "seed", kDefaultSeed, seed_present);
  d.samples = get_int(block, "disorder", "samples", 1);
  if (d.strength < 0.0) throw ConfigError("disorder.W: must be >= 0");
  if (d.samples < 1) throw ConfigError("disorder.samples: must be >= 1");
  return d;
}

inline OutputSpec parse_output(const json& root) {
  OutputSpec out;
  if (!root.contains("output")) return out;
  const json& block = root.at("output");
  require_object(block, "output");
  check_allowed_keys(block, "output", {"dir", "snapshots"});
  out.dir = get_string(block, "output", "dir", std::string("out"));
  out.snapshots = get_bool(block, "output", "snapshots", false);
  if (out.dir.empty()) throw ConfigError("output.dir: must not be empty");
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config_json(const json& root) {
  detail::require_object(root, "config");
  detail::check_allowed_keys(root, "config", {"model", "protocol", "disorder", "output"});
  if (!root.contains("model")) throw ConfigError("model: missing required block");
  if (!root.contains("protocol")) throw ConfigError("protocol: missing required block");

  ExperimentConfig cfg;
  cfg.model = detail::parse_model(root.at("model"));
  cfg.protocol = detail::parse_protocol(root.at("protocol"), cfg.model, "protocol",
                                        /*allow_sweep=*/true);
  cfg.disorder = detail::parse_disorder(root, &cfg.seed_from_config);
  cfg.output = detail::parse_output(root);
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config_json(root);
}

namespace detail {

inline ordered_json protocol_echo(const ProtocolSpec& p) {
  ordered_json j;
  j["type"] = protocol_name(p.kind);
  switch (p.kind) {
    case Protocol::kQuench:
      j["t_max"] = p.t_max;
      j["dt"] = p.dt;
      j["cell"] = p.cell;
      j["sublattice"] = p.sublattice;
      j["s_max"] = p.s_max;
      break;
    case Protocol::kPump:
      j["omega"] = p.schedule.omega;
      j["phi0"] = p.schedule.phi0;
      j["cycles"] = p.schedule.cycles;
      j["steps_per_cycle"] = p.schedule.steps_per_cycle;
      j["cell"] = p.cell;
      j["band"] = p.band;
      break;
    case Protocol::kWinding:
      j["nk"] = p.nk;
      break;
    case Protocol::kChern:
    case Protocol::kBands:
      j["nq"] = p.nq;
      j["ntheta"] = p.ntheta;
      break;
    case Protocol::kSweep:
      j["parameter"] = p.sweep_parameter;
      j["values"] = p.sweep_values;
      j["protocol"] = protocol_echo(*p.inner);
      break;
  }
  return j;
}

}  // namespace detail

// Fully resolved configuration in canonical order; re-parsing the echo
// reproduces the same configuration.
inline ordered_json echo_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["model"] = {{"p", cfg.model.cell_size}, {"N", cfg.model.num_cells},   {"g0", cfg.model.g0},
                {"g1", cfg.model.g1},       {"theta", cfg.model.theta},   {"boundary", to_string(cfg.model.boundary)}};
  j["protocol"] = detail::protocol_echo(cfg.protocol);
  j["disorder"] = {{"W", cfg.disorder.strength},
                   {"seed", cfg.disorder.seed},
                   {"samples", cfg.disorder.samples}};
  j["output"] = {{"dir", cfg.output.dir}, {"snapshots", cfg.output.snapshots}};
  return j;
}

}  // namespace topochain::cli
