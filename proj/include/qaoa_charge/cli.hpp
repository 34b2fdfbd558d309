// Copyright 2026 The qaoa-charge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bits.hpp"
#include "convert.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "hardware.hpp"
#include "ising.hpp"
#include "model.hpp"
#include "noise.hpp"
#include "numfmt.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "sim.hpp"

namespace qcharge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResource = 3;

/// Loads and validates a charging instance file.
inline ChargingUnit parse_instance(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ValidationError("instance file '" + path.string() + "' not found");
  try {
    return unit_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

/// Options shared by the pipeline subcommands.
struct PipelineConfig {
  std::string instance;
  std::string rho = "auto";
  std::string encoding = "bounded";
  double rho_start = 0.1;
  double rho_step = 0.1;
  double rho_max = 100.0;
  std::size_t layers = 1;
  std::uint64_t seed = 0;
  std::int64_t shots = 0;
  bool exact = false;
  std::string noise_path;
  std::string record_path;
  std::string out_path;

  void validate_paths() const {
    if (!instance.empty() && !std::filesystem::exists(instance)) {
      throw ValidationError("instance file '" + instance + "' not found");
    }
    if (!noise_path.empty() && !std::filesystem::exists(noise_path)) {
      throw ValidationError("noise file '" + noise_path + "' not found");
    }
    for (const auto& p : {record_path, out_path}) {
      if (p.empty()) continue;
      const auto parent = std::filesystem::path(p).parent_path();
      if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        throw ValidationError("output directory '" + parent.string() + "' does not exist");
      }
    }
  }
};

struct GlobalFlags {
  bool json = false;
  std::string bit_order = "device";
  std::size_t jobs = default_jobs();
  bool no_timestamp = false;

  BitOrder order() const { return parse_bit_order(bit_order); }
};

/// Instance -> QCIO -> QUBO -> Ising, resolving rho = "auto" by the penalty search.
struct Pipeline {
  ChargingUnit unit{"", 2, 1};
  QuadraticProgram qcio;
  EncodingScheme scheme;
  double rho = 0.0;
  bool rho_auto = false;
  BinaryProgram binary;
  IsingForm ising;
};

inline double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError(what + " '" + text + "' is not a number");
  }
}

inline Pipeline build_pipeline(const PipelineConfig& cfg) {
  Pipeline p;
  p.unit = parse_instance(cfg.instance);
  p.qcio = build_qcio(p.unit);
  p.scheme = EncodingScheme::parse(cfg.encoding);
  if (cfg.rho == "auto") {
    p.rho = min_feasible_penalty(p.unit, p.scheme, cfg.rho_start, cfg.rho_step, cfg.rho_max);
    p.rho_auto = true;
  } else {
    p.rho = parse_real(cfg.rho, "rho");
    detail::require(p.rho >= 0.0, "rho must be nonnegative");
  }
  p.binary = qcio_to_qubo(p.qcio, p.rho, p.scheme);
  p.ising = qubo_to_ising(p.binary.qubo);
  return p;
}

inline std::string join(const std::vector<std::int64_t>& v, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

inline std::string join(const std::vector<double>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + repr(v[i]);
  return s;
}

inline void emit_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

inline nlohmann::json ising_to_json(const IsingForm& f) {
  nlohmann::json zz = nlohmann::json::array();
  for (const auto& [ij, v] : f.hamiltonian.zz) zz.push_back({ij.first, ij.second, v});
  const auto& z = f.hamiltonian.z;
  return {{"n", f.hamiltonian.n},
          {"z", std::vector<double>(z.data(), z.data() + z.size())},
          {"zz", zz},
          {"offset", f.offset}};
}

inline Distribution load_distribution(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  if (doc.contains("counts")) return counts_to_distribution(counts_from_json(doc));
  Distribution d;
  try {
    d.order = parse_bit_order(doc.value("bit_order", std::string("device")));
    for (const auto& [k, v] : doc.at("probabilities").items()) {
      parse_bits(k, d.order);
      d.probabilities[k] = v.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": expected a counts or distribution document: " + e.what());
  }
  d.validate(1e-6);
  return d;
}

inline nlohmann::json distribution_to_json(const Distribution& d) {
  nlohmann::json probs = nlohmann::json::object();
  for (const auto& [k, v] : d.probabilities) probs[k] = v;
  return {{"bit_order", to_string(d.order)}, {"probabilities", probs}};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int cmd_model_show(const PipelineConfig& cfg, const GlobalFlags& g, std::ostream& out) {
  const auto unit = parse_instance(cfg.instance);
  const auto qcio = build_qcio(unit);
  if (g.json) {
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : qcio.variables()) vars.push_back({{"name", v.name}, {"lower", v.lower}, {"upper", v.upper}});
    emit_json(out, {{"instance", unit_to_json(unit)},
                    {"num_variables", qcio.num_variables()},
                    {"num_constraints", qcio.constraints().size()},
                    {"variables", vars}});
    return kExitOk;
  }
  out << "Charging unit '" << unit.id() << "' with " << unit.levels() << " charging levels and "
      << unit.time_slots() << " time slots\n";
  for (const auto& car : unit.cars()) {
    out << "  car '" << car.id << "': slots";
    for (int s : car.slots) out << ' ' << s;
    out << ", energy " << car.required_energy << '\n';
  }
  out << '\n' << qcio.prettyprint();
  return kExitOk;
}

inline int cmd_solve_exact(const PipelineConfig& cfg, const std::string& method, std::size_t tie_cap,
                           const GlobalFlags& g, std::ostream& out) {
  const auto unit = parse_instance(cfg.instance);
  const auto qcio = build_qcio(unit);
  ExactSolution sol;
  if (method == "composition") {
    sol = solve_charging_exact(unit, tie_cap);
  } else if (method == "integer") {
    sol = brute_force_integer(qcio, tie_cap);
  } else {
    auto p = build_pipeline(cfg);
    sol = brute_force_qubo(p.binary.qubo, tie_cap);
    std::vector<std::vector<std::int64_t>> decoded;
    for (const auto& b : sol.argmin) decoded.push_back(interpret(p.binary.encoding, BitVector(b.begin(), b.end())));
    sol.feasible = qcio.is_feasible(to_doubles(decoded.front()));
    sol.argmin = decoded;
  }
  if (g.json) {
    emit_json(out, solution_to_json(sol));
    return kExitOk;
  }
  out << "min_value: " << repr(sol.min_value) << '\n';
  out << "feasible: " << (sol.feasible ? "true" : "false") << '\n';
  out << "minimizers (" << sol.argmin.size() << (sol.argmin.size() == tie_cap ? ", capped" : "") << "):\n";
  for (const auto& p : sol.argmin) out << "  [" << join(p) << "]\n";
  return kExitOk;
}

inline int cmd_qubo_build(const PipelineConfig& cfg, const GlobalFlags& g, std::ostream& out) {
  const auto p = build_pipeline(cfg);
  const auto doc = qubo_to_json(p.binary.qubo);
  if (!cfg.out_path.empty()) write_file_atomic(cfg.out_path, doc.dump(2) + "\n");
  if (g.json) {
    emit_json(out, {{"rho", p.rho},
                    {"rho_auto", p.rho_auto},
                    {"encoding", p.scheme.describe()},
                    {"qubit_names", p.binary.encoding.qubit_names},
                    {"qubo", doc}});
    return kExitOk;
  }
  out << "rho: " << repr(p.rho) << (p.rho_auto ? " (auto)" : "") << '\n';
  out << "Number binary variables: " << p.binary.encoding.total_qubits << "\n\n";
  out << render_qubo(p.binary);
  return kExitOk;
}

inline int cmd_ising_show(const PipelineConfig& cfg, const GlobalFlags& g, std::ostream& out) {
  const auto p = build_pipeline(cfg);
  if (g.json) {
    auto j = ising_to_json(p.ising);
    j["rho"] = p.rho;
    j["terms"] = render_hamiltonian(p.ising.hamiltonian, g.order());
    emit_json(out, j);
    return kExitOk;
  }
  out << render_hamiltonian(p.ising.hamiltonian, g.order());
  out << "offset: " << repr(p.ising.offset) << '\n';
  return kExitOk;
}

inline ExperimentRecord make_record(const Pipeline& p, const GlobalFlags& g, const QaoaParameters& params,
                                    std::int64_t shots, std::uint64_t seed,
                                    const std::optional<ReadoutNoiseModel>& noise, const Counts& counts,
                                    std::string notes) {
  ExperimentRecord r;
  r.timestamp = g.no_timestamp ? "" : format_timestamp(std::chrono::system_clock::now());
  r.backend_label = "statevector";
  r.problem_hash = content_hash(qubo_to_json(p.binary.qubo).dump());
  r.rho = p.rho;
  r.layers = params.layers();
  r.betas = params.betas;
  r.gammas = params.gammas;
  r.shots = shots;
  r.seed = seed;
  r.noise = noise;
  r.counts = counts;
  r.notes = std::move(notes);
  return r;
}

inline int cmd_qaoa_run(const PipelineConfig& cfg, const std::vector<double>& betas,
                        const std::vector<double>& gammas, std::size_t top, const GlobalFlags& g,
                        std::ostream& out) {
  QaoaParameters params{betas, gammas};
  params.validate();
  detail::require(params.layers() == cfg.layers, "--p is " + std::to_string(cfg.layers) + " but " +
                                                      std::to_string(params.layers()) + " angle pairs given");
  detail::require(cfg.exact || cfg.shots >= 1, "give --exact or --shots S");
  const auto p = build_pipeline(cfg);
  std::optional<ReadoutNoiseModel> noise;
  if (!cfg.noise_path.empty()) noise = noise_from_json(read_json_file(cfg.noise_path));

  const QaoaEvaluator ev(p.ising.hamiltonian, p.ising.offset);
  const auto state = ev.state(params);
  const auto order = g.order();
  const std::size_t n = state.n;

  if (cfg.exact) {
    const double energy = ev.energy(params);
    const auto rows = annotate_top_k(state_distribution(state, order), top, p.binary, p.qcio);
    if (g.json) {
      nlohmann::json amps = nlohmann::json::array();
      for (std::uint64_t m = 0; m < state.dimension(); ++m) {
        amps.push_back({{"index", m},
                        {"bitstring", render_index(m, n, order)},
                        {"real", state.amplitudes[m].real()},
                        {"imag", state.amplitudes[m].imag()},
                        {"probability", std::norm(state.amplitudes[m])}});
      }
      emit_json(out, {{"rho", p.rho}, {"energy", energy}, {"amplitudes", amps}, {"top", annotation_to_json(rows)}});
      return kExitOk;
    }
    out << "energy (offset included): " << repr(energy) << "\n\n";
    out << "index bitstring amplitude probability\n";
    for (std::uint64_t m = 0; m < state.dimension(); ++m) {
      const auto a = state.amplitudes[m];
      std::ostringstream amp;
      amp << std::scientific << std::setprecision(8) << a.real() << (a.imag() < 0 ? "-" : "+") << std::abs(a.imag())
          << "j";
      out << m << ' ' << render_index(m, n, order) << ' ' << amp.str() << ' ' << repr(std::norm(a)) << '\n';
    }
    out << '\n' << annotation_csv(rows);
    return kExitOk;
  }

  const auto counts = sample_counts(state, cfg.shots, cfg.seed, noise, order);
  double estimate = 0.0;
  for (const auto& [k, c] : counts.counts) {
    estimate += static_cast<double>(c) * ising_energy(p.ising.hamiltonian, parse_bits(k, order));
  }
  estimate = estimate / static_cast<double>(cfg.shots) + p.ising.offset;
  const auto rows = annotate_top_k(counts_to_distribution(counts), top, p.binary, p.qcio);
  const auto record = make_record(p, g, params, cfg.shots, cfg.seed, noise, counts, "qaoa run");
  if (!cfg.record_path.empty()) save_record(cfg.record_path, record);
  if (g.json) {
    emit_json(out, {{"rho", p.rho},
                    {"energy_estimate", estimate},
                    {"counts", counts_to_json(counts)},
                    {"top", annotation_to_json(rows)},
                    {"record", record_to_json(record)}});
    return kExitOk;
  }
  out << "energy estimate (offset included): " << repr(estimate) << "\n\n" << annotation_csv(rows);
  return kExitOk;
}

inline int cmd_qaoa_optimize(const PipelineConfig& cfg, std::size_t starts, const LocalOptions& options,
                             const GlobalFlags& g, std::ostream& out) {
  const auto p = build_pipeline(cfg);
  const QaoaEvaluator ev(p.ising.hamiltonian, p.ising.offset);
  const auto mode = cfg.shots > 0 ? EvaluationMode::shot_mode(cfg.shots, cfg.seed) : EvaluationMode::exact_mode();
  const auto result = multi_start(ev, cfg.layers, starts, cfg.seed, mode, options, g.jobs);
  const auto& best = result.best_run();
  const auto params = QaoaParameters::from_flat(best.final);

  const std::int64_t shots = cfg.shots > 0 ? cfg.shots : 8000;
  const auto counts = sample_counts(ev.state(params), shots, cfg.seed, std::nullopt, g.order());
  const auto record = make_record(p, g, params, shots, cfg.seed, std::nullopt, counts, "qaoa optimize best run");
  if (!cfg.record_path.empty()) save_record(cfg.record_path, record);

  if (g.json) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : result.runs) runs.push_back(run_to_json(r));
    emit_json(out, {{"rho", p.rho},
                    {"best_index", result.best},
                    {"best_value", best.final_value},
                    {"betas", params.betas},
                    {"gammas", params.gammas},
                    {"runs", runs},
                    {"record", record_to_json(record)}});
    return kExitOk;
  }
  out << "starts: " << starts << ", layers: " << cfg.layers << ", rho: " << repr(p.rho) << '\n';
  out << "best value (offset included): " << repr(best.final_value) << " (start " << result.best << ", "
      << best.nfev << " evaluations)\n";
  out << "betas: " << join(params.betas) << "\ngammas: " << join(params.gammas) << '\n';
  return kExitOk;
}

inline int cmd_landscape(const PipelineConfig& cfg, std::size_t beta_points, std::size_t gamma_points,
                         const GlobalFlags& g, std::ostream& out) {
  const auto p = build_pipeline(cfg);
  const QaoaEvaluator ev(p.ising.hamiltonian, p.ising.offset);
  const auto grid = landscape_grid(ev, beta_points, gamma_points, g.jobs);
  if (!cfg.out_path.empty()) write_file_atomic(cfg.out_path, landscape_csv(grid));
  if (g.json) {
    auto j = landscape_to_json(grid);
    j["rho"] = p.rho;
    emit_json(out, j);
  } else if (cfg.out_path.empty()) {
    out << landscape_csv(grid);
  } else {
    out << "wrote " << beta_points * gamma_points << " grid points to " << cfg.out_path << '\n';
  }
  return kExitOk;
}

inline int cmd_transpile_report(const PipelineConfig& cfg, const std::string& map_path, const std::string& topology,
                                std::size_t n_seeds, const GlobalFlags& g, std::ostream& out) {
  detail::require(n_seeds >= 1, "--seeds must be >= 1");
  const auto p = build_pipeline(cfg);
  const auto& h = p.ising.hamiltonian;
  CouplingMap map;
  if (!map_path.empty()) {
    map = coupling_map_from_json(read_json_file(map_path));
  } else if (topology == "line") {
    map = CouplingMap::line(h.n);
  } else if (topology == "ring") {
    map = CouplingMap::ring(h.n);
  } else if (topology == "full") {
    map = CouplingMap::full(h.n);
  } else {
    throw ValidationError("unknown topology '" + topology + "' (expected line, ring or full)");
  }
  std::vector<std::uint64_t> seeds(n_seeds);
  for (std::size_t s = 0; s < n_seeds; ++s) seeds[s] = s;
  const auto baseline = count_fully_connected(h, cfg.layers);
  const auto profile = logical_gate_profile(h, cfg.layers);
  const auto sweep = best_of_seeds(h, map, cfg.layers, seeds, g.jobs);
  if (!cfg.out_path.empty()) write_file_atomic(cfg.out_path, budget_csv(sweep.all));
  if (g.json) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : sweep.all) {
      auto b = budget_to_json(r.budget);
      b["seed"] = r.seed;
      all.push_back(b);
    }
    emit_json(out, {{"logical", {{"rzz", profile.rzz}, {"rz", profile.rz}, {"rx", profile.rx}, {"h", profile.h}}},
                    {"fully_connected", budget_to_json(baseline)},
                    {"best_seed", sweep.best.seed},
                    {"best", budget_to_json(sweep.best.budget)},
                    {"budgets", all}});
    return kExitOk;
  }
  out << "logical gates: rzz " << profile.rzz << ", rz " << profile.rz << ", rx " << profile.rx << ", h "
      << profile.h << '\n';
  out << "fully connected: cnot " << baseline.cnot << ", single_qubit_hw " << baseline.single_qubit_hw
      << ", depth " << baseline.depth << '\n';
  out << "best of " << n_seeds << " seeds (seed " << sweep.best.seed << "): cnot " << sweep.best.budget.cnot
      << ", swaps " << sweep.best.budget.swaps << ", depth " << sweep.best.budget.depth << "\n\n";
  out << budget_csv(sweep.all);
  return kExitOk;
}

inline int cmd_mitigate(const std::string& counts_path, const std::string& noise_path, const GlobalFlags& g,
                        std::ostream& out) {
  const auto d = load_distribution(counts_path);
  const auto model = noise_from_json(read_json_file(noise_path));
  const auto mitigated = reorder(mitigate_distribution(d, model), g.order());
  if (g.json) {
    emit_json(out, distribution_to_json(mitigated));
    return kExitOk;
  }
  out << "bitstring,probability\n";
  for (const auto& [k, v] : mitigated.probabilities) out << k << ',' << repr(v) << '\n';
  return kExitOk;
}

inline int cmd_fidelity(const std::string& p_path, const std::string& q_path, bool squared, const GlobalFlags& g,
                        std::ostream& out) {
  const auto p = load_distribution(p_path);
  const auto q = reorder(load_distribution(q_path), p.order);
  const double f = fidelity(p, q, squared);
  if (g.json) {
    emit_json(out, {{"fidelity", f}, {"squared", squared}});
  } else {
    out << "fidelity" << (squared ? " (squared)" : "") << ": " << repr(f) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

inline constexpr const char* kInstanceSchema =
    "Instance JSON: {\"charging_unit\": {\"id\": str, \"number_charging_levels\": int, "
    "\"number_time_slots\": int}, \"cars\": [{\"car_id\": str, \"time_slots_at_charging_unit\": [int], "
    "\"required_energy\": int}]}";

/// Runs one command line (without the program name). Returns the exit status.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EV charging schedules through QUBO, Ising and QAOA simulation", "qaoa_charge"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(kInstanceSchema);

  GlobalFlags g;
  PipelineConfig cfg;
  app.add_flag("--json", g.json, "Machine-readable JSON output");
  app.add_option("--bit-order", g.bit_order, "Bitstring rendering: device (rightmost is qubit 0) or variable")
      ->check(CLI::IsMember({"device", "variable"}));
  app.add_option("--jobs", g.jobs, "Worker threads (default QAOA_CHARGE_JOBS or 1)")->check(CLI::PositiveNumber);
  app.add_flag("--no-timestamp", g.no_timestamp, "Leave record timestamps empty");

  auto instance_opt = [&](CLI::App* sub) { sub->add_option("--instance", cfg.instance, "Instance JSON file")->required(); };
  auto rho_opts = [&](CLI::App* sub) {
    sub->add_option("--rho", cfg.rho, "Penalty weight, or 'auto' for the smallest feasible grid value");
    sub->add_option("--encoding", cfg.encoding, "bounded or fixed:<w>");
    sub->add_option("--rho-start", cfg.rho_start, "Grid start for --rho auto");
    sub->add_option("--rho-step", cfg.rho_step, "Grid step for --rho auto");
    sub->add_option("--rho-max", cfg.rho_max, "Grid end for --rho auto");
  };

  auto* model = app.add_subcommand("model", "Charging model")->require_subcommand(1);
  auto* model_show = model->add_subcommand("show", "Print the unit and its constrained integer program");
  instance_opt(model_show);

  std::string method = "composition";
  std::size_t tie_cap = 16;
  auto* solve = app.add_subcommand("solve-exact", "Exact minimum by enumeration");
  instance_opt(solve);
  rho_opts(solve);
  solve->add_option("--method", method, "composition, integer or qubo")
      ->check(CLI::IsMember({"composition", "integer", "qubo"}));
  solve->add_option("--tie-cap", tie_cap, "Maximum number of minimizers listed")->check(CLI::PositiveNumber);
  solve->footer("Solution JSON: {\"min_value\": real, \"argmin\": [[int]], \"feasible\": bool}");

  auto* qubo = app.add_subcommand("qubo", "Binary quadratic form")->require_subcommand(1);
  auto* qubo_build = qubo->add_subcommand("build", "Penalize and binary-encode the instance");
  instance_opt(qubo_build);
  rho_opts(qubo_build);
  qubo_build->add_option("--out", cfg.out_path, "Write the QUBO JSON here");
  qubo_build->footer("QUBO JSON: {\"n\": int, \"quadratic\": [[i, j, value]] (i <= j), \"linear\": [value], "
                     "\"constant\": value}");

  auto* ising = app.add_subcommand("ising", "Cost Hamiltonian")->require_subcommand(1);
  auto* ising_show = ising->add_subcommand("show", "Print the Pauli-Z Hamiltonian and its offset");
  instance_opt(ising_show);
  rho_opts(ising_show);

  std::vector<double> betas;
  std::vector<double> gammas;
  std::size_t top = 20;
  auto* qaoa = app.add_subcommand("qaoa", "QAOA simulation")->require_subcommand(1);
  auto* qaoa_run = qaoa->add_subcommand("run", "Simulate fixed angles");
  instance_opt(qaoa_run);
  rho_opts(qaoa_run);
  qaoa_run->add_option("--p", cfg.layers, "Number of layers")->required();
  qaoa_run->add_option("--betas", betas, "Comma-separated mixer angles")->delimiter(',')->required();
  qaoa_run->add_option("--gammas", gammas, "Comma-separated phase angles")->delimiter(',')->required();
  qaoa_run->add_flag("--exact", cfg.exact, "Dump the exact statevector");
  qaoa_run->add_option("--shots", cfg.shots, "Number of samples");
  qaoa_run->add_option("--seed", cfg.seed, "Sampling seed");
  qaoa_run->add_option("--noise", cfg.noise_path, "Readout noise JSON {\"p01\": [..], \"p10\": [..]}");
  qaoa_run->add_option("--top", top, "Rows in the annotated table")->check(CLI::PositiveNumber);
  qaoa_run->add_option("--record", cfg.record_path, "Write the experiment record JSON here");
  qaoa_run->footer("Counts JSON: {\"shots\": int, \"bit_order\": \"device\"|\"variable\", \"counts\": {bitstring: int}}");

  std::size_t starts = 50;
  LocalOptions local;
  auto* qaoa_opt = qaoa->add_subcommand("optimize", "Seeded multi-start angle optimization");
  instance_opt(qaoa_opt);
  rho_opts(qaoa_opt);
  std::size_t opt_layers = 2;
  qaoa_opt->add_option("--p", opt_layers, "Number of layers")->check(CLI::PositiveNumber);
  qaoa_opt->add_option("--starts", starts, "Number of random starts")->check(CLI::PositiveNumber);
  qaoa_opt->add_option("--seed", cfg.seed, "Base seed");
  qaoa_opt->add_option("--shots", cfg.shots, "Estimate energies from this many samples (default exact)");
  qaoa_opt->add_option("--max-fev", local.max_fev, "Evaluation budget per start")->check(CLI::PositiveNumber);
  qaoa_opt->add_option("--record", cfg.record_path, "Write the experiment record of the best run here");

  std::size_t beta_points = 100;
  std::size_t gamma_points = 200;
  auto* land = app.add_subcommand("landscape", "Exact p = 1 energy grid over [0, pi] x [0, 2 pi]");
  instance_opt(land);
  rho_opts(land);
  land->add_option("--beta-points", beta_points, "Grid points along beta");
  land->add_option("--gamma-points", gamma_points, "Grid points along gamma");
  land->add_option("--out", cfg.out_path, "Write the CSV here");
  land->footer("Landscape CSV: beta,gamma,energy (row-major over beta)");

  std::string map_path;
  std::string topology = "line";
  std::size_t n_seeds = 40;
  auto* transpile = app.add_subcommand("transpile", "Gate accounting")->require_subcommand(1);
  auto* report = transpile->add_subcommand("report", "Routed budgets per seed and the fully connected baseline");
  instance_opt(report);
  rho_opts(report);
  report->add_option("--p", cfg.layers, "Number of layers");
  report->add_option("--coupling-map", map_path, "Coupling map JSON {\"n_qubits\": int, \"edges\": [[a, b]]}");
  report->add_option("--topology", topology, "Built-in map when no file is given: line, ring or full");
  report->add_option("--seeds", n_seeds, "Route with seeds 0 .. N-1");
  report->add_option("--out", cfg.out_path, "Write the budget CSV here");
  report->footer("Budget CSV: seed,cnot,swaps,single_qubit_hw,depth");

  std::string counts_path;
  auto* mitigate = app.add_subcommand("mitigate", "Readout-error mitigation of measured counts");
  mitigate->add_option("--counts", counts_path, "Counts JSON")->required()->check(CLI::ExistingFile);
  mitigate->add_option("--noise", cfg.noise_path, "Noise JSON")->required()->check(CLI::ExistingFile);

  std::string p_path;
  std::string q_path;
  bool squared = false;
  auto* fid = app.add_subcommand("fidelity", "F = sum sqrt(p q) between two outcome distributions");
  fid->add_option("--p", p_path, "Counts or distribution JSON")->required()->check(CLI::ExistingFile);
  fid->add_option("--q", q_path, "Counts or distribution JSON")->required()->check(CLI::ExistingFile);
  fid->add_flag("--squared", squared, "Report F^2");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }

  try {
    cfg.validate_paths();
    if (model_show->parsed()) return cmd_model_show(cfg, g, out);
    if (solve->parsed()) return cmd_solve_exact(cfg, method, tie_cap, g, out);
    if (qubo_build->parsed()) return cmd_qubo_build(cfg, g, out);
    if (ising_show->parsed()) return cmd_ising_show(cfg, g, out);
    if (qaoa_run->parsed()) return cmd_qaoa_run(cfg, betas, gammas, top, g, out);
    if (qaoa_opt->parsed()) {
      cfg.layers = opt_layers;
      return cmd_qaoa_optimize(cfg, starts, local, g, out);
    }
    if (land->parsed()) return cmd_landscape(cfg, beta_points, gamma_points, g, out);
    if (report->parsed()) return cmd_transpile_report(cfg, map_path, topology, n_seeds, g, out);
    if (mitigate->parsed()) return cmd_mitigate(counts_path, cfg.noise_path, g, out);
    if (fid->parsed()) return cmd_fidelity(p_path, q_path, squared, g, out);
  } catch (const ValidationError& e) {
    err << "error: validation: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "error: infeasible: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const ResourceError& e) {
    err << "error: resource: " << one_line(e.what()) << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
    return kExitFailure;
  }
  err << "error: usage: no command given\n";
  return kExitValidation;
}

}  // namespace qcharge::cli
