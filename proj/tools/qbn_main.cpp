// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qbn/harness.hpp"
#include "qbn/qasm.hpp"
#include "qbn/rng.hpp"

namespace {

using namespace qbn;

DeviceModel resolve_device(const std::string& name, int default_qubits) {
  DeviceModel d;
  if (find_device(name, default_qubits, d)) return d;
  if (std::filesystem::exists(name)) return load_device_file(name);
  throw ValidationError("unknown device '" + name + "' (not in catalog, not a file)");
}

QuantumCircuit load_circuit_input(const std::string& path, CompilationPlan* plan_out) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".qasm") {
    if (plan_out) *plan_out = CompilationPlan{};
    return from_qasm_file(path);
  }
  const BayesianNetwork bn = load_network_file(path);
  CompileResult res = compile(bn);
  if (plan_out) *plan_out = res.plan;
  return res.circuit;
}

// The QASM subset has no controlled-rotation forms; expand them exactly.
QuantumCircuit expand_for_qasm(const QuantumCircuit& c) {
  QuantumCircuit out = c;
  out.ops.clear();
  for (const auto& op : c.ops) {
    if (op.kind == GateKind::CRY) {
      auto seq = decompose_cry(op.params[0], op.qubits[0], op.qubits[1]);
      out.ops.insert(out.ops.end(), seq.begin(), seq.end());
    } else if (op.kind == GateKind::CCRY) {
      for (const auto& g : decompose_ccry(op.params[0], op.qubits[0], op.qubits[1], op.qubits[2])) {
        if (g.kind == GateKind::CRY) {
          auto seq = decompose_cry(g.params[0], g.qubits[0], g.qubits[1]);
          out.ops.insert(out.ops.end(), seq.begin(), seq.end());
        } else {
          out.ops.push_back(g);
        }
      }
    } else {
      out.ops.push_back(op);
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::vector<OptimizationLevel> parse_levels(const std::string& spec) {
  std::vector<OptimizationLevel> levels;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) levels.push_back(level_from_int(std::stoi(item)));
  if (levels.empty()) throw ValidationError("no optimization levels given");
  return levels;
}

void print_gate_summary(const QuantumCircuit& c) {
  std::map<std::string, size_t> by_kind;
  for (const auto& op : c.ops) ++by_kind[gate_name(op.kind)];
  std::cout << "qubits: " << c.width << "  gates: " << c.ops.size() << " (";
  bool first = true;
  for (const auto& [k, n] : by_kind) {
    std::cout << (first ? "" : ", ") << k << " x" << n;
    first = false;
  }
  std::cout << ")\n";
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Bayesian network to quantum circuit toolkit"};
  app.require_subcommand(1);

  std::string bn_path, qasm_out, device_name = "ideal", out_path, boxplot_path, devices_spec, levels_spec = "0,1,2,3";
  int level = 1, runs = 10;
  uint64_t shots = 8192, seed = 0;

  auto* cmd_validate = app.add_subcommand("validate", "check a network document");
  cmd_validate->add_option("network", bn_path)->required();

  auto* cmd_infer = app.add_subcommand("infer", "exact marginal probabilities");
  cmd_infer->add_option("network", bn_path)->required();

  auto* cmd_compile = app.add_subcommand("compile", "compile a network to a quantum circuit");
  cmd_compile->add_option("network", bn_path)->required();
  cmd_compile->add_option("--qasm", qasm_out, "write the circuit (controlled rotations expanded)");

  auto* cmd_transpile = app.add_subcommand("transpile", "rewrite a circuit for a device");
  cmd_transpile->add_option("input", bn_path, "network .json or circuit .qasm")->required();
  cmd_transpile->add_option("--device", device_name)->required();
  cmd_transpile->add_option("--level", level)->check(CLI::Range(0, 3));
  cmd_transpile->add_option("--seed", seed);
  cmd_transpile->add_option("--qasm", qasm_out, "write the transpiled circuit");

  auto* cmd_run = app.add_subcommand("run", "noisy execution, print counts and marginals");
  cmd_run->add_option("network", bn_path)->required();
  cmd_run->add_option("--device", device_name)->required();
  cmd_run->add_option("--level", level)->check(CLI::Range(0, 3));
  cmd_run->add_option("--shots", shots);
  cmd_run->add_option("--seed", seed);
  cmd_run->add_option("--out", out_path, "write counts as JSON");

  auto* cmd_eval = app.add_subcommand("evaluate", "full device x level evaluation, CSV report");
  cmd_eval->add_option("network", bn_path)->required();
  cmd_eval->add_option("--devices", devices_spec, "comma-separated device names/files")->required();
  cmd_eval->add_option("--levels", levels_spec);
  cmd_eval->add_option("--runs", runs);
  cmd_eval->add_option("--shots", shots);
  cmd_eval->add_option("--seed", seed);
  cmd_eval->add_option("--out", out_path, "report CSV path")->required();
  cmd_eval->add_option("--boxplot", boxplot_path, "per-run marginals CSV path");

  auto* cmd_devices = app.add_subcommand("devices", "device catalog");
  auto* cmd_devices_list = cmd_devices->add_subcommand("list", "list catalog devices");
  auto* cmd_devices_show = cmd_devices->add_subcommand("show", "print one device document");
  std::string show_name;
  cmd_devices_show->add_option("name", show_name)->required();
  cmd_devices->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  if (cmd_validate->parsed()) {
    BayesianNetwork bn;
    try {
      bn = load_network_file(bn_path);
    } catch (const ValidationError& e) {
      std::cout << e.what() << "\n";
      return 1;
    }
    const auto violations = validate(bn);
    if (violations.empty()) {
      std::cout << "ok: " << bn.size() << " nodes\n";
      return 0;
    }
    for (const auto& v : violations) std::cout << v << "\n";
    return 1;
  }

  if (cmd_infer->parsed()) {
    const BayesianNetwork bn = load_network_file(bn_path);
    const auto marginals = exact_marginals(bn);
    for (const auto& node : bn.nodes)
      std::printf("P(%s=0) = %.6f\n", node.name.c_str(), marginals[static_cast<size_t>(node.id)]);
    return 0;
  }

  if (cmd_compile->parsed()) {
    const BayesianNetwork bn = load_network_file(bn_path);
    const CompileResult res = compile(bn);
    print_gate_summary(res.circuit);
    const double dev = verify_distribution(bn, res.circuit, res.plan);
    std::printf("distribution check: max deviation %.3g\n", dev);
    if (!qasm_out.empty()) {
      write_file(qasm_out, to_qasm(expand_for_qasm(res.circuit)));
      std::cout << "wrote " << qasm_out << "\n";
    }
    return 0;
  }

  if (cmd_transpile->parsed()) {
    const QuantumCircuit input = load_circuit_input(bn_path, nullptr);
    const DeviceModel device = resolve_device(device_name, input.width);
    const TranspileResult tr = transpile(input, device, level_from_int(level), seed);
    std::printf("device %s level %d: %zu ops -> %zu ops (%zu cx, %zu swaps), est. success %.4f\n",
                device.name.c_str(), level, tr.metrics.input_ops, tr.metrics.output_ops, tr.metrics.output_cnots,
                tr.metrics.swaps_inserted, tr.metrics.estimated_success);
    std::cout << "layout:";
    for (size_t q = 0; q < tr.layout.log_to_phys.size(); ++q)
      std::cout << " " << q << "->" << tr.layout.log_to_phys[q];
    std::cout << "\nfinal:";
    for (size_t q = 0; q < tr.final_permutation.size(); ++q)
      if (static_cast<int>(q) < tr.logical_width) std::cout << " " << q << "->" << tr.final_permutation[q];
    std::cout << "\n";
    if (!qasm_out.empty()) {
      write_file(qasm_out, to_qasm(tr.circuit));
      std::cout << "wrote " << qasm_out << "\n";
    }
    return 0;
  }

  if (cmd_run->parsed()) {
    const BayesianNetwork bn = load_network_file(bn_path);
    const CompileResult res = compile(bn);
    const DeviceModel device = resolve_device(device_name, res.circuit.width);
    const TranspileResult tr = transpile(res.circuit, device, level_from_int(level), seed);
    const ShotCounts counts = run_noisy(tr.circuit, device, shots, seed);
    const auto marginals = marginals_from_counts(counts, node_bit_table(tr.circuit, bn.size()));
    for (const auto& [bits, n] : counts.counts) std::cout << bits << " " << n << "\n";
    for (const auto& node : bn.nodes)
      std::printf("P(%s=0) = %.6f\n", node.name.c_str(), marginals[static_cast<size_t>(node.id)]);
    if (!out_path.empty()) {
      char hex[20];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(calibration_hash(device)));
      write_file(out_path, counts_to_json(counts, {{"network", bn_path},
                                                   {"device", device.name},
                                                   {"level", std::to_string(level)},
                                                   {"seed", std::to_string(seed)},
                                                   {"calibration", hex}}));
      std::cout << "wrote " << out_path << "\n";
    }
    return 0;
  }

  if (cmd_eval->parsed()) {
    ExperimentConfig cfg;
    cfg.network = load_network_file(bn_path);
    cfg.network_name = std::filesystem::path(bn_path).stem().string();
    cfg.levels = parse_levels(levels_spec);
    cfg.runs = runs;
    cfg.shots = shots;
    cfg.base_seed = seed;
    std::stringstream ss(devices_spec);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.devices.push_back(resolve_device(item, static_cast<int>(cfg.network.size()) + 1));
    const EvaluationReport report = run_experiment(cfg);
    write_file(out_path, report_to_csv(report));
    std::cout << "wrote " << out_path << "\n";
    if (!boxplot_path.empty()) {
      write_file(boxplot_path, report_boxplot_csv(report));
      std::cout << "wrote " << boxplot_path << "\n";
    }
    for (const auto& cell : report.cells)
      std::printf("%-12s level %d  rmspe %6.2f%%\n", cell.device.c_str(), cell.level, cell.rmspe_percent);
    return 0;
  }

  if (cmd_devices_list->parsed()) {
    for (const auto& d : builtin_catalog())
      std::printf("%-12s %2d qubits, %2zu edges, calibrated %s\n", d.name.c_str(), d.n_qubits, d.coupling.size(),
                  d.calibrated_at.c_str());
    return 0;
  }
  if (cmd_devices_show->parsed()) {
    const DeviceModel d = resolve_device(show_name, 5);
    std::cout << save_device(d);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const qbn::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
