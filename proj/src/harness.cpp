// SPDX-License-Identifier: Apache-2.0
#include "qbn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qbn/rng.hpp"

namespace qbn {

std::vector<double> marginals_from_counts(const ShotCounts& counts, const std::vector<int>& node_bit) {
  const size_t n_bits = counts.bit_qubits.size();
  for (int b : node_bit)
    if (b < 0 || static_cast<size_t>(b) >= n_bits)
      throw ValidationError("marginals_from_counts: node bit index out of range");
  std::vector<uint64_t> zeros(node_bit.size(), 0);
  uint64_t total = 0;
  for (const auto& [bits, n] : counts.counts) {
    if (bits.size() != n_bits)
      throw ValidationError("marginals_from_counts: key '" + bits + "' does not match " +
                            std::to_string(n_bits) + " measured bits");
    for (size_t node = 0; node < node_bit.size(); ++node) {
      const char ch = bits[n_bits - 1 - static_cast<size_t>(node_bit[node])];
      if (ch == '0') zeros[node] += n;
    }
    total += n;
  }
  if (total != counts.shots) throw ValidationError("marginals_from_counts: counts do not sum to shots");
  std::vector<double> out(node_bit.size());
  for (size_t node = 0; node < node_bit.size(); ++node)
    out[node] = static_cast<double>(zeros[node]) / static_cast<double>(counts.shots);
  return out;
}

std::vector<double> marginals_from_counts(const ShotCounts& counts, const CompilationPlan& plan) {
  std::vector<int> node_bit(plan.node_qubit.size(), -1);
  for (size_t node = 0; node < plan.node_qubit.size(); ++node) {
    auto it = std::find(counts.bit_qubits.begin(), counts.bit_qubits.end(), plan.node_qubit[node]);
    if (it == counts.bit_qubits.end())
      throw ValidationError("marginals_from_counts: node " + std::to_string(node) + " was not measured");
    node_bit[node] = static_cast<int>(it - counts.bit_qubits.begin());
  }
  return marginals_from_counts(counts, node_bit);
}

std::vector<int> node_bit_table(const QuantumCircuit& executed, size_t n_nodes) {
  std::vector<int> node_bit(n_nodes, -1);
  for (size_t j = 0; j < executed.measured.size(); ++j) {
    const auto role = executed.roles[static_cast<size_t>(executed.measured[j])];
    if (!role.has_value()) continue;
    if (static_cast<size_t>(*role) < n_nodes) node_bit[static_cast<size_t>(*role)] = static_cast<int>(j);
  }
  for (size_t node = 0; node < n_nodes; ++node)
    if (node_bit[node] < 0)
      throw ValidationError("node " + std::to_string(node) + " is not measured by the executed circuit");
  return node_bit;
}

double rmspe(const std::vector<double>& true_vals, const std::vector<double>& means) {
  if (true_vals.empty() || true_vals.size() != means.size())
    throw ValidationError("rmspe: lists must be non-empty and of equal length");
  double acc = 0.0;
  for (size_t i = 0; i < true_vals.size(); ++i) {
    if (true_vals[i] == 0.0)
      throw ValidationError("rmspe: true value at index " + std::to_string(i) +
                            " is 0; relative error undefined");
    const double rel = (true_vals[i] - means[i]) / true_vals[i];
    acc += rel * rel;
  }
  return 100.0 * std::sqrt(acc / static_cast<double>(true_vals.size()));
}

uint64_t derive_run_seed(uint64_t base_seed, const std::string& device, int level, int run) {
  uint64_t h = fnv1a64_u64(base_seed);
  h = fnv1a64(device, h);
  const unsigned char sep = 0xff;
  h = fnv1a64(&sep, 1, h);
  const unsigned char lv = static_cast<unsigned char>(level);
  h = fnv1a64(&lv, 1, h);
  h = fnv1a64_u64(static_cast<uint64_t>(run), h);
  return h;
}

EvaluationReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw ValidationError("run_experiment: runs must be >= 1");
  if (cfg.shots < 1) throw ValidationError("run_experiment: shots must be >= 1");
  if (cfg.devices.empty()) throw ValidationError("run_experiment: no devices");
  require_valid(cfg.network);

  EvaluationReport report;
  report.network_name = cfg.network_name;
  report.runs = cfg.runs;
  report.shots = cfg.shots;
  report.base_seed = cfg.base_seed;
  for (const auto& node : cfg.network.nodes) report.node_names.push_back(node.name);
  report.true_marginals = exact_marginals(cfg.network);
  if (cfg.runs == 1) report.notes.push_back("runs=1: std reported as 0 by convention");

  const CompileResult compiled = compile(cfg.network);
  const size_t n_nodes = cfg.network.size();

  for (const auto& device : cfg.devices) {
    char hexbuf[20];
    std::snprintf(hexbuf, sizeof hexbuf, "%016llx",
                  static_cast<unsigned long long>(calibration_hash(device)));
    report.calibrations.push_back(device.name + "=" + hexbuf);

    for (OptimizationLevel lvl : cfg.levels) {
      CellResult cell;
      cell.device = device.name;
      cell.level = static_cast<int>(lvl);
      TranspileResult tr;
      try {
        tr = transpile(compiled.circuit, device, lvl);
      } catch (const Error& e) {
        throw Error("(" + device.name + ", level " + std::to_string(static_cast<int>(lvl)) + "): " + e.what());
      }
      cell.metrics = tr.metrics;
      const std::vector<int> node_bit = node_bit_table(tr.circuit, n_nodes);

      cell.mean.assign(n_nodes, 0.0);
      cell.stddev.assign(n_nodes, 0.0);
      for (int run = 0; run < cfg.runs; ++run) {
        const uint64_t seed = derive_run_seed(cfg.base_seed, device.name, cell.level, run);
        ShotCounts counts;
        try {
          counts = run_noisy(tr.circuit, device, cfg.shots, seed);
        } catch (const Error& e) {
          throw Error("(" + device.name + ", level " + std::to_string(cell.level) + ", run " +
                      std::to_string(run) + "): " + e.what());
        }
        cell.run_marginals.push_back(marginals_from_counts(counts, node_bit));
      }
      for (size_t node = 0; node < n_nodes; ++node) {
        double m = 0.0;
        for (const auto& rm : cell.run_marginals) m += rm[node];
        m /= cfg.runs;
        cell.mean[node] = m;
        if (cfg.runs > 1) {
          double ss = 0.0;
          for (const auto& rm : cell.run_marginals) ss += (rm[node] - m) * (rm[node] - m);
          cell.stddev[node] = std::sqrt(ss / (cfg.runs - 1));
        }
      }
      cell.rmspe_percent = rmspe(report.true_marginals, cell.mean);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void header(std::ostringstream& out, const EvaluationReport& r) {
  out << "# network=" << r.network_name << " runs=" << r.runs << " shots=" << r.shots
      << " base_seed=" << r.base_seed << "\n";
  out << "# calibration:";
  for (const auto& c : r.calibrations) out << " " << c;
  out << "\n";
  for (const auto& n : r.notes) out << "# note: " << n << "\n";
}

}  // namespace

std::string report_to_csv(const EvaluationReport& r) {
  std::ostringstream out;
  header(out, r);
  out << "device,level,kind,node,true_p0,mean_p0,std_p0,rmspe_percent\n";
  for (const auto& cell : r.cells) {
    for (size_t node = 0; node < r.node_names.size(); ++node) {
      out << cell.device << "," << cell.level << ",node," << r.node_names[node] << ","
          << fmt(r.true_marginals[node]) << "," << fmt(cell.mean[node]) << "," << fmt(cell.stddev[node]) << ",\n";
    }
    out << cell.device << "," << cell.level << ",summary,,,,," << fmt(cell.rmspe_percent, 4) << "\n";
  }
  return out.str();
}

std::string report_boxplot_csv(const EvaluationReport& r) {
  std::ostringstream out;
  header(out, r);
  out << "device,level,run,node,p0\n";
  for (const auto& cell : r.cells)
    for (size_t run = 0; run < cell.run_marginals.size(); ++run)
      for (size_t node = 0; node < r.node_names.size(); ++node)
        out << cell.device << "," << cell.level << "," << run << "," << r.node_names[node] << ","
            << fmt(cell.run_marginals[run][node]) << "\n";
  return out.str();
}

}  // namespace qbn
