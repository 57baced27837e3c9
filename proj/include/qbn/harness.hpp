// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbn/bayesnet.hpp"
#include "qbn/cqbn.hpp"
#include "qbn/device.hpp"
#include "qbn/sim.hpp"
#include "qbn/transpiler.hpp"

namespace qbn {

struct ExperimentConfig {
  BayesianNetwork network;
  std::string network_name = "network";
  std::vector<DeviceModel> devices;
  std::vector<OptimizationLevel> levels = {OptimizationLevel::L0, OptimizationLevel::L1, OptimizationLevel::L2,
                                           OptimizationLevel::L3};
  int runs = 10;
  uint64_t shots = 8192;
  uint64_t base_seed = 0;
};

struct CellResult {
  std::string device;
  int level = 0;
  std::vector<std::vector<double>> run_marginals;  // [run][node], P(node = 0)
  std::vector<double> mean;                        // per node, over runs
  std::vector<double> stddev;                      // sample std (n-1); 0 when runs == 1
  double rmspe_percent = 0.0;
  TranspileMetrics metrics;
};

struct EvaluationReport {
  std::vector<std::string> node_names;
  std::vector<double> true_marginals;  // exact inference
  std::vector<CellResult> cells;       // device-major, level-minor, config order
  // provenance
  std::string network_name;
  int runs = 0;
  uint64_t shots = 0;
  uint64_t base_seed = 0;
  std::vector<std::string> calibrations;  // "<device>=<fnv64 hex>" per device
  std::vector<std::string> notes;
};

// P(node = 0) per node from measured counts. The ShotCounts bit layout maps
// bit j to counts.bit_qubits[j]; node positions come from the plan (logical
// circuits) or from an explicit node -> bit index table (transpiled
// circuits; build it with node_bit_table).
std::vector<double> marginals_from_counts(const ShotCounts& counts, const std::vector<int>& node_bit);
std::vector<double> marginals_from_counts(const ShotCounts& counts, const CompilationPlan& plan);

// node -> bit position, derived from the roles of the circuit that ran.
std::vector<int> node_bit_table(const QuantumCircuit& executed, size_t n_nodes);

// Root mean square percentage error, in percent:
// 100 * sqrt(mean_i(((true_i - mean_i) / true_i)^2)). Throws if any true
// value is exactly 0 (the relative error is undefined there).
double rmspe(const std::vector<double>& true_vals, const std::vector<double>& means);

// run r of device d at level l draws its seed from
// fnv1a64(le64(base) || d || 0xff || byte(l) || le64(r)).
uint64_t derive_run_seed(uint64_t base_seed, const std::string& device, int level, int run);

// Compile once, transpile once per (device, level), then `runs` noisy
// executions with derived seeds; deterministic given the base seed.
EvaluationReport run_experiment(const ExperimentConfig& cfg);

// CSV rows: kind=node rows carry per-node mean/std, kind=summary rows carry
// the cell RMSPE. Header comments record provenance. Byte-stable for a given
// config.
std::string report_to_csv(const EvaluationReport& report);
// One row per (device, level, run, node) raw marginal, for box plots.
std::string report_boxplot_csv(const EvaluationReport& report);

}  // namespace qbn
