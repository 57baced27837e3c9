// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbn/circuit.hpp"
#include "qbn/device.hpp"

namespace qbn {

enum class OptimizationLevel { L0 = 0, L1 = 1, L2 = 2, L3 = 3 };

OptimizationLevel level_from_int(int level);

struct Layout {
  std::vector<int> log_to_phys;  // injective, image within the device
};

struct TranspileMetrics {
  size_t input_ops = 0;
  size_t output_ops = 0;
  size_t output_cnots = 0;
  size_t swaps_inserted = 0;
  double estimated_success = 1.0;  // product of (1 - error rate) over output gates
};

struct TranspileResult {
  QuantumCircuit circuit;  // basis {U1,U2,U3,CNOT}, every CNOT on a coupling edge
  Layout layout;                        // initial logical -> physical
  std::vector<int> final_permutation;   // logical -> physical after routing
  int logical_width = 0;
  TranspileMetrics metrics;
};

// CRY(theta) as RY(theta/2) . CNOT . RY(-theta/2) . CNOT; equal to the gate
// matrix exactly, with no global-phase slack.
std::vector<GateOp> decompose_cry(double theta, int control, int target);

// Standard 6-CNOT, 7-T/Tdg, 2-H realization of the Toffoli gate.
std::vector<GateOp> decompose_ccnot(int c1, int c2, int t);

// Two-control RY via CRY(theta/2) and CNOTs on the controls (exact, since
// same-axis rotations add).
std::vector<GateOp> decompose_ccry(double theta, int c1, int c2, int t);

struct U3Params {
  double theta = 0.0;  // in [0, pi]
  double phi = 0.0;
  double lambda = 0.0;
  double phase = 0.0;  // run product = e^{i phase} * U3(theta, phi, lambda)
};

// Collapse a run of single-qubit gates into one U3 (plus global phase).
U3Params resynthesize_1q(const std::vector<GateOp>& run);

// --- pipeline stages (exposed for tests and tools) ---

// Rewrite every gate into the device basis {U1,U2,U3,CNOT}.
QuantumCircuit decompose_to_basis(const QuantumCircuit& c);

// Level >= 1: merge adjacent single-qubit gates where a closed-form rule
// exists and cancel adjacent inverse pairs (1q pairs whose product is the
// identity up to phase; equal CNOTs back to back).
QuantumCircuit collapse_adjacent_gates(const QuantumCircuit& c);

// Level >= 2: cancel equal CNOT pairs separated only by gates that commute
// through them. The commutation rule set is closed: diagonal 1q gates pass a
// control, X-like 1q gates pass a target, CNOTs sharing a control commute,
// CNOTs sharing a target commute.
QuantumCircuit cancel_commuting_cnots(const QuantumCircuit& c);

// Level 3: resynthesize every maximal single-qubit run into one gate.
QuantumCircuit resynthesize_single_qubit_runs(const QuantumCircuit& c);

// The level's optimization chain (applied to the basis circuit before
// layout and again to the routed circuit). Each level runs exactly the
// previous level's passes plus its own additions.
QuantumCircuit optimize_gates(const QuantumCircuit& c, OptimizationLevel lvl);
std::vector<std::string> optimization_pass_names(OptimizationLevel lvl);

// Trivial layout below level 2; above, a noise-adaptive placement that puts
// high-CNOT-traffic logical pairs on low-error (and near) physical edges and
// high-1q-traffic logicals on low-u2-error qubits.
Layout choose_layout(const QuantumCircuit& c, const DeviceModel& d, OptimizationLevel lvl);

struct RoutedCircuit {
  QuantumCircuit circuit;
  std::vector<int> final_permutation;
  size_t swaps_inserted = 0;
};

// Greedy shortest-path SWAP insertion in gate order (each SWAP emitted as 3
// CNOTs), ties broken by lowest physical index.
RoutedCircuit route(const QuantumCircuit& c, const DeviceModel& d, const Layout& layout);

// Full pipeline. Deterministic; the seed is accepted for interface
// stability but no pass is stochastic.
TranspileResult transpile(const QuantumCircuit& c, const DeviceModel& d, OptimizationLevel lvl, uint64_t seed = 0);

// Unitary the transpiled circuit applies to the logical qubits: embed basis
// states through the initial layout, evolve over the touched physical
// qubits, read out through the final permutation. Compare against the input
// circuit's unitary to check semantic preservation.
Eigen::MatrixXcd effective_unitary(const TranspileResult& r, int max_touched = 12);

}  // namespace qbn
