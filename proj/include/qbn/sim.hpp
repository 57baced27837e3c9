// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qbn/circuit.hpp"
#include "qbn/device.hpp"

namespace qbn {

struct Statevector {
  int width = 0;
  std::vector<cd> amps;  // 2^width amplitudes, qubit 0 = least significant bit

  double probability(size_t basis_index) const { return std::norm(amps[basis_index]); }
};

// Kernel engine. Parallel uses the OpenMP kernels; Serial is the plain-loop
// reference implementation kept for testing; Auto picks Parallel only for
// state sizes where the fork/join overhead pays off.
enum class Engine { Auto, Serial, Parallel };

namespace kernels {
// Apply a 2x2 gate to `target`, restricted to basis states where every bit
// of `ctrl_mask` is set. state must hold 2^width amplitudes.
void apply_controlled_1q_serial(cd* state, int width, uint64_t ctrl_mask, int target,
                                const std::array<cd, 4>& u);
void apply_controlled_1q_omp(cd* state, int width, uint64_t ctrl_mask, int target, const std::array<cd, 4>& u);
void apply_swap_serial(cd* state, int width, int a, int b);
void apply_swap_omp(cd* state, int width, int a, int b);

// 2x2 matrix (row major) of a single-qubit kind, or of the target block of a
// controlled kind.
std::array<cd, 4> base_1q(GateKind kind, const std::vector<double>& params);
}  // namespace kernels

struct EvolveOptions {
  Engine engine = Engine::Auto;
  bool check_norm = false;  // verify unit norm after every gate (debug)
  int max_width = 24;
};

// Exact statevector of the circuit applied to |0...0>. Accepts every
// GateKind (the simulator is basis agnostic).
Statevector evolve(const QuantumCircuit& c, const EvolveOptions& opts = {});

// Apply one gate in place; exposed for the kernel tests and the benchmark.
void apply_gate(Statevector& sv, const GateOp& op, Engine engine = Engine::Auto);

struct ShotCounts {
  std::map<std::string, uint64_t> counts;  // bitstring over measured qubits -> occurrences
  uint64_t shots = 0;
  std::vector<int> bit_qubits;  // qubit measured into bit j (j = 0 is the rightmost character)
};

// i.i.d. draws from |amp|^2 marginalized to the measured qubits; bit j of a
// key (counted from the right) is measured[j], so the leftmost character is
// the highest measured qubit index.
ShotCounts sample(const Statevector& sv, const std::vector<int>& measured, uint64_t shots, uint64_t seed);

// Per-gate error channels derived from a device's calibration data: each
// 1-qubit gate suffers a uniform Pauli with probability u2_error(q), each
// CNOT a uniform non-identity two-qubit Pauli with probability
// cnot_error(edge), and each readout bit flips with readout_error(q).
struct NoiseSpec {
  std::vector<double> u2_rate;
  std::vector<double> readout_rate;
  std::map<std::pair<int, int>, double> cnot_rate;

  static NoiseSpec from_device(const DeviceModel& d);
};

// Monte-Carlo trajectory sampling of a device-legal circuit (basis
// {U1,U2,U3,CNOT}, CNOTs on coupling edges). Shot i draws from an
// independent stream seeded with fnv1a64(seed, first_shot + i), so
// run_noisy(c,d,s,seed) equals the merge of any split
// run_noisy_range(c,d,0,s1,seed) + run_noisy_range(c,d,s1,s-s1,seed).
ShotCounts run_noisy(const QuantumCircuit& c, const DeviceModel& d, uint64_t shots, uint64_t seed);
ShotCounts run_noisy_range(const QuantumCircuit& c, const DeviceModel& d, uint64_t first_shot, uint64_t n_shots,
                           uint64_t seed);

// Counts document: {"metadata": {...}, "counts": {...}}.
std::string counts_to_json(const ShotCounts& counts, const std::map<std::string, std::string>& metadata);

}  // namespace qbn
