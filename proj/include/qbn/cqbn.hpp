// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qbn/bayesnet.hpp"
#include "qbn/circuit.hpp"

namespace qbn {

struct CompilationPlan {
  std::vector<int> node_qubit;       // NodeId -> qubit index
  std::vector<int> ancilla_qubits;   // disjoint from node qubits
  std::vector<NodeId> emission_order;
};

// Angle theta with RY(theta)|0> = sqrt(p0)|0> + sqrt(p1)|1>. Defined as
// 2*atan(sqrt(p1/p0)) and extended continuously to theta = pi at p0 = 0.
double rotation_angle(double p0, double p1);

struct CompileResult {
  QuantumCircuit circuit;
  CompilationPlan plan;
};

// Compositional construction: one qubit per node in topological order, root
// probabilities as RY rotations, conditional rows as controlled rotations
// with an X sandwich selecting each parent-value combination; two-parent
// rows go through one shared ancilla as CCNOT / CRY / CCNOT. Requires a
// valid binary network with at most two parents per node.
CompileResult compile(const BayesianNetwork& bn);

// Max absolute deviation between the circuit's node-qubit distribution
// (noiseless statevector, ancillas traced out) and the network's joint.
double verify_distribution(const BayesianNetwork& bn, const QuantumCircuit& c, const CompilationPlan& plan,
                           int max_width = 12);

}  // namespace qbn
