// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbn/bayesnet.hpp"

namespace qbn {

using cd = std::complex<double>;

enum class GateKind { X, H, S, T, Tdg, U1, U2, U3, RY, CNOT, CRY, SWAP, CCNOT, CCRY };

int gate_arity(GateKind k);        // number of qubit operands
int gate_param_count(GateKind k);  // number of angle parameters
const char* gate_name(GateKind k);

struct GateOp {
  GateKind kind;
  std::vector<int> qubits;     // controls first, target last
  std::vector<double> params;  // radians

  bool operator==(const GateOp&) const = default;
  bool touches(int q) const;
};

// Gate-level circuit. Qubit index 0 is the least-significant bit of basis
// state labels; bitstrings render qubit (width-1) leftmost. roles[q] holds
// the network node measured from qubit q, or nullopt for ancillas.
struct QuantumCircuit {
  int width = 0;
  std::vector<GateOp> ops;
  std::vector<std::optional<NodeId>> roles;
  std::vector<int> measured;  // sorted, subset of node-role qubits

  size_t n_ops() const { return ops.size(); }
};

// Checked construction; circuits are treated as immutable once built.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(int width);

  CircuitBuilder& gate(GateKind kind, std::vector<int> qubits, std::vector<double> params = {});
  CircuitBuilder& x(int q) { return gate(GateKind::X, {q}); }
  CircuitBuilder& h(int q) { return gate(GateKind::H, {q}); }
  CircuitBuilder& ry(double theta, int q) { return gate(GateKind::RY, {q}, {theta}); }
  CircuitBuilder& u1(double lambda, int q) { return gate(GateKind::U1, {q}, {lambda}); }
  CircuitBuilder& u2(double phi, double lambda, int q) { return gate(GateKind::U2, {q}, {phi, lambda}); }
  CircuitBuilder& u3(double theta, double phi, double lambda, int q) {
    return gate(GateKind::U3, {q}, {theta, phi, lambda});
  }
  CircuitBuilder& cnot(int c, int t) { return gate(GateKind::CNOT, {c, t}); }
  CircuitBuilder& cry(double theta, int c, int t) { return gate(GateKind::CRY, {c, t}, {theta}); }
  CircuitBuilder& swap(int a, int b) { return gate(GateKind::SWAP, {a, b}); }
  CircuitBuilder& ccnot(int c1, int c2, int t) { return gate(GateKind::CCNOT, {c1, c2, t}); }
  CircuitBuilder& ccry(double theta, int c1, int c2, int t) { return gate(GateKind::CCRY, {c1, c2, t}, {theta}); }

  CircuitBuilder& set_node(int qubit, NodeId node);
  CircuitBuilder& set_ancilla(int qubit);
  CircuitBuilder& measure(int qubit);

  QuantumCircuit build();

 private:
  QuantumCircuit c_;
};

// Exact matrix of one gate (2x2, 4x4 or 8x8). Controlled kinds are the block
// form [[I,0],[0,U]] with the controls as the higher-order block index, i.e.
// operand order (controls..., target) maps to (most significant ... least
// significant) bit of the matrix row/column index.
Eigen::MatrixXcd gate_matrix(GateKind kind, const std::vector<double>& params = {});
Eigen::MatrixXcd gate_matrix(const GateOp& op);

// Full 2^width unitary of the circuit (test oracle; independent of the
// simulator kernels). Throws if width exceeds max_width.
Eigen::MatrixXcd circuit_unitary(const QuantumCircuit& c, int max_width = 12);

// True iff u = e^{i a} v for some global phase a, max entry deviation <= tol.
bool unitaries_equivalent(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v, double tol);

}  // namespace qbn
