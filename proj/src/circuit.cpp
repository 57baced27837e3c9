// SPDX-License-Identifier: Apache-2.0
#include "qbn/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qbn {

int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CRY:
    case GateKind::SWAP:
      return 2;
    case GateKind::CCNOT:
    case GateKind::CCRY:
      return 3;
    default:
      return 1;
  }
}

int gate_param_count(GateKind k) {
  switch (k) {
    case GateKind::U1:
      return 1;
    case GateKind::U2:
      return 2;
    case GateKind::U3:
      return 3;
    case GateKind::RY:
    case GateKind::CRY:
    case GateKind::CCRY:
      return 1;
    default:
      return 0;
  }
}

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "x";
    case GateKind::H: return "h";
    case GateKind::S: return "s";
    case GateKind::T: return "t";
    case GateKind::Tdg: return "tdg";
    case GateKind::U1: return "u1";
    case GateKind::U2: return "u2";
    case GateKind::U3: return "u3";
    case GateKind::RY: return "ry";
    case GateKind::CNOT: return "cx";
    case GateKind::CRY: return "cry";
    case GateKind::SWAP: return "swap";
    case GateKind::CCNOT: return "ccx";
    case GateKind::CCRY: return "ccry";
  }
  return "?";
}

bool GateOp::touches(int q) const { return std::find(qubits.begin(), qubits.end(), q) != qubits.end(); }

CircuitBuilder::CircuitBuilder(int width) {
  if (width < 0) throw ValidationError("circuit width must be non-negative");
  c_.width = width;
  c_.roles.resize(static_cast<size_t>(width));
  for (int q = 0; q < width; ++q) c_.roles[static_cast<size_t>(q)] = q;  // default: qubit q carries node q
}

CircuitBuilder& CircuitBuilder::gate(GateKind kind, std::vector<int> qubits, std::vector<double> params) {
  if (static_cast<int>(qubits.size()) != gate_arity(kind))
    throw ValidationError(std::string(gate_name(kind)) + ": expected " + std::to_string(gate_arity(kind)) +
                          " operands, got " + std::to_string(qubits.size()));
  if (static_cast<int>(params.size()) != gate_param_count(kind))
    throw ValidationError(std::string(gate_name(kind)) + ": expected " + std::to_string(gate_param_count(kind)) +
                          " parameters, got " + std::to_string(params.size()));
  std::set<int> distinct(qubits.begin(), qubits.end());
  if (distinct.size() != qubits.size()) throw ValidationError(std::string(gate_name(kind)) + ": repeated operand");
  for (int q : qubits)
    if (q < 0 || q >= c_.width)
      throw ValidationError(std::string(gate_name(kind)) + ": operand " + std::to_string(q) + " out of range");
  for (double p : params)
    if (!std::isfinite(p)) throw ValidationError(std::string(gate_name(kind)) + ": non-finite angle");
  c_.ops.push_back(GateOp{kind, std::move(qubits), std::move(params)});
  return *this;
}

CircuitBuilder& CircuitBuilder::set_node(int qubit, NodeId node) {
  c_.roles.at(static_cast<size_t>(qubit)) = node;
  return *this;
}

CircuitBuilder& CircuitBuilder::set_ancilla(int qubit) {
  c_.roles.at(static_cast<size_t>(qubit)) = std::nullopt;
  return *this;
}

CircuitBuilder& CircuitBuilder::measure(int qubit) {
  if (qubit < 0 || qubit >= c_.width) throw ValidationError("measure: qubit out of range");
  if (std::find(c_.measured.begin(), c_.measured.end(), qubit) == c_.measured.end()) c_.measured.push_back(qubit);
  return *this;
}

QuantumCircuit CircuitBuilder::build() {
  std::sort(c_.measured.begin(), c_.measured.end());
  for (int q : c_.measured)
    if (!c_.roles[static_cast<size_t>(q)].has_value())
      throw ValidationError("measured qubit " + std::to_string(q) + " has no node role");
  return std::move(c_);
}

namespace {

Eigen::Matrix2cd u3_matrix(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  m << cd(c, 0.0), -std::exp(cd(0.0, lambda)) * s, std::exp(cd(0.0, phi)) * s,
      std::exp(cd(0.0, phi + lambda)) * c;
  return m;
}

Eigen::MatrixXcd controlled(const Eigen::Matrix2cd& u, int n_controls) {
  const int dim = 2 << n_controls;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  m.block(dim - 2, dim - 2, 2, 2) = u;
  return m;
}

}  // namespace

Eigen::MatrixXcd gate_matrix(GateKind kind, const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != gate_param_count(kind))
    throw ValidationError(std::string(gate_name(kind)) + ": wrong parameter count");
  const cd i(0.0, 1.0);
  switch (kind) {
    case GateKind::X: {
      Eigen::Matrix2cd m;
      m << 0, 1, 1, 0;
      return m;
    }
    case GateKind::H: {
      Eigen::Matrix2cd m;
      const double r = 1.0 / std::sqrt(2.0);
      m << r, r, r, -r;
      return m;
    }
    case GateKind::S: {
      Eigen::Matrix2cd m;
      m << 1, 0, 0, i;
      return m;
    }
    case GateKind::T: {
      Eigen::Matrix2cd m;
      m << 1, 0, 0, std::exp(i * (M_PI / 4.0));
      return m;
    }
    case GateKind::Tdg: {
      Eigen::Matrix2cd m;
      m << 1, 0, 0, std::exp(-i * (M_PI / 4.0));
      return m;
    }
    case GateKind::U1: {
      Eigen::Matrix2cd m;
      m << 1, 0, 0, std::exp(i * params[0]);
      return m;
    }
    case GateKind::U2:
      return u3_matrix(M_PI / 2.0, params[0], params[1]);
    case GateKind::U3:
      return u3_matrix(params[0], params[1], params[2]);
    case GateKind::RY:
      return u3_matrix(params[0], 0.0, 0.0);
    case GateKind::CNOT:
      return controlled(gate_matrix(GateKind::X), 1);
    case GateKind::CRY:
      return controlled(u3_matrix(params[0], 0.0, 0.0), 1);
    case GateKind::SWAP: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = 1;
      m(1, 2) = 1;
      m(2, 1) = 1;
      m(3, 3) = 1;
      return m;
    }
    case GateKind::CCNOT:
      return controlled(gate_matrix(GateKind::X), 2);
    case GateKind::CCRY:
      return controlled(u3_matrix(params[0], 0.0, 0.0), 2);
  }
  throw Error("unreachable gate kind");
}

Eigen::MatrixXcd gate_matrix(const GateOp& op) { return gate_matrix(op.kind, op.params); }

Eigen::MatrixXcd circuit_unitary(const QuantumCircuit& c, int max_width) {
  if (c.width > max_width)
    throw Error("circuit width " + std::to_string(c.width) + " exceeds unitary cap " + std::to_string(max_width));
  const size_t dim = size_t{1} << c.width;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

  std::vector<cd> gathered;
  for (const auto& op : c.ops) {
    const Eigen::MatrixXcd g = gate_matrix(op);
    const int m = static_cast<int>(op.qubits.size());
    const size_t ldim = size_t{1} << m;
    // operand k occupies local bit (m-1-k): first operand is the most
    // significant local index, matching the block convention above.
    std::vector<size_t> bit(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) bit[static_cast<size_t>(k)] = size_t{1} << op.qubits[static_cast<size_t>(m - 1 - k)];

    size_t opmask = 0;
    for (int q : op.qubits) opmask |= size_t{1} << q;

    gathered.assign(ldim, cd{});
    for (Eigen::Index col = 0; col < u.cols(); ++col) {
      for (size_t base = 0; base < dim; ++base) {
        if (base & opmask) continue;  // enumerate each operand-cleared block once
        for (size_t l = 0; l < ldim; ++l) {
          size_t g_idx = base;
          for (int k = 0; k < m; ++k)
            if ((l >> k) & 1u) g_idx |= bit[static_cast<size_t>(k)];
          gathered[l] = u(static_cast<Eigen::Index>(g_idx), col);
        }
        for (size_t lr = 0; lr < ldim; ++lr) {
          cd acc{};
          for (size_t lc = 0; lc < ldim; ++lc)
            acc += g(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc)) * gathered[lc];
          size_t g_idx = base;
          for (int k = 0; k < m; ++k)
            if ((lr >> k) & 1u) g_idx |= bit[static_cast<size_t>(k)];
          u(static_cast<Eigen::Index>(g_idx), col) = acc;
        }
      }
    }
  }
  return u;
}

bool unitaries_equivalent(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v, double tol) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw ValidationError("unitaries_equivalent: dimension mismatch");
  // Align the global phase on the largest entry of v.
  Eigen::Index r = 0, cidx = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      if (std::abs(v(i, j)) > best) {
        best = std::abs(v(i, j));
        r = i;
        cidx = j;
      }
  if (best <= tol) return u.cwiseAbs().maxCoeff() <= tol;
  cd alpha = u(r, cidx) / v(r, cidx);
  const double mag = std::abs(alpha);
  if (mag < 1e-300) return false;
  alpha /= mag;  // compare up to a pure phase only
  return (u - alpha * v).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qbn
