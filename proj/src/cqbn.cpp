// SPDX-License-Identifier: Apache-2.0
#include "qbn/cqbn.hpp"

#include <cmath>

#include "qbn/sim.hpp"

namespace qbn {

double rotation_angle(double p0, double p1) {
  if (p0 < 0.0 || p0 > 1.0 || p1 < 0.0 || p1 > 1.0 || std::abs(p0 + p1 - 1.0) > 1e-9)
    throw ValidationError("rotation_angle: (p0, p1) is not a probability row");
  return 2.0 * std::atan2(std::sqrt(p1), std::sqrt(p0));
}

CompileResult compile(const BayesianNetwork& bn) {
  require_valid(bn);
  const int s = static_cast<int>(bn.size());
  bool needs_ancilla = false;
  for (const auto& node : bn.nodes) {
    if (node.cpt.n_parents() > 2)
      throw ValidationError("node '" + node.name + "' has " + std::to_string(node.cpt.n_parents()) +
                            " parents; the construction supports at most 2");
    needs_ancilla |= node.cpt.n_parents() == 2;
  }

  CompilationPlan plan;
  plan.emission_order = topological_order(bn);
  plan.node_qubit.assign(bn.size(), -1);
  for (int k = 0; k < s; ++k) plan.node_qubit[static_cast<size_t>(plan.emission_order[static_cast<size_t>(k)])] = k;
  const int width = s + (needs_ancilla ? 1 : 0);
  const int anc = s;  // ancilla sits after the node qubits
  if (needs_ancilla) plan.ancilla_qubits.push_back(anc);

  CircuitBuilder b(width);
  for (const auto& node : bn.nodes) b.set_node(plan.node_qubit[static_cast<size_t>(node.id)], node.id);
  if (needs_ancilla) b.set_ancilla(anc);

  for (NodeId id : plan.emission_order) {
    const BnNode& node = bn.nodes[static_cast<size_t>(id)];
    const int target = plan.node_qubit[static_cast<size_t>(id)];
    const auto& rows = node.cpt.rows;

    switch (node.cpt.n_parents()) {
      case 0:
        b.ry(rotation_angle(rows[0].p0, rows[0].p1), target);
        break;
      case 1: {
        const int qp = plan.node_qubit[static_cast<size_t>(node.cpt.parent_order[0])];
        // parent = 0 first: flip, rotate under control, flip back
        b.x(qp);
        b.cry(rotation_angle(rows[0].p0, rows[0].p1), qp, target);
        b.x(qp);
        b.cry(rotation_angle(rows[1].p0, rows[1].p1), qp, target);
        break;
      }
      case 2: {
        const int qa = plan.node_qubit[static_cast<size_t>(node.cpt.parent_order[0])];
        const int qb = plan.node_qubit[static_cast<size_t>(node.cpt.parent_order[1])];
        // Parent-value combinations in binary order; the two-control
        // rotation runs through the ancilla as compute / rotate / uncompute.
        // Redundant adjacent X pairs are left in place for the transpiler.
        for (size_t combo = 0; combo < 4; ++combo) {
          const bool a_zero = ((combo >> 1) & 1u) == 0;
          const bool b_zero = (combo & 1u) == 0;
          if (a_zero) b.x(qa);
          if (b_zero) b.x(qb);
          b.ccnot(qa, qb, anc);
          b.cry(rotation_angle(rows[combo].p0, rows[combo].p1), anc, target);
          b.ccnot(qa, qb, anc);
          if (a_zero) b.x(qa);
          if (b_zero) b.x(qb);
        }
        break;
      }
      default:
        break;
    }
  }

  for (int k = 0; k < s; ++k) b.measure(k);
  return CompileResult{b.build(), std::move(plan)};
}

double verify_distribution(const BayesianNetwork& bn, const QuantumCircuit& c, const CompilationPlan& plan,
                           int max_width) {
  if (c.width > max_width)
    throw Error("circuit width " + std::to_string(c.width) + " exceeds verification cap " +
                std::to_string(max_width));
  const Statevector sv = evolve(c);
  const int s = static_cast<int>(bn.size());

  // Node-pattern marginals of the circuit: pattern bit i is node i's value.
  std::vector<double> circuit_prob(size_t{1} << s, 0.0);
  for (size_t i = 0; i < sv.amps.size(); ++i) {
    size_t pattern = 0;
    for (int node = 0; node < s; ++node)
      pattern |= ((i >> plan.node_qubit[static_cast<size_t>(node)]) & 1u) << node;
    circuit_prob[pattern] += std::norm(sv.amps[i]);
  }

  double max_dev = 0.0;
  std::vector<uint8_t> assignment(bn.size(), 0);
  for (size_t pattern = 0; pattern < circuit_prob.size(); ++pattern) {
    for (int node = 0; node < s; ++node) assignment[static_cast<size_t>(node)] = (pattern >> node) & 1u;
    max_dev = std::max(max_dev, std::abs(circuit_prob[pattern] - joint_probability(bn, assignment)));
  }
  return max_dev;
}

}  // namespace qbn
