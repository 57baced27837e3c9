// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "qbn/bayesnet.hpp"
#include "qbn/circuit.hpp"
#include "qbn/rng.hpp"

namespace qbn::test {

inline std::string data_file(const std::string& rel) {
#ifdef QBN_DATA_DIR
  return std::string(QBN_DATA_DIR) + "/" + rel;
#else
  return "data/" + rel;
#endif
}

// Random binary network: DAG by construction (parents drawn from earlier
// declaration indices), occasional deterministic rows to hit the 0/1 edges.
inline BayesianNetwork random_network(Rng& rng, int max_nodes, int max_parents) {
  const int s = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(max_nodes)));
  BayesianNetwork bn;
  for (int i = 0; i < s; ++i) {
    BnNode node;
    node.id = i;
    node.name = "N" + std::to_string(i);
    const int np = static_cast<int>(rng.next_below(static_cast<uint64_t>(std::min(i, max_parents) + 1)));
    std::vector<int> pool;
    for (int p = 0; p < i; ++p) pool.push_back(p);
    for (int k = 0; k < np; ++k) {
      const size_t pick = rng.next_below(pool.size());
      node.cpt.parent_order.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<long>(pick));
    }
    const size_t rows = size_t{1} << np;
    for (size_t r = 0; r < rows; ++r) {
      double p0;
      const uint64_t style = rng.next_below(10);
      if (style == 0)
        p0 = 0.0;
      else if (style == 1)
        p0 = 1.0;
      else
        p0 = rng.next_double();
      node.cpt.rows.push_back(CptRow{p0, 1.0 - p0});
    }
    bn.nodes.push_back(std::move(node));
  }
  return bn;
}

// Independent joint oracle: expand the distribution node by node in
// topological order, keyed by explicit assignments -- a different route than
// the per-assignment product used by the library.
inline std::map<std::vector<uint8_t>, double> joint_table_oracle(const BayesianNetwork& bn) {
  std::map<std::vector<uint8_t>, double> table;
  table[std::vector<uint8_t>(bn.size(), 2)] = 1.0;  // 2 = unassigned
  for (NodeId id : topological_order(bn)) {
    const BnNode& node = bn.nodes[static_cast<size_t>(id)];
    std::map<std::vector<uint8_t>, double> next;
    for (const auto& [partial, p] : table) {
      for (uint8_t v = 0; v < 2; ++v) {
        std::vector<uint8_t> extended = partial;
        extended[static_cast<size_t>(id)] = v;
        size_t row = 0;
        for (NodeId parent : node.cpt.parent_order) row = (row << 1) | extended[static_cast<size_t>(parent)];
        const CptRow& r = node.cpt.rows[row];
        next[extended] += p * (v == 0 ? r.p0 : r.p1);
      }
    }
    table = std::move(next);
  }
  return table;
}

inline std::vector<double> marginals_oracle(const BayesianNetwork& bn) {
  std::vector<double> p0(bn.size(), 0.0);
  for (const auto& [assignment, p] : joint_table_oracle(bn))
    for (size_t i = 0; i < bn.size(); ++i)
      if (assignment[i] == 0) p0[i] += p;
  return p0;
}

// Random circuit over every gate kind, angles in [0, 2pi).
inline QuantumCircuit random_circuit(Rng& rng, int width, int depth) {
  static const GateKind kinds[] = {GateKind::X,    GateKind::H,   GateKind::S,    GateKind::T,
                                   GateKind::Tdg,  GateKind::U1,  GateKind::U2,   GateKind::U3,
                                   GateKind::RY,   GateKind::CNOT, GateKind::CRY, GateKind::SWAP,
                                   GateKind::CCNOT, GateKind::CCRY};
  CircuitBuilder b(width);
  for (int i = 0; i < depth; ++i) {
    GateKind kind;
    do {
      kind = kinds[rng.next_below(std::size(kinds))];
    } while (gate_arity(kind) > width);
    std::vector<int> pool;
    for (int q = 0; q < width; ++q) pool.push_back(q);
    std::vector<int> qubits;
    for (int k = 0; k < gate_arity(kind); ++k) {
      const size_t pick = rng.next_below(pool.size());
      qubits.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<long>(pick));
    }
    std::vector<double> params;
    for (int k = 0; k < gate_param_count(kind); ++k) params.push_back(rng.next_double() * 2.0 * M_PI);
    b.gate(kind, std::move(qubits), std::move(params));
  }
  for (int q = 0; q < width; ++q) b.measure(q);
  return b.build();
}

}  // namespace qbn::test
