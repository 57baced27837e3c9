// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbn {

using NodeId = int;

// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input documents or invariant violations (CLI exit code 1).
struct ValidationError : Error {
  using Error::Error;
};

struct CptRow {
  double p0 = 0.0;  // P(node = 0 | parent assignment)
  double p1 = 0.0;
};

// Conditional probability table. Rows are indexed by the parent-value
// assignment packed with parent_order[0] as the most significant bit, so
// rows run in binary order (00, 01, 10, 11 for two parents).
struct Cpt {
  std::vector<NodeId> parent_order;
  std::vector<CptRow> rows;

  size_t n_parents() const { return parent_order.size(); }
  // values must hold one entry in {0,1} per network node.
  size_t row_index(const std::vector<uint8_t>& values) const;
};

struct BnNode {
  NodeId id = 0;
  std::string name;
  Cpt cpt;
};

// Directed acyclic model over binary variables; node ids are dense 0..s-1.
struct BayesianNetwork {
  std::vector<BnNode> nodes;

  size_t size() const { return nodes.size(); }
  int find(const std::string& name) const;  // -1 if absent
};

// Returns every invariant violation found (empty vector == valid).
std::vector<std::string> validate(const BayesianNetwork& bn);

// Throws ValidationError listing all violations if the network is invalid.
void require_valid(const BayesianNetwork& bn);

// Product of per-node CPT entries for a full assignment (one value per node).
double joint_probability(const BayesianNetwork& bn, const std::vector<uint8_t>& assignment);

// P(node = 0) for every node, by exact enumeration of all 2^s assignments.
std::vector<double> exact_marginals(const BayesianNetwork& bn, int max_nodes = 20);

// Topological order of node ids (parents before children), deterministic:
// among ready nodes the lowest id goes first.
std::vector<NodeId> topological_order(const BayesianNetwork& bn);

// JSON document I/O. The loader collects every problem it can find and
// throws a ValidationError whose message has one line per problem, each
// prefixed with the JSON path of the offending element. Node ids are
// assigned by topological order of the declared graph.
BayesianNetwork load_network(const std::string& json_text);
BayesianNetwork load_network_file(const std::string& path);
std::string save_network(const BayesianNetwork& bn);

}  // namespace qbn
