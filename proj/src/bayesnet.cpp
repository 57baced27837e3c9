// SPDX-License-Identifier: Apache-2.0
#include "qbn/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qbn {

namespace {
constexpr double kRowSumTol = 1e-9;
}

size_t Cpt::row_index(const std::vector<uint8_t>& values) const {
  size_t idx = 0;
  for (NodeId p : parent_order) idx = (idx << 1) | (values[static_cast<size_t>(p)] & 1u);
  return idx;
}

int BayesianNetwork::find(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return n.id;
  return -1;
}

std::vector<std::string> validate(const BayesianNetwork& bn) {
  std::vector<std::string> out;
  const int s = static_cast<int>(bn.size());

  for (int i = 0; i < s; ++i) {
    const BnNode& node = bn.nodes[static_cast<size_t>(i)];
    const std::string where = "node '" + node.name + "'";
    if (node.id != i) out.push_back(where + ": id " + std::to_string(node.id) + " is not its position " + std::to_string(i));

    std::set<NodeId> seen;
    for (NodeId p : node.cpt.parent_order) {
      if (p < 0 || p >= s)
        out.push_back(where + ": parent id " + std::to_string(p) + " out of range");
      else if (p == node.id)
        out.push_back(where + ": is its own parent");
      if (!seen.insert(p).second) out.push_back(where + ": duplicate parent id " + std::to_string(p));
    }

    const size_t expect = node.cpt.n_parents() >= 30 ? 0 : (size_t{1} << node.cpt.n_parents());
    if (expect == 0 || node.cpt.rows.size() != expect) {
      out.push_back(where + ": cpt has " + std::to_string(node.cpt.rows.size()) + " rows, expected 2^" +
                    std::to_string(node.cpt.n_parents()));
      continue;
    }
    for (size_t r = 0; r < node.cpt.rows.size(); ++r) {
      const CptRow& row = node.cpt.rows[r];
      if (!(row.p0 >= 0.0 && row.p0 <= 1.0) || !(row.p1 >= 0.0 && row.p1 <= 1.0))
        out.push_back(where + ": cpt row " + std::to_string(r) + " has an entry outside [0,1]");
      else if (std::abs(row.p0 + row.p1 - 1.0) > kRowSumTol)
        out.push_back(where + ": cpt row " + std::to_string(r) + " sums to " + std::to_string(row.p0 + row.p1) +
                      " != 1");
    }
  }

  // Cycle check over the parent relation (iterative DFS, three colors).
  std::vector<int> color(bn.size(), 0);
  bool cyclic = false;
  for (int start = 0; start < s && !cyclic; ++start) {
    if (color[static_cast<size_t>(start)] != 0) continue;
    std::vector<std::pair<int, size_t>> stack{{start, 0}};
    color[static_cast<size_t>(start)] = 1;
    while (!stack.empty() && !cyclic) {
      auto& [v, next] = stack.back();
      const auto& parents = bn.nodes[static_cast<size_t>(v)].cpt.parent_order;
      if (next < parents.size()) {
        NodeId p = parents[next++];
        if (p < 0 || p >= s) continue;
        if (color[static_cast<size_t>(p)] == 1) {
          cyclic = true;
        } else if (color[static_cast<size_t>(p)] == 0) {
          color[static_cast<size_t>(p)] = 1;
          stack.push_back({p, 0});
        }
      } else {
        color[static_cast<size_t>(v)] = 2;
        stack.pop_back();
      }
    }
  }
  if (cyclic) out.push_back("network: parent references contain a directed cycle");

  return out;
}

void require_valid(const BayesianNetwork& bn) {
  auto violations = validate(bn);
  if (violations.empty()) return;
  std::string msg = "invalid network:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw ValidationError(msg);
}

double joint_probability(const BayesianNetwork& bn, const std::vector<uint8_t>& assignment) {
  if (assignment.size() != bn.size())
    throw ValidationError("assignment covers " + std::to_string(assignment.size()) + " nodes, network has " +
                          std::to_string(bn.size()));
  double p = 1.0;
  for (const auto& node : bn.nodes) {
    const CptRow& row = node.cpt.rows[node.cpt.row_index(assignment)];
    p *= (assignment[static_cast<size_t>(node.id)] == 0) ? row.p0 : row.p1;
  }
  return p;
}

std::vector<double> exact_marginals(const BayesianNetwork& bn, int max_nodes) {
  const int s = static_cast<int>(bn.size());
  if (s > max_nodes)
    throw Error("network has " + std::to_string(s) + " nodes, enumeration cap is " + std::to_string(max_nodes));
  std::vector<double> p0(bn.size(), 0.0);
  std::vector<uint8_t> assignment(bn.size(), 0);
  const uint64_t total = uint64_t{1} << s;
  for (uint64_t a = 0; a < total; ++a) {
    for (int i = 0; i < s; ++i) assignment[static_cast<size_t>(i)] = static_cast<uint8_t>((a >> i) & 1u);
    const double p = joint_probability(bn, assignment);
    for (int i = 0; i < s; ++i)
      if (((a >> i) & 1u) == 0) p0[static_cast<size_t>(i)] += p;
  }
  return p0;
}

std::vector<NodeId> topological_order(const BayesianNetwork& bn) {
  const int s = static_cast<int>(bn.size());
  std::vector<int> indegree(bn.size(), 0);
  std::vector<std::vector<int>> children(bn.size());
  for (const auto& node : bn.nodes) {
    indegree[static_cast<size_t>(node.id)] = static_cast<int>(node.cpt.n_parents());
    for (NodeId p : node.cpt.parent_order) children[static_cast<size_t>(p)].push_back(node.id);
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < s; ++i)
    if (indegree[static_cast<size_t>(i)] == 0) ready.push(i);
  std::vector<NodeId> order;
  order.reserve(bn.size());
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children[static_cast<size_t>(v)])
      if (--indegree[static_cast<size_t>(c)] == 0) ready.push(c);
  }
  if (order.size() != bn.size()) throw ValidationError("network: parent references contain a directed cycle");
  return order;
}

namespace {

using nlohmann::json;

struct LoaderErrors {
  std::vector<std::string> msgs;
  void add(const std::string& path, const std::string& what) { msgs.push_back(path + ": " + what); }
  void raise_if_any() const {
    if (msgs.empty()) return;
    std::string all = "network document errors:";
    for (const auto& m : msgs) all += "\n  " + m;
    throw ValidationError(all);
  }
};

}  // namespace

BayesianNetwork load_network(const std::string& json_text) {
  LoaderErrors errs;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("network document: ") + e.what());
  }

  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ValidationError("network document: expected object with a 'nodes' array");
  }
  const json& jnodes = doc["nodes"];
  if (jnodes.empty()) throw ValidationError("nodes: array is empty");

  // First pass: names, shapes.
  std::map<std::string, int> name_to_decl;  // name -> declaration index
  struct Decl {
    std::string name;
    std::vector<std::string> parents;
    const json* cpt = nullptr;
  };
  std::vector<Decl> decls;
  for (size_t i = 0; i < jnodes.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const json& jn = jnodes[i];
    Decl d;
    if (!jn.is_object()) {
      errs.add(path, "not an object");
      decls.push_back(d);
      continue;
    }
    if (!jn.contains("name") || !jn["name"].is_string()) {
      errs.add(path, "missing string field 'name'");
    } else {
      d.name = jn["name"].get<std::string>();
      if (name_to_decl.count(d.name))
        errs.add(path, "duplicate node name '" + d.name + "'");
      else
        name_to_decl[d.name] = static_cast<int>(i);
    }
    if (jn.contains("states") && !(jn["states"].is_number_integer() && jn["states"].get<int>() == 2))
      errs.add(path, "only binary nodes (states = 2) are supported");
    if (jn.contains("parents")) {
      if (!jn["parents"].is_array()) {
        errs.add(path + ".parents", "not an array");
      } else {
        for (const auto& jp : jn["parents"]) {
          if (!jp.is_string())
            errs.add(path + ".parents", "parent entries must be names");
          else
            d.parents.push_back(jp.get<std::string>());
        }
      }
    }
    if (!jn.contains("cpt") || !jn["cpt"].is_array())
      errs.add(path, "missing 'cpt' array");
    else
      d.cpt = &jn["cpt"];
    decls.push_back(std::move(d));
  }
  errs.raise_if_any();

  // Parent references and topological ordering over declaration indices.
  const size_t s = decls.size();
  std::vector<std::vector<int>> parent_decl(s);
  for (size_t i = 0; i < s; ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "].parents";
    std::set<std::string> seen;
    for (const auto& pname : decls[i].parents) {
      auto it = name_to_decl.find(pname);
      if (it == name_to_decl.end())
        errs.add(path, "unknown parent '" + pname + "'");
      else if (it->second == static_cast<int>(i))
        errs.add(path, "node '" + decls[i].name + "' is its own parent");
      else
        parent_decl[i].push_back(it->second);
      if (!seen.insert(pname).second) errs.add(path, "duplicate parent '" + pname + "'");
    }
  }
  errs.raise_if_any();

  std::vector<int> indeg(s, 0);
  std::vector<std::vector<int>> children(s);
  for (size_t i = 0; i < s; ++i) {
    indeg[i] = static_cast<int>(parent_decl[i].size());
    for (int p : parent_decl[i]) children[static_cast<size_t>(p)].push_back(static_cast<int>(i));
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (size_t i = 0; i < s; ++i)
    if (indeg[i] == 0) ready.push(static_cast<int>(i));
  std::vector<int> topo;  // declaration indices in topological order
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    topo.push_back(v);
    for (int c : children[static_cast<size_t>(v)])
      if (--indeg[static_cast<size_t>(c)] == 0) ready.push(c);
  }
  if (topo.size() != s) throw ValidationError("nodes: parent references contain a directed cycle");

  std::vector<int> decl_to_id(s, -1);
  for (size_t k = 0; k < s; ++k) decl_to_id[static_cast<size_t>(topo[k])] = static_cast<int>(k);

  // Second pass: CPT rows keyed by the declared parent order.
  BayesianNetwork bn;
  bn.nodes.resize(s);
  for (size_t i = 0; i < s; ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "].cpt";
    const Decl& d = decls[i];
    BnNode node;
    node.id = decl_to_id[i];
    node.name = d.name;
    for (int pd : parent_decl[i]) node.cpt.parent_order.push_back(decl_to_id[static_cast<size_t>(pd)]);

    const size_t np = d.parents.size();
    if (np > 20) {
      errs.add(path, "too many parents");
      continue;
    }
    const size_t n_rows = size_t{1} << np;
    node.cpt.rows.assign(n_rows, CptRow{-1.0, -1.0});

    if (d.cpt->size() != n_rows)
      errs.add(path, "has " + std::to_string(d.cpt->size()) + " rows, expected " + std::to_string(n_rows));

    for (size_t r = 0; r < d.cpt->size(); ++r) {
      const std::string rpath = path + "[" + std::to_string(r) + "]";
      const json& jr = (*d.cpt)[r];
      if (!jr.is_object() || !jr.contains("p0") || !jr.contains("p1") || !jr["p0"].is_number() ||
          !jr["p1"].is_number()) {
        errs.add(rpath, "expected object with numeric 'p0' and 'p1'");
        continue;
      }
      json given = jr.contains("given") ? jr["given"] : json::object();
      if (!given.is_object()) {
        errs.add(rpath + ".given", "not an object");
        continue;
      }
      size_t idx = 0;
      bool ok = true;
      for (const auto& pname : d.parents) {
        if (!given.contains(pname)) {
          errs.add(rpath + ".given", "missing parent '" + pname + "'");
          ok = false;
          break;
        }
        const json& jv = given[pname];
        if (!jv.is_number_integer() || (jv.get<int>() != 0 && jv.get<int>() != 1)) {
          errs.add(rpath + ".given", "parent '" + pname + "' must be 0 or 1");
          ok = false;
          break;
        }
        idx = (idx << 1) | static_cast<size_t>(jv.get<int>());
      }
      if (given.size() != d.parents.size())
        errs.add(rpath + ".given", "lists " + std::to_string(given.size()) + " parents, node declares " +
                                       std::to_string(d.parents.size()));
      if (!ok || idx >= n_rows) continue;
      if (node.cpt.rows[idx].p0 >= 0.0) {
        errs.add(rpath, "duplicate parent assignment");
        continue;
      }
      node.cpt.rows[idx] = CptRow{jr["p0"].get<double>(), jr["p1"].get<double>()};
    }
    for (size_t r = 0; r < n_rows; ++r)
      if (node.cpt.rows[r].p0 < 0.0 && static_cast<size_t>(d.cpt->size()) == n_rows)
        errs.add(path, "no row for parent assignment index " + std::to_string(r));

    bn.nodes[static_cast<size_t>(node.id)] = std::move(node);
  }
  errs.raise_if_any();

  for (const auto& v : validate(bn)) errs.add("network", v);
  errs.raise_if_any();
  return bn;
}

BayesianNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

std::string save_network(const BayesianNetwork& bn) {
  json jnodes = json::array();
  for (const auto& node : bn.nodes) {
    json jn;
    jn["name"] = node.name;
    json jp = json::array();
    for (NodeId p : node.cpt.parent_order) jp.push_back(bn.nodes[static_cast<size_t>(p)].name);
    jn["parents"] = jp;
    json jcpt = json::array();
    for (size_t r = 0; r < node.cpt.rows.size(); ++r) {
      json jr;
      json given = json::object();
      const size_t np = node.cpt.n_parents();
      for (size_t k = 0; k < np; ++k) {
        NodeId p = node.cpt.parent_order[k];
        given[bn.nodes[static_cast<size_t>(p)].name] = static_cast<int>((r >> (np - 1 - k)) & 1u);
      }
      jr["given"] = given;
      jr["p0"] = node.cpt.rows[r].p0;
      jr["p1"] = node.cpt.rows[r].p1;
      jcpt.push_back(jr);
    }
    jn["cpt"] = jcpt;
    jnodes.push_back(jn);
  }
  json doc;
  doc["nodes"] = jnodes;
  return doc.dump(2) + "\n";
}

}  // namespace qbn
