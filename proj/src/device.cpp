// SPDX-License-Identifier: Apache-2.0
#include "qbn/device.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "qbn/rng.hpp"

namespace qbn {

namespace {
using nlohmann::json;

std::pair<int, int> norm_edge(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

bool connected(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n <= 1) return true;
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (auto [a, b] : edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[static_cast<size_t>(v)])
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++count;
        q.push(w);
      }
  }
  return count == n;
}

DeviceModel make_device(std::string name, int n, std::vector<std::pair<int, int>> edges, double u2, double cx,
                        double ro, std::string calibrated_at) {
  DeviceModel d;
  d.name = std::move(name);
  d.n_qubits = n;
  for (auto [a, b] : edges) d.coupling.push_back(norm_edge(a, b));
  std::sort(d.coupling.begin(), d.coupling.end());
  d.u2_error.assign(static_cast<size_t>(n), u2);
  d.readout_error.assign(static_cast<size_t>(n), ro);
  for (auto e : d.coupling) d.cnot_error[e] = cx;
  d.calibrated_at = std::move(calibrated_at);
  return d;
}

void check_device(const DeviceModel& d) {
  std::vector<std::string> errs;
  if (d.n_qubits <= 0) errs.push_back("n_qubits must be positive");
  for (auto [a, b] : d.coupling)
    if (a < 0 || b < 0 || a >= d.n_qubits || b >= d.n_qubits || a == b)
      errs.push_back("bad coupling pair [" + std::to_string(a) + "," + std::to_string(b) + "]");
  if (errs.empty() && !connected(d.n_qubits, d.coupling)) errs.push_back("coupling graph is not connected");
  auto in_range = [](double r) { return r >= 0.0 && r <= 1.0; };
  for (size_t q = 0; q < d.u2_error.size(); ++q)
    if (!in_range(d.u2_error[q])) errs.push_back("u2_error[" + std::to_string(q) + "] outside [0,1]");
  for (size_t q = 0; q < d.readout_error.size(); ++q)
    if (!in_range(d.readout_error[q])) errs.push_back("readout_error[" + std::to_string(q) + "] outside [0,1]");
  for (const auto& [e, r] : d.cnot_error) {
    if (std::find(d.coupling.begin(), d.coupling.end(), e) == d.coupling.end())
      errs.push_back("cnot_error on non-edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
    if (!in_range(r))
      errs.push_back("cnot_error[" + std::to_string(e.first) + "-" + std::to_string(e.second) + "] outside [0,1]");
  }
  if (!errs.empty()) {
    std::string msg = "device '" + d.name + "':";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }
}

}  // namespace

bool DeviceModel::has_edge(int a, int b) const {
  return std::find(coupling.begin(), coupling.end(), norm_edge(a, b)) != coupling.end();
}

double DeviceModel::cnot_rate(int a, int b) const {
  auto it = cnot_error.find(norm_edge(a, b));
  if (it == cnot_error.end())
    throw Error("no cnot_error for edge " + std::to_string(a) + "-" + std::to_string(b) + " on " + name);
  return it->second;
}

DeviceModel load_device(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("device document: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("device document: expected an object");

  DeviceModel d;
  d.name = doc.value("name", std::string("unnamed"));
  if (!doc.contains("n_qubits") || !doc["n_qubits"].is_number_integer())
    throw ValidationError("device document: missing integer 'n_qubits'");
  d.n_qubits = doc["n_qubits"].get<int>();
  d.calibrated_at = doc.value("calibrated_at", std::string(""));

  if (!doc.contains("coupling") || !doc["coupling"].is_array())
    throw ValidationError("device document: missing 'coupling' array");
  for (const auto& je : doc["coupling"]) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() || !je[1].is_number_integer())
      throw ValidationError("device document: coupling entries must be [a,b] integer pairs");
    d.coupling.push_back(norm_edge(je[0].get<int>(), je[1].get<int>()));
  }
  std::sort(d.coupling.begin(), d.coupling.end());
  d.coupling.erase(std::unique(d.coupling.begin(), d.coupling.end()), d.coupling.end());

  d.u2_error.assign(static_cast<size_t>(std::max(d.n_qubits, 0)), 0.0);
  d.readout_error.assign(static_cast<size_t>(std::max(d.n_qubits, 0)), 0.0);
  auto read_qubit_map = [&](const char* key, std::vector<double>& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_object()) throw ValidationError(std::string("device document: '") + key + "' must be an object");
    for (const auto& [k, v] : doc[key].items()) {
      int q = -1;
      try {
        q = std::stoi(k);
      } catch (...) {
      }
      if (q < 0 || q >= d.n_qubits)
        throw ValidationError(std::string("device document: ") + key + " key '" + k + "' is not a qubit");
      out[static_cast<size_t>(q)] = v.get<double>();
    }
  };
  read_qubit_map("u2_error", d.u2_error);
  read_qubit_map("readout_error", d.readout_error);

  if (doc.contains("cnot_error")) {
    if (!doc["cnot_error"].is_object()) throw ValidationError("device document: 'cnot_error' must be an object");
    for (const auto& [k, v] : doc["cnot_error"].items()) {
      auto dash = k.find('-');
      int a = -1, b = -1;
      try {
        a = std::stoi(k.substr(0, dash));
        b = std::stoi(k.substr(dash + 1));
      } catch (...) {
      }
      if (dash == std::string::npos || a < 0 || b < 0)
        throw ValidationError("device document: cnot_error key '" + k + "' is not 'a-b'");
      d.cnot_error[norm_edge(a, b)] = v.get<double>();
    }
  }
  for (auto e : d.coupling)
    if (!d.cnot_error.count(e)) d.cnot_error[e] = 0.0;

  check_device(d);
  return d;
}

DeviceModel load_device_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open device file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_device(ss.str());
}

std::string save_device(const DeviceModel& d) {
  json doc;
  doc["name"] = d.name;
  doc["n_qubits"] = d.n_qubits;
  json jc = json::array();
  for (auto [a, b] : d.coupling) jc.push_back(json::array({a, b}));
  doc["coupling"] = jc;
  json ju = json::object(), jr = json::object(), jx = json::object();
  for (int q = 0; q < d.n_qubits; ++q) {
    ju[std::to_string(q)] = d.u2_error[static_cast<size_t>(q)];
    jr[std::to_string(q)] = d.readout_error[static_cast<size_t>(q)];
  }
  for (const auto& [e, r] : d.cnot_error) jx[std::to_string(e.first) + "-" + std::to_string(e.second)] = r;
  doc["u2_error"] = ju;
  doc["readout_error"] = jr;
  doc["cnot_error"] = jx;
  doc["calibrated_at"] = d.calibrated_at;
  return doc.dump(2) + "\n";
}

uint64_t calibration_hash(const DeviceModel& d) { return fnv1a64(save_device(d)); }

std::vector<DeviceModel> builtin_catalog() {
  const double u2 = 5e-4, cx = 1e-2, ro = 2e-2;
  const std::string when = "representative-defaults";

  const std::vector<std::pair<int, int>> t_shape = {{0, 1}, {1, 2}, {1, 3}, {3, 4}};
  const std::vector<std::pair<int, int>> line = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  const std::vector<std::pair<int, int>> bow_tie = {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}};
  // Two rows (0..6 on top, 14..7 below) with a rung at every top qubit.
  std::vector<std::pair<int, int>> two_row;
  for (int q = 0; q < 6; ++q) two_row.push_back({q, q + 1});
  for (int q = 7; q < 14; ++q) two_row.push_back({q, q + 1});
  two_row.push_back({0, 14});
  for (int q = 1; q <= 6; ++q) two_row.push_back({q, 14 - q});

  std::vector<DeviceModel> catalog;
  for (const char* name : {"burlington", "ourense", "vigo", "essex", "london"})
    catalog.push_back(make_device(name, 5, t_shape, u2, cx, ro, when));
  for (const char* name : {"rome", "athens"}) catalog.push_back(make_device(name, 5, line, u2, cx, ro, when));
  catalog.push_back(make_device("yorktown", 5, bow_tie, u2, cx, ro, when));
  catalog.push_back(make_device("melbourne", 15, two_row, u2, cx, ro, when));
  for (const auto& d : catalog) check_device(d);
  return catalog;
}

DeviceModel ideal_device(int n_qubits) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n_qubits; ++a)
    for (int b = a + 1; b < n_qubits; ++b) edges.push_back({a, b});
  return make_device("ideal", n_qubits, std::move(edges), 0.0, 0.0, 0.0, "noise-free");
}

bool find_device(const std::string& name, int default_qubits, DeviceModel& out) {
  if (name == "ideal") {
    out = ideal_device(default_qubits);
    return true;
  }
  if (name.rfind("ideal:", 0) == 0) {
    out = ideal_device(std::stoi(name.substr(6)));
    return true;
  }
  for (auto& d : builtin_catalog())
    if (d.name == name) {
      out = std::move(d);
      return true;
    }
  return false;
}

}  // namespace qbn
