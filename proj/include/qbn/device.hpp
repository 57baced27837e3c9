// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qbn/bayesnet.hpp"

namespace qbn {

// Coupling topology plus calibration error rates for one device. Coupling is
// undirected; a CNOT may run in either direction of an edge at equal cost.
struct DeviceModel {
  std::string name;
  int n_qubits = 0;
  std::vector<std::pair<int, int>> coupling;          // each pair stored (a < b)
  std::vector<double> u2_error;                       // per qubit
  std::vector<double> readout_error;                  // per qubit, defaults to 0
  std::map<std::pair<int, int>, double> cnot_error;   // per coupling edge
  std::string calibrated_at;

  bool has_edge(int a, int b) const;
  double cnot_rate(int a, int b) const;  // throws on non-edges
};

// Parse + validate a calibration document. All problems found are reported.
DeviceModel load_device(const std::string& json_text);
DeviceModel load_device_file(const std::string& path);
std::string save_device(const DeviceModel& d);

// FNV-1a over the canonical serialized document; recorded in report provenance.
uint64_t calibration_hash(const DeviceModel& d);

// The nine-device catalog: five 5-qubit T-shaped devices, two 5-qubit lines,
// one 5-qubit bow-tie and one 15-qubit two-row lattice. Error rates are
// uniform representative defaults (u2 5e-4, cnot 1e-2, readout 2e-2); load a
// calibration document to override them.
std::vector<DeviceModel> builtin_catalog();

// Catalog device by name, or a zero-noise fully connected device via
// "ideal" / "ideal:<n>". Returns false if the name is unknown.
bool find_device(const std::string& name, int default_qubits, DeviceModel& out);

// Fully connected device with all error rates zero.
DeviceModel ideal_device(int n_qubits);

}  // namespace qbn
