// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "qbn/circuit.hpp"

namespace qbn {

// OpenQASM 2.0 subset: qreg, creg, u1, u2, u3, cx, ry, x, h, s, t, tdg,
// swap, ccx, measure. CRY and CCRY have no form in the subset and must be
// decomposed before export (the exporter throws otherwise). Measured qubits
// are written to the classical register in node-id order; the importer
// assigns node roles from the measure mapping and marks unmeasured qubits
// as ancillas.
std::string to_qasm(const QuantumCircuit& c);
QuantumCircuit from_qasm(const std::string& text);
QuantumCircuit from_qasm_file(const std::string& path);

}  // namespace qbn
