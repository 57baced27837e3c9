// SPDX-License-Identifier: Apache-2.0
#include "qbn/qasm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace qbn {

namespace {

std::string fmt_angle(double a) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", a);
  return buf;
}

struct Parser {
  std::string text;
  size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("qasm line " + std::to_string(line) + ": " + what);
  }

  void skip_ws() {
    while (pos < text.size()) {
      char ch = text[pos];
      if (ch == '\n') {
        ++line;
        ++pos;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos;
      } else if (ch == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  bool try_consume(const std::string& tok) {
    skip_ws();
    if (text.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }

  void expect(char ch) {
    skip_ws();
    if (pos >= text.size() || text[pos] != ch) fail(std::string("expected '") + ch + "'");
    ++pos;
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
    if (pos == start) fail("expected identifier");
    return text.substr(start, pos - start);
  }

  int integer() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected integer");
    return std::stoi(text.substr(start, pos - start));
  }

  // number | pi | expressions of the form k*pi, pi/k, -..., k*pi/m
  double angle_term() {
    skip_ws();
    double sign = 1.0;
    while (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      if (text[pos] == '-') sign = -sign;
      ++pos;
      skip_ws();
    }
    double value;
    if (text.compare(pos, 2, "pi") == 0 && (pos + 2 >= text.size() ||
        !std::isalnum(static_cast<unsigned char>(text[pos + 2])))) {
      pos += 2;
      value = M_PI;
    } else {
      size_t start = pos;
      while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
                                   text[pos] == 'e' || text[pos] == 'E' ||
                                   ((text[pos] == '+' || text[pos] == '-') && pos > start &&
                                    (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
        ++pos;
      if (pos == start) fail("expected number or pi");
      try {
        value = std::stod(text.substr(start, pos - start));
      } catch (...) {
        fail("bad numeric literal");
      }
      skip_ws();
      if (text.compare(pos, 1, "*") == 0) {
        ++pos;
        skip_ws();
        if (text.compare(pos, 2, "pi") != 0) fail("expected pi after '*'");
        pos += 2;
        value *= M_PI;
      }
    }
    skip_ws();
    if (pos < text.size() && text[pos] == '/') {
      ++pos;
      skip_ws();
      size_t start = pos;
      while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
      if (pos == start) fail("expected divisor");
      value /= std::stod(text.substr(start, pos - start));
    }
    return sign * value;
  }

  int qubit_ref(const std::string& reg_name, int reg_size) {
    std::string name = ident();
    if (name != reg_name) fail("unknown register '" + name + "'");
    expect('[');
    int idx = integer();
    expect(']');
    if (idx < 0 || idx >= reg_size) fail("index " + std::to_string(idx) + " out of range");
    return idx;
  }
};

}  // namespace

std::string to_qasm(const QuantumCircuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.width << "];\n";
  if (!c.measured.empty()) out << "creg c[" << c.measured.size() << "];\n";

  for (const auto& op : c.ops) {
    switch (op.kind) {
      case GateKind::CRY:
      case GateKind::CCRY:
        throw ValidationError(std::string(gate_name(op.kind)) +
                              " has no form in the QASM subset; decompose before export");
      default:
        break;
    }
    out << gate_name(op.kind);
    if (!op.params.empty()) {
      out << "(";
      for (size_t i = 0; i < op.params.size(); ++i) out << (i ? "," : "") << fmt_angle(op.params[i]);
      out << ")";
    }
    out << " ";
    for (size_t i = 0; i < op.qubits.size(); ++i) out << (i ? "," : "") << "q[" << op.qubits[i] << "]";
    out << ";\n";
  }

  // classical bit j holds the node with the j-th smallest id
  std::vector<std::pair<NodeId, int>> order;  // (node, qubit)
  for (int q : c.measured) order.push_back({*c.roles[static_cast<size_t>(q)], q});
  std::sort(order.begin(), order.end());
  for (size_t j = 0; j < order.size(); ++j)
    out << "measure q[" << order[j].second << "] -> c[" << j << "];\n";
  return out.str();
}

QuantumCircuit from_qasm(const std::string& text) {
  Parser p{text};
  if (!p.try_consume("OPENQASM")) p.fail("expected OPENQASM header");
  if (!p.try_consume("2.0")) p.fail("only OPENQASM 2.0 is supported");
  p.expect(';');
  if (p.try_consume("include")) {
    p.skip_ws();
    while (p.pos < p.text.size() && p.text[p.pos] != ';') ++p.pos;
    p.expect(';');
  }

  if (!p.try_consume("qreg")) p.fail("expected qreg declaration");
  std::string qreg = p.ident();
  p.expect('[');
  int width = p.integer();
  p.expect(']');
  p.expect(';');
  if (width <= 0 || width > 64) p.fail("unsupported qreg size");

  std::string creg;
  int creg_size = 0;

  static const std::map<std::string, GateKind> kinds = {
      {"x", GateKind::X},       {"h", GateKind::H},     {"s", GateKind::S},   {"t", GateKind::T},
      {"tdg", GateKind::Tdg},   {"u1", GateKind::U1},   {"u2", GateKind::U2}, {"u3", GateKind::U3},
      {"ry", GateKind::RY},     {"cx", GateKind::CNOT}, {"swap", GateKind::SWAP},
      {"ccx", GateKind::CCNOT},
  };

  CircuitBuilder b(width);
  std::vector<std::pair<int, int>> measures;  // (qubit, clbit)

  while (!p.eof()) {
    int stmt_line = p.line;
    std::string word = p.ident();
    if (word == "creg") {
      creg = p.ident();
      p.expect('[');
      creg_size = p.integer();
      p.expect(']');
      p.expect(';');
      continue;
    }
    if (word == "measure") {
      int q = p.qubit_ref(qreg, width);
      p.skip_ws();
      if (!p.try_consume("->")) p.fail("expected '->'");
      if (creg.empty()) p.fail("measure before creg declaration");
      int bit = p.qubit_ref(creg, creg_size);
      measures.push_back({q, bit});
      p.expect(';');
      continue;
    }
    if (word == "barrier") {  // accepted and dropped
      while (p.pos < p.text.size() && p.text[p.pos] != ';') ++p.pos;
      p.expect(';');
      continue;
    }
    auto it = kinds.find(word);
    if (it == kinds.end()) {
      p.line = stmt_line;
      p.fail("unsupported statement '" + word + "'");
    }
    std::vector<double> params;
    p.skip_ws();
    if (p.pos < p.text.size() && p.text[p.pos] == '(') {
      p.expect('(');
      params.push_back(p.angle_term());
      while (p.pos < p.text.size()) {
        p.skip_ws();
        if (p.text[p.pos] == ',') {
          ++p.pos;
          params.push_back(p.angle_term());
        } else {
          break;
        }
      }
      p.expect(')');
    }
    std::vector<int> qubits;
    qubits.push_back(p.qubit_ref(qreg, width));
    while (true) {
      p.skip_ws();
      if (p.pos < p.text.size() && p.text[p.pos] == ',') {
        ++p.pos;
        qubits.push_back(p.qubit_ref(qreg, width));
      } else {
        break;
      }
    }
    p.expect(';');
    try {
      b.gate(it->second, std::move(qubits), std::move(params));
    } catch (const ValidationError& e) {
      p.line = stmt_line;
      p.fail(e.what());
    }
  }

  // Node roles come from the measure mapping: clbit j <-> node j.
  for (int q = 0; q < width; ++q) b.set_ancilla(q);
  std::sort(measures.begin(), measures.end(), [](auto a, auto bb) { return a.second < bb.second; });
  for (const auto& [q, bit] : measures) {
    b.set_node(q, bit);
    b.measure(q);
  }
  return b.build();
}

QuantumCircuit from_qasm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open qasm file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_qasm(ss.str());
}

}  // namespace qbn
