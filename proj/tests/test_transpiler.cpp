// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "qbn/cqbn.hpp"
#include "qbn/sim.hpp"
#include "qbn/transpiler.hpp"

using namespace qbn;

namespace {

QuantumCircuit ops_circuit(int width, std::vector<GateOp> ops) {
  CircuitBuilder b(width);
  for (auto& op : ops) b.gate(op.kind, op.qubits, op.params);
  return b.build();
}

Eigen::MatrixXcd seq_unitary(int width, const std::vector<GateOp>& ops) {
  return circuit_unitary(ops_circuit(width, ops));
}

BayesianNetwork load_stock() {
  std::ifstream in(test::data_file("networks/stock.json"));
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

bool is_device_legal(const QuantumCircuit& c, const DeviceModel& d) {
  for (const auto& op : c.ops) {
    const bool basis = op.kind == GateKind::U1 || op.kind == GateKind::U2 || op.kind == GateKind::U3 ||
                       op.kind == GateKind::CNOT;
    if (!basis) return false;
    if (op.kind == GateKind::CNOT && !d.has_edge(op.qubits[0], op.qubits[1])) return false;
  }
  return true;
}

size_t count_cnots(const QuantumCircuit& c) {
  size_t n = 0;
  for (const auto& op : c.ops) n += op.kind == GateKind::CNOT;
  return n;
}

}  // namespace

TEST_CASE("CRY decomposition is exact at theta = 0") {
  const auto u = seq_unitary(2, decompose_cry(0.0, 0, 1));
  CHECK((u - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("CRY decomposition matches the gate matrix with no phase slack") {
  for (double theta : {M_PI / 3, 0.1, 2.2, -1.3}) {
    const auto u = seq_unitary(2, decompose_cry(theta, 1, 0));
    const auto want = gate_matrix(GateKind::CRY, {theta});
    CHECK((u - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("CRY decomposition leaves a |0> control alone") {
  for (double theta : {0.4, 1.9}) {
    const auto u = seq_unitary(2, decompose_cry(theta, 1, 0));
    // control = qubit 1; basis states 0 and 1 have it clear
    CHECK(std::abs(u(0, 0) - cd(1, 0)) < 1e-12);
    CHECK(std::abs(u(1, 1) - cd(1, 0)) < 1e-12);
    CHECK(std::abs(u(1, 0)) < 1e-12);
  }
}

TEST_CASE("CCNOT decomposition has the advertised gate budget") {
  const auto seq = decompose_ccnot(0, 1, 2);
  size_t cx = 0, tlike = 0, h = 0;
  for (const auto& op : seq) {
    cx += op.kind == GateKind::CNOT;
    tlike += op.kind == GateKind::T || op.kind == GateKind::Tdg;
    h += op.kind == GateKind::H;
  }
  CHECK(cx == 6);
  CHECK(tlike == 7);
  CHECK(h == 2);
}

TEST_CASE("CCNOT decomposition matches the Toffoli matrix") {
  const auto u = seq_unitary(3, decompose_ccnot(2, 1, 0));
  CHECK(unitaries_equivalent(u, gate_matrix(GateKind::CCNOT), 1e-10));
}

TEST_CASE("CCNOT decomposition truth table") {
  auto prep = [](std::initializer_list<int> xs, const std::vector<GateOp>& seq) {
    CircuitBuilder b(3);
    for (int q : xs) b.x(q);
    for (const auto& op : seq) b.gate(op.kind, op.qubits, op.params);
    return evolve(b.build());
  };
  const auto seq = decompose_ccnot(2, 1, 0);  // controls q2, q1; target q0
  const auto sv_110 = prep({2, 1}, seq);      // |110> -> |111>
  CHECK(sv_110.probability(0b111) == doctest::Approx(1.0).epsilon(1e-10));
  const auto sv_010 = prep({1}, seq);  // |010> -> |010>
  CHECK(sv_010.probability(0b010) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("CCRY decomposition matches the gate matrix") {
  for (double theta : {0.3, 1.7}) {
    const auto u = seq_unitary(3, decompose_ccry(theta, 2, 1, 0));
    CHECK(unitaries_equivalent(u, gate_matrix(GateKind::CCRY, {theta}), 1e-10));
  }
}

TEST_CASE("resynthesize_1q: RY additivity") {
  const double a = 0.4, b = 0.9;
  const auto p = resynthesize_1q({GateOp{GateKind::RY, {0}, {a}}, GateOp{GateKind::RY, {0}, {b}}});
  CHECK(p.theta == doctest::Approx(a + b).epsilon(1e-12));
  CHECK(std::abs(p.phi) < 1e-12);
  CHECK(std::abs(p.lambda) < 1e-12);
}

TEST_CASE("resynthesize_1q: X then X is the identity") {
  const auto p = resynthesize_1q({GateOp{GateKind::X, {0}, {}}, GateOp{GateKind::X, {0}, {}}});
  CHECK(p.theta < 1e-12);
  CHECK(std::abs(std::remainder(p.phi + p.lambda, 2 * M_PI)) < 1e-12);
}

TEST_CASE("resynthesize_1q: H is U3(pi/2, 0, pi) up to phase") {
  const auto p = resynthesize_1q({GateOp{GateKind::H, {0}, {}}});
  CHECK(p.theta == doctest::Approx(M_PI / 2).epsilon(1e-12));
  const auto u = gate_matrix(GateKind::U3, {p.theta, p.phi, p.lambda});
  CHECK(unitaries_equivalent(u, gate_matrix(GateKind::H), 1e-12));
}

TEST_CASE("resynthesize_1q reproduces the run product (property)") {
  Rng rng(83);
  static const GateKind kinds[] = {GateKind::X,  GateKind::H,  GateKind::S,  GateKind::T, GateKind::Tdg,
                                   GateKind::U1, GateKind::U2, GateKind::U3, GateKind::RY};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<GateOp> run;
    const int len = 1 + static_cast<int>(rng.next_below(6));
    for (int i = 0; i < len; ++i) {
      const GateKind k = kinds[rng.next_below(std::size(kinds))];
      std::vector<double> params;
      for (int j = 0; j < gate_param_count(k); ++j) params.push_back(rng.next_double() * 2 * M_PI);
      run.push_back(GateOp{k, {0}, params});
    }
    const auto p = resynthesize_1q(run);
    CHECK(p.theta >= -1e-15);
    CHECK(p.theta <= M_PI + 1e-15);
    Eigen::Matrix2cd product = Eigen::Matrix2cd::Identity();
    for (const auto& op : run) product = Eigen::Matrix2cd(gate_matrix(op)) * product;
    const Eigen::MatrixXcd back =
        std::exp(cd(0, p.phase)) * gate_matrix(GateKind::U3, {p.theta, p.phi, p.lambda});
    CHECK((back - Eigen::MatrixXcd(product)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("basis decomposition leaves only the device basis") {
  Rng rng(89);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = test::random_circuit(rng, 4, 15);
    const auto basis = decompose_to_basis(c);
    for (const auto& op : basis.ops) {
      const bool ok = op.kind == GateKind::U1 || op.kind == GateKind::U2 || op.kind == GateKind::U3 ||
                      op.kind == GateKind::CNOT;
      CHECK(ok);
    }
    CHECK(unitaries_equivalent(circuit_unitary(basis), circuit_unitary(c), 1e-9));
  }
}

TEST_CASE("each commutation rule holds as a matrix identity") {
  // (i) diagonal through the control
  const GateOp cnot{GateKind::CNOT, {1, 0}, {}};
  const GateOp u1_on_c{GateKind::U1, {1}, {0.7}};
  CHECK(unitaries_equivalent(seq_unitary(2, {cnot, u1_on_c}), seq_unitary(2, {u1_on_c, cnot}), 1e-12));
  // (ii) X through the target
  const GateOp x_on_t{GateKind::X, {0}, {}};
  CHECK(unitaries_equivalent(seq_unitary(2, {cnot, x_on_t}), seq_unitary(2, {x_on_t, cnot}), 1e-12));
  // (iii) CNOTs sharing a control
  const GateOp cnot_a{GateKind::CNOT, {0, 1}, {}};
  const GateOp cnot_b{GateKind::CNOT, {0, 2}, {}};
  CHECK(unitaries_equivalent(seq_unitary(3, {cnot_a, cnot_b}), seq_unitary(3, {cnot_b, cnot_a}), 1e-12));
  // (iv) CNOTs sharing a target
  const GateOp cnot_c{GateKind::CNOT, {1, 0}, {}};
  const GateOp cnot_d{GateKind::CNOT, {2, 0}, {}};
  CHECK(unitaries_equivalent(seq_unitary(3, {cnot_c, cnot_d}), seq_unitary(3, {cnot_d, cnot_c}), 1e-12));
  // counterexamples the rule set must not admit
  const GateOp t_on_t{GateKind::T, {0}, {}};
  CHECK(!unitaries_equivalent(seq_unitary(2, {cnot, t_on_t}), seq_unitary(2, {t_on_t, cnot}), 1e-6));
  const GateOp chain{GateKind::CNOT, {0, 2}, {}};  // control = other's target
  CHECK(!unitaries_equivalent(seq_unitary(3, {cnot, chain}), seq_unitary(3, {chain, cnot}), 1e-6));
}

TEST_CASE("collapse cancels inverse pairs and merges feasible chains") {
  const auto basis = decompose_to_basis(
      ops_circuit(2, {GateOp{GateKind::X, {0}, {}}, GateOp{GateKind::X, {0}, {}}, GateOp{GateKind::CNOT, {0, 1}, {}},
                      GateOp{GateKind::CNOT, {0, 1}, {}}, GateOp{GateKind::T, {1}, {}}, GateOp{GateKind::T, {1}, {}}}));
  const auto collapsed = collapse_adjacent_gates(basis);
  REQUIRE(collapsed.ops.size() == 1);  // only the merged U1(pi/2) survives
  CHECK(collapsed.ops[0].kind == GateKind::U1);
  CHECK(collapsed.ops[0].params[0] == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(unitaries_equivalent(circuit_unitary(collapsed), circuit_unitary(basis), 1e-10));
}

TEST_CASE("collapse merges rotations around the same axis") {
  const auto c = decompose_to_basis(
      ops_circuit(1, {GateOp{GateKind::RY, {0}, {0.3}}, GateOp{GateKind::RY, {0}, {0.4}}}));
  const auto collapsed = collapse_adjacent_gates(c);
  REQUIRE(collapsed.ops.size() == 1);
  CHECK(collapsed.ops[0].params[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("commutative cancellation removes CNOT pairs across commuting gates") {
  const GateOp cnot{GateKind::CNOT, {1, 0}, {}};
  const GateOp diag{GateKind::U1, {1}, {0.7}};
  const GateOp x_t{GateKind::U3, {0}, {M_PI, 0.0, M_PI}};  // X on the target
  const auto c = ops_circuit(2, {cnot, diag, x_t, cnot});
  const auto out = cancel_commuting_cnots(c);
  REQUIRE(out.ops.size() == 2);
  CHECK(out.ops[0].kind == GateKind::U1);
  CHECK(unitaries_equivalent(circuit_unitary(out), circuit_unitary(c), 1e-10));

  // a blocking gate keeps the pair alive
  const GateOp t_t{GateKind::U1, {0}, {0.5}};  // diagonal on the *target*
  const auto blocked = cancel_commuting_cnots(ops_circuit(2, {cnot, t_t, cnot}));
  CHECK(blocked.ops.size() == 3);
}

TEST_CASE("commutative cancellation uses the shared-control rule") {
  const GateOp a{GateKind::CNOT, {0, 1}, {}};
  const GateOp mid{GateKind::CNOT, {0, 2}, {}};
  const auto out = cancel_commuting_cnots(ops_circuit(3, {a, mid, a}));
  REQUIRE(out.ops.size() == 1);
  CHECK(out.ops[0] == mid);
}

TEST_CASE("resynthesis pass shortens single-qubit runs") {
  const auto c = decompose_to_basis(ops_circuit(
      1, {GateOp{GateKind::H, {0}, {}}, GateOp{GateKind::T, {0}, {}}, GateOp{GateKind::H, {0}, {}}}));
  const auto out = resynthesize_single_qubit_runs(c);
  REQUIRE(out.ops.size() == 1);
  CHECK(unitaries_equivalent(circuit_unitary(out), circuit_unitary(c), 1e-10));
}

TEST_CASE("optimization pipelines extend each other pass by pass") {
  const auto names0 = optimization_pass_names(OptimizationLevel::L0);
  const auto names1 = optimization_pass_names(OptimizationLevel::L1);
  const auto names2 = optimization_pass_names(OptimizationLevel::L2);
  const auto names3 = optimization_pass_names(OptimizationLevel::L3);
  CHECK(names0.empty());
  REQUIRE(names1.size() == 1);
  REQUIRE(names2.size() == 2);
  REQUIRE(names3.size() == 3);
  CHECK(std::equal(names1.begin(), names1.end(), names2.begin()));
  CHECK(std::equal(names2.begin(), names2.end(), names3.begin()));

  Rng rng(97);
  for (int trial = 0; trial < 10; ++trial) {
    const auto basis = decompose_to_basis(test::random_circuit(rng, 4, 15));
    const auto l1 = optimize_gates(basis, OptimizationLevel::L1);
    CHECK(optimize_gates(basis, OptimizationLevel::L0).ops == basis.ops);
    CHECK(collapse_adjacent_gates(basis).ops == l1.ops);
    const auto l2 = optimize_gates(basis, OptimizationLevel::L2);
    CHECK(cancel_commuting_cnots(l1).ops == l2.ops);
    const auto l3 = optimize_gates(basis, OptimizationLevel::L3);
    CHECK(resynthesize_single_qubit_runs(l2).ops == l3.ops);
  }
}

TEST_CASE("transpile preserves semantics on every level and device (property)") {
  Rng rng(101);
  std::vector<DeviceModel> devices;
  DeviceModel d;
  REQUIRE(find_device("athens", 5, d));
  devices.push_back(d);
  REQUIRE(find_device("yorktown", 5, d));
  devices.push_back(d);
  REQUIRE(find_device("burlington", 5, d));
  devices.push_back(d);
  for (int trial = 0; trial < 8; ++trial) {
    const auto c = test::random_circuit(rng, 4, 12);
    const auto want = circuit_unitary(c);
    for (const auto& dev : devices)
      for (int lvl = 0; lvl <= 3; ++lvl) {
        const auto r = transpile(c, dev, level_from_int(lvl));
        CHECK(is_device_legal(r.circuit, dev));
        CHECK(unitaries_equivalent(effective_unitary(r), want, 1e-8));
      }
  }
}

TEST_CASE("routing the stock circuit on a line needs swaps") {
  const auto [circuit, plan] = compile(load_stock());
  DeviceModel athens;
  REQUIRE(find_device("athens", 5, athens));
  const auto r = transpile(circuit, athens, OptimizationLevel::L0);
  CHECK(r.metrics.swaps_inserted >= 1);
  CHECK(is_device_legal(r.circuit, athens));
}

TEST_CASE("fully connected devices need no routing") {
  const auto [circuit, plan] = compile(load_stock());
  const auto r = transpile(circuit, ideal_device(5), OptimizationLevel::L0);
  CHECK(r.metrics.swaps_inserted == 0);
}

TEST_CASE("higher levels never grow the stock circuit") {
  const auto [circuit, plan] = compile(load_stock());
  DeviceModel athens;
  REQUIRE(find_device("athens", 5, athens));
  const auto l0 = transpile(circuit, athens, OptimizationLevel::L0);
  for (int lvl = 1; lvl <= 3; ++lvl) {
    const auto r = transpile(circuit, athens, level_from_int(lvl));
    CHECK(r.metrics.output_ops <= l0.metrics.output_ops);
  }
}

TEST_CASE("noise-adaptive layout avoids a 10x worse edge") {
  // line 0-1-2 with a terrible first edge; one dominant interacting pair
  DeviceModel d;
  d.name = "lopsided";
  d.n_qubits = 3;
  d.coupling = {{0, 1}, {1, 2}};
  d.u2_error = {1e-4, 1e-4, 1e-4};
  d.readout_error = {0, 0, 0};
  d.cnot_error[{0, 1}] = 0.10;
  d.cnot_error[{1, 2}] = 0.01;
  d.calibrated_at = "test";
  CircuitBuilder b(2);
  for (int i = 0; i < 8; ++i) b.cnot(0, 1);
  const auto c = decompose_to_basis(b.build());
  const Layout layout = choose_layout(c, d, OptimizationLevel::L2);
  const std::pair<int, int> placed = {std::min(layout.log_to_phys[0], layout.log_to_phys[1]),
                                      std::max(layout.log_to_phys[0], layout.log_to_phys[1])};
  CHECK(placed == std::pair<int, int>{1, 2});
}

TEST_CASE("transpilation is deterministic") {
  const auto [circuit, plan] = compile(load_stock());
  DeviceModel dev;
  REQUIRE(find_device("melbourne", 5, dev));
  const auto a = transpile(circuit, dev, OptimizationLevel::L3, 1);
  const auto b = transpile(circuit, dev, OptimizationLevel::L3, 2);
  CHECK(a.circuit.ops == b.circuit.ops);
  CHECK(a.layout.log_to_phys == b.layout.log_to_phys);
  CHECK(a.final_permutation == b.final_permutation);
}

TEST_CASE("transpile rejects circuits wider than the device") {
  const auto c = CircuitBuilder(6).build();
  DeviceModel athens;
  REQUIRE(find_device("athens", 5, athens));
  CHECK_THROWS_AS(transpile(c, athens, OptimizationLevel::L0), ValidationError);
}

TEST_CASE("logical controlled rotations never survive transpilation") {
  auto c = CircuitBuilder(3).ccry(0.8, 0, 1, 2).cry(0.4, 0, 2).build();
  for (int lvl = 0; lvl <= 3; ++lvl) {
    const auto r = transpile(c, ideal_device(3), level_from_int(lvl));
    for (const auto& op : r.circuit.ops) {
      CHECK(op.kind != GateKind::CRY);
      CHECK(op.kind != GateKind::CCRY);
    }
    CHECK(unitaries_equivalent(effective_unitary(r), circuit_unitary(c), 1e-8));
  }
}
