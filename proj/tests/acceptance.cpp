// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: each criterion prints one [PASS]/[FAIL] line; the
// process exits non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "qbn/harness.hpp"
#include "qbn/qasm.hpp"

using namespace qbn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string data_path(const std::string& rel) {
#ifdef QBN_DATA_DIR
  return std::string(QBN_DATA_DIR) + "/" + rel;
#else
  return "data/" + rel;
#endif
}

BayesianNetwork stock_network() { return load_network_file(data_path("networks/stock.json")); }

const std::vector<double> kNetica = {0.750, 0.600, 0.425, 0.499};

Outcome criterion1_noiseless_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.network = stock_network();
  cfg.network_name = "stock";
  cfg.devices = {ideal_device(5)};
  cfg.runs = 10;
  cfg.shots = 8192;
  cfg.base_seed = 42;
  const auto report = run_experiment(cfg);

  bool ok = report.cells.size() == 4;
  double worst_mean = 0.0, worst_std = 0.0, worst_rmspe = 0.0;
  for (const auto& cell : report.cells) {
    for (size_t node = 0; node < 4; ++node) {
      worst_mean = std::max(worst_mean, std::abs(cell.mean[node] - kNetica[node]));
      worst_std = std::max(worst_std, cell.stddev[node]);
    }
    worst_rmspe = std::max(worst_rmspe, cell.rmspe_percent);
  }
  const double secs = elapsed_s(t0);
  ok = ok && worst_mean <= 0.01 && worst_std <= 0.01 && worst_rmspe <= 0.5 && secs < 10.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "max |mean-ref| %.4f (<=0.01), max std %.4f (<=0.01), max rmspe %.3f%% (<=0.5), %.1fs (<10s)",
                worst_mean, worst_std, worst_rmspe, secs);
  return {ok, buf};
}

Outcome criterion2_rmspe_oracle() {
  const double yorktown = rmspe(kNetica, {0.718, 0.567, 0.454, 0.497});
  const double burlington = rmspe(kNetica, {0.240, 0.536, 0.476, 0.598});
  const bool ok = std::abs(yorktown - 4.9) <= 0.05 && std::abs(burlington - 36.3) <= 0.05;
  char buf[120];
  std::snprintf(buf, sizeof buf, "yorktown L0 %.3f%% (ref 4.9), burlington L0 %.3f%% (ref 36.3)", yorktown,
                burlington);
  return {ok, buf};
}

Outcome criterion3_exact_inference() {
  const auto marginals = exact_marginals(stock_network());
  double worst = 0.0;
  for (size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(marginals[i] - kNetica[i]));
  bool ok = worst <= 0.001;

  Rng rng(2024);
  double worst_oracle = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto bn = test::random_network(rng, 5, 3);
    const auto got = exact_marginals(bn);
    const auto want = test::marginals_oracle(bn);
    for (size_t i = 0; i < bn.size(); ++i) worst_oracle = std::max(worst_oracle, std::abs(got[i] - want[i]));
  }
  ok = ok && worst_oracle <= 1e-12;
  char buf[140];
  std::snprintf(buf, sizeof buf, "stock max dev %.2e (<=1e-3), 200 random nets vs oracle max dev %.2e (<=1e-12)",
                worst, worst_oracle);
  return {ok, buf};
}

Outcome criterion4_compiler_correctness() {
  Rng rng(777);
  double worst_dist = 0.0, worst_anc = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto bn = test::random_network(rng, 4, 2);
    const auto [circuit, plan] = compile(bn);
    worst_dist = std::max(worst_dist, verify_distribution(bn, circuit, plan));
    if (!plan.ancilla_qubits.empty()) {
      const auto sv = evolve(circuit);
      double p1 = 0.0;
      for (size_t i = 0; i < sv.amps.size(); ++i)
        if ((i >> plan.ancilla_qubits[0]) & 1u) p1 += sv.probability(i);
      worst_anc = std::max(worst_anc, p1);
    }
  }
  const bool ok = worst_dist <= 1e-9 && worst_anc <= 1e-10;
  char buf[140];
  std::snprintf(buf, sizeof buf, "200 nets: max distribution dev %.2e (<=1e-9), max ancilla P(1) %.2e (<=1e-10)",
                worst_dist, worst_anc);
  return {ok, buf};
}

Outcome criterion5_decompositions() {
  Rng rng(555);
  double worst = 0.0;
  auto gap = [](const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v) {
    Eigen::Index r = 0, c = 0;
    double best = -1;
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        if (std::abs(v(i, j)) > best) {
          best = std::abs(v(i, j));
          r = i;
          c = j;
        }
    cd alpha = u(r, c) / v(r, c);
    alpha /= std::abs(alpha);
    return (u - alpha * v).cwiseAbs().maxCoeff();
  };

  for (int trial = 0; trial < 25; ++trial) {
    const double theta = (rng.next_double() * 2 - 1) * 2 * M_PI;
    CircuitBuilder b(2);
    for (const auto& op : decompose_cry(theta, 1, 0)) b.gate(op.kind, op.qubits, op.params);
    worst = std::max(worst, gap(circuit_unitary(b.build()), gate_matrix(GateKind::CRY, {theta})));
  }
  {
    CircuitBuilder b(3);
    for (const auto& op : decompose_ccnot(2, 1, 0)) b.gate(op.kind, op.qubits, op.params);
    worst = std::max(worst, gap(circuit_unitary(b.build()), gate_matrix(GateKind::CCNOT)));
  }

  static const GateKind kinds[] = {GateKind::X,  GateKind::H,  GateKind::S,  GateKind::T, GateKind::Tdg,
                                   GateKind::U1, GateKind::U2, GateKind::U3, GateKind::RY};
  double worst_run = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<GateOp> run;
    const int len = 1 + static_cast<int>(rng.next_below(8));
    for (int i = 0; i < len; ++i) {
      const GateKind k = kinds[rng.next_below(std::size(kinds))];
      std::vector<double> params;
      for (int j = 0; j < gate_param_count(k); ++j) params.push_back(rng.next_double() * 2 * M_PI);
      run.push_back(GateOp{k, {0}, params});
    }
    const auto p = resynthesize_1q(run);
    Eigen::Matrix2cd product = Eigen::Matrix2cd::Identity();
    for (const auto& op : run) product = Eigen::Matrix2cd(gate_matrix(op)) * product;
    const Eigen::MatrixXcd back =
        std::exp(cd(0, p.phase)) * gate_matrix(GateKind::U3, {p.theta, p.phi, p.lambda});
    worst_run = std::max(worst_run, (back - Eigen::MatrixXcd(product)).cwiseAbs().maxCoeff());
  }
  const bool ok = worst <= 1e-10 && worst_run <= 1e-10;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "cry/ccnot max dev %.2e (<=1e-10), 1000 resynthesized runs max dev %.2e (<=1e-10)", worst,
                worst_run);
  return {ok, buf};
}

Outcome criterion6_transpiler_preservation() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto catalog = builtin_catalog();
  Rng rng(31337);
  size_t illegal = 0, failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int width = 2 + static_cast<int>(rng.next_below(4));   // <= 5
    const int depth = 1 + static_cast<int>(rng.next_below(30));  // <= 30
    const auto c = test::random_circuit(rng, width, depth);
    const auto want = circuit_unitary(c);
    for (const auto& device : catalog)
      for (int lvl = 0; lvl <= 3; ++lvl) {
        const auto r = transpile(c, device, level_from_int(lvl));
        for (const auto& op : r.circuit.ops) {
          const bool basis = op.kind == GateKind::U1 || op.kind == GateKind::U2 || op.kind == GateKind::U3 ||
                             op.kind == GateKind::CNOT;
          if (!basis || (op.kind == GateKind::CNOT && !device.has_edge(op.qubits[0], op.qubits[1]))) ++illegal;
        }
        if (!unitaries_equivalent(effective_unitary(r, 14), want, 1e-8)) ++failures;
      }
  }
  const double secs = elapsed_s(t0);
  const bool ok = failures == 0 && illegal == 0 && secs < 300.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "100 circuits x 9 devices x 4 levels: %zu equivalence failures, %zu illegal gates, %.0fs (<300s)",
                failures, illegal, secs);
  return {ok, buf};
}

Outcome criterion7_optimization_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto catalog = builtin_catalog();
  const auto bn = stock_network();
  int devices_ok = 0;
  std::string per_device;
  for (const auto& device : catalog) {
    std::vector<double> med(4, 0.0);
    for (int lvl : {0, 1, 3}) {
      std::vector<double> vals;
      for (uint64_t seed = 0; seed < 10; ++seed) {
        ExperimentConfig cfg;
        cfg.network = bn;
        cfg.network_name = "stock";
        cfg.devices = {device};
        cfg.levels = {level_from_int(lvl)};
        cfg.runs = 10;
        cfg.shots = 8192;
        cfg.base_seed = 1000 + seed;
        vals.push_back(run_experiment(cfg).cells[0].rmspe_percent);
      }
      std::sort(vals.begin(), vals.end());
      med[static_cast<size_t>(lvl)] = (vals[4] + vals[5]) / 2.0;
    }
    const bool mono = med[3] <= med[0] && med[3] <= med[1];
    devices_ok += mono;
    char buf[90];
    std::snprintf(buf, sizeof buf, " %s L0 %.1f / L1 %.1f / L3 %.1f%s", device.name.c_str(), med[0], med[1],
                  med[3], mono ? "" : " (not monotone)");
    per_device += buf;
  }
  const double secs = elapsed_s(t0);
  const bool ok = devices_ok >= 6;
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d of 9 devices non-increasing (need >=6), %.0fs;", devices_ok, secs);
  return {ok, buf + per_device};
}

Outcome criterion8_cli_determinism() {
#ifndef QBN_CLI_PATH
  return {false, "QBN_CLI_PATH not defined"};
#else
  const std::string cli = QBN_CLI_PATH;
  const std::string net = data_path("networks/stock.json");
  auto run_once = [&](const std::string& out) {
    const std::string cmd = cli + " evaluate " + net +
                            " --devices yorktown,athens --levels 0,3 --runs 3 --shots 1024 --seed 7 --out " + out +
                            " > /dev/null";
    return std::system(cmd.c_str());
  };
  const std::string out1 = "/tmp/qbn_accept_run1.csv", out2 = "/tmp/qbn_accept_run2.csv";
  if (run_once(out1) != 0 || run_once(out2) != 0) return {false, "evaluate invocation failed"};
  std::ifstream f1(out1, std::ios::binary), f2(out2, std::ios::binary);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  const bool ok = !s1.str().empty() && s1.str() == s2.str();
  char buf[100];
  std::snprintf(buf, sizeof buf, "two evaluate invocations: %zu bytes each, byte-identical: %s", s1.str().size(),
                ok ? "yes" : "no");
  return {ok, buf};
#endif
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "noiseless reproduction of the reference marginals", criterion1_noiseless_reproduction},
      {2, "rmspe oracle cross-checks", criterion2_rmspe_oracle},
      {3, "exact inference oracle", criterion3_exact_inference},
      {4, "compiler distribution correctness", criterion4_compiler_correctness},
      {5, "decomposition equivalence", criterion5_decompositions},
      {6, "transpiler semantic preservation", criterion6_transpiler_preservation},
      {7, "optimization level trend under noise", criterion7_optimization_trend},
      {8, "evaluate determinism", criterion8_cli_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    Outcome outcome;
    try {
      outcome = criterion.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s — %s\n", outcome.pass ? "PASS" : "FAIL", criterion.id, criterion.name,
                outcome.detail.c_str());
    std::fflush(stdout);
    failures += !outcome.pass;
  }
  return failures == 0 ? 0 : 1;
}
