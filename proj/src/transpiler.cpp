// SPDX-License-Identifier: Apache-2.0
#include "qbn/transpiler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "qbn/sim.hpp"

namespace qbn {

namespace {

constexpr double kExact = 1e-12;

double norm_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  return r;
}

struct U3Triple {
  double theta, phi, lambda;
};

// Every single-qubit kind as U3 angles (exact identities).
U3Triple as_u3(const GateOp& op) {
  switch (op.kind) {
    case GateKind::X: return {M_PI, 0.0, M_PI};
    case GateKind::H: return {M_PI / 2.0, 0.0, M_PI};
    case GateKind::S: return {0.0, 0.0, M_PI / 2.0};
    case GateKind::T: return {0.0, 0.0, M_PI / 4.0};
    case GateKind::Tdg: return {0.0, 0.0, -M_PI / 4.0};
    case GateKind::U1: return {0.0, 0.0, op.params[0]};
    case GateKind::U2: return {M_PI / 2.0, op.params[0], op.params[1]};
    case GateKind::U3: return {op.params[0], op.params[1], op.params[2]};
    case GateKind::RY: return {op.params[0], 0.0, 0.0};
    default:
      throw Error(std::string("as_u3: not a single-qubit gate: ") + gate_name(op.kind));
  }
}

bool is_1q(const GateOp& op) { return op.qubits.size() == 1; }

bool diagonal(const U3Triple& t) { return std::abs(std::sin(t.theta / 2.0)) <= kExact; }

// e^{i a} X for some a: antidiagonal with matching entry phases.
bool x_like(const U3Triple& t) {
  if (std::abs(std::cos(t.theta / 2.0)) > kExact) return false;
  return std::abs(norm_angle(t.lambda - t.phi - M_PI)) <= 1e-9;
}

// Emit the cheapest kind that realizes the angles, or nothing for identity.
std::optional<GateOp> canonical_1q(int qubit, U3Triple t) {
  if (diagonal(t)) {
    const double lam = norm_angle(t.phi + t.lambda);
    if (std::abs(lam) <= kExact) return std::nullopt;
    return GateOp{GateKind::U1, {qubit}, {lam}};
  }
  if (std::abs(t.theta - M_PI / 2.0) <= kExact) return GateOp{GateKind::U2, {qubit}, {t.phi, t.lambda}};
  return GateOp{GateKind::U3, {qubit}, {t.theta, t.phi, t.lambda}};
}

// Closed-form merge of (g1 then g2) where one factor is diagonal or both are
// plain Y rotations. Anything else is left for unitary synthesis (level 3).
std::optional<U3Triple> merge_closed_form(const U3Triple& t1, const U3Triple& t2) {
  if (diagonal(t1)) return U3Triple{t2.theta, t2.phi, t2.lambda + t1.phi + t1.lambda};
  if (diagonal(t2)) return U3Triple{t1.theta, t1.phi + t2.phi + t2.lambda, t1.lambda};
  if (std::abs(t1.phi) <= kExact && std::abs(t1.lambda) <= kExact && std::abs(t2.phi) <= kExact &&
      std::abs(t2.lambda) <= kExact)
    return U3Triple{t1.theta + t2.theta, 0.0, 0.0};
  return std::nullopt;
}

bool product_is_identity(const GateOp& g1, const GateOp& g2) {
  const Eigen::MatrixXcd m = gate_matrix(g2) * gate_matrix(g1);
  if (std::abs(m(0, 1)) > kExact || std::abs(m(1, 0)) > kExact) return false;
  return std::abs(m(0, 0) - m(1, 1)) <= kExact;
}

size_t next_touching(const std::vector<GateOp>& ops, size_t i, std::initializer_list<int> qubits) {
  for (size_t j = i + 1; j < ops.size(); ++j)
    for (int q : qubits)
      if (ops[j].touches(q)) return j;
  return ops.size();
}

QuantumCircuit with_ops(const QuantumCircuit& c, std::vector<GateOp> ops) {
  QuantumCircuit out = c;
  out.ops = std::move(ops);
  return out;
}

}  // namespace

OptimizationLevel level_from_int(int level) {
  if (level < 0 || level > 3) throw ValidationError("optimization level must be 0..3");
  return static_cast<OptimizationLevel>(level);
}

std::vector<GateOp> decompose_cry(double theta, int control, int target) {
  if (control == target) throw ValidationError("decompose_cry: control equals target");
  return {
      GateOp{GateKind::RY, {target}, {theta / 2.0}},
      GateOp{GateKind::CNOT, {control, target}, {}},
      GateOp{GateKind::RY, {target}, {-theta / 2.0}},
      GateOp{GateKind::CNOT, {control, target}, {}},
  };
}

std::vector<GateOp> decompose_ccnot(int c1, int c2, int t) {
  if (c1 == c2 || c1 == t || c2 == t) throw ValidationError("decompose_ccnot: operands must be distinct");
  auto g = [](GateKind k, std::vector<int> q) { return GateOp{k, std::move(q), {}}; };
  return {
      g(GateKind::H, {t}),         g(GateKind::CNOT, {c2, t}),  g(GateKind::Tdg, {t}),
      g(GateKind::CNOT, {c1, t}),  g(GateKind::T, {t}),         g(GateKind::CNOT, {c2, t}),
      g(GateKind::Tdg, {t}),       g(GateKind::CNOT, {c1, t}),  g(GateKind::T, {c2}),
      g(GateKind::T, {t}),         g(GateKind::CNOT, {c1, c2}), g(GateKind::H, {t}),
      g(GateKind::T, {c1}),        g(GateKind::Tdg, {c2}),      g(GateKind::CNOT, {c1, c2}),
  };
}

std::vector<GateOp> decompose_ccry(double theta, int c1, int c2, int t) {
  if (c1 == c2 || c1 == t || c2 == t) throw ValidationError("decompose_ccry: operands must be distinct");
  std::vector<GateOp> out;
  auto append = [&](std::vector<GateOp> seq) {
    for (auto& op : seq) out.push_back(std::move(op));
  };
  append(decompose_cry(theta / 2.0, c2, t));
  out.push_back(GateOp{GateKind::CNOT, {c1, c2}, {}});
  append(decompose_cry(-theta / 2.0, c2, t));
  out.push_back(GateOp{GateKind::CNOT, {c1, c2}, {}});
  append(decompose_cry(theta / 2.0, c1, t));
  return out;
}

U3Params resynthesize_1q(const std::vector<GateOp>& run) {
  if (run.empty()) throw ValidationError("resynthesize_1q: empty run");
  const int q = run.front().qubits[0];
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (const auto& op : run) {
    if (!is_1q(op) || op.qubits[0] != q)
      throw ValidationError("resynthesize_1q: run must stay on one qubit");
    m = Eigen::Matrix2cd(gate_matrix(op)) * m;
  }

  U3Params p;
  const double a00 = std::abs(m(0, 0)), a10 = std::abs(m(1, 0));
  p.theta = 2.0 * std::atan2(a10, a00);
  if (a10 <= 1e-14) {  // diagonal
    p.phase = std::arg(m(0, 0));
    p.phi = 0.0;
    p.lambda = std::arg(m(1, 1)) - p.phase;
  } else if (a00 <= 1e-14) {  // antidiagonal
    p.phase = 0.0;
    p.phi = std::arg(m(1, 0));
    p.lambda = std::arg(-m(0, 1));
  } else {
    p.phase = std::arg(m(0, 0));
    p.phi = std::arg(m(1, 0)) - p.phase;
    p.lambda = std::arg(-m(0, 1)) - p.phase;
  }
  p.phi = norm_angle(p.phi);
  p.lambda = norm_angle(p.lambda);
  return p;
}

QuantumCircuit decompose_to_basis(const QuantumCircuit& c) {
  std::vector<GateOp> staged;
  for (const auto& op : c.ops) {
    switch (op.kind) {
      case GateKind::CRY: {
        auto seq = decompose_cry(op.params[0], op.qubits[0], op.qubits[1]);
        staged.insert(staged.end(), seq.begin(), seq.end());
        break;
      }
      case GateKind::CCNOT: {
        auto seq = decompose_ccnot(op.qubits[0], op.qubits[1], op.qubits[2]);
        staged.insert(staged.end(), seq.begin(), seq.end());
        break;
      }
      case GateKind::CCRY: {
        auto seq = decompose_ccry(op.params[0], op.qubits[0], op.qubits[1], op.qubits[2]);
        staged.insert(staged.end(), seq.begin(), seq.end());
        break;
      }
      case GateKind::SWAP: {
        staged.push_back(GateOp{GateKind::CNOT, {op.qubits[0], op.qubits[1]}, {}});
        staged.push_back(GateOp{GateKind::CNOT, {op.qubits[1], op.qubits[0]}, {}});
        staged.push_back(GateOp{GateKind::CNOT, {op.qubits[0], op.qubits[1]}, {}});
        break;
      }
      default:
        staged.push_back(op);
        break;
    }
  }
  // second sweep: expand any CRY produced by the CCRY expansion, then rebase.
  // Translation only; even exact-identity rotations survive level 0.
  std::vector<GateOp> out;
  for (const auto& op : staged) {
    if (op.kind == GateKind::CRY) {
      auto seq = decompose_cry(op.params[0], op.qubits[0], op.qubits[1]);
      for (const auto& g : seq)
        if (g.kind == GateKind::CNOT)
          out.push_back(g);
        else
          out.push_back(GateOp{GateKind::U3, g.qubits, {g.params[0], 0.0, 0.0}});
      continue;
    }
    if (op.kind == GateKind::CNOT) {
      out.push_back(op);
      continue;
    }
    switch (op.kind) {
      case GateKind::U1:
      case GateKind::U2:
      case GateKind::U3:
        out.push_back(op);
        break;
      case GateKind::H:
        out.push_back(GateOp{GateKind::U2, op.qubits, {0.0, M_PI}});
        break;
      default: {
        const U3Triple t = as_u3(op);
        if (std::abs(t.theta) <= kExact)
          out.push_back(GateOp{GateKind::U1, op.qubits, {t.phi + t.lambda}});
        else
          out.push_back(GateOp{GateKind::U3, op.qubits, {t.theta, t.phi, t.lambda}});
        break;
      }
    }
  }
  return with_ops(c, std::move(out));
}

QuantumCircuit collapse_adjacent_gates(const QuantumCircuit& c) {
  std::vector<GateOp> ops = c.ops;
  bool changed = true;
  while (changed) {
    changed = false;
    size_t i = 0;
    while (i < ops.size()) {
      const GateOp op = ops[i];
      bool modified = false;
      if (is_1q(op)) {
        const int q = op.qubits[0];
        const size_t j = next_touching(ops, i, {q});
        if (j < ops.size() && is_1q(ops[j])) {
          if (auto merged = merge_closed_form(as_u3(op), as_u3(ops[j]))) {
            auto rep = canonical_1q(q, *merged);
            ops.erase(ops.begin() + static_cast<long>(j));
            if (rep)
              ops[i] = *rep;
            else
              ops.erase(ops.begin() + static_cast<long>(i));
            modified = true;
          } else if (product_is_identity(op, ops[j])) {
            ops.erase(ops.begin() + static_cast<long>(j));
            ops.erase(ops.begin() + static_cast<long>(i));
            modified = true;
          }
        }
      } else if (op.kind == GateKind::CNOT) {
        const size_t j = next_touching(ops, i, {op.qubits[0], op.qubits[1]});
        if (j < ops.size() && ops[j] == op) {
          ops.erase(ops.begin() + static_cast<long>(j));
          ops.erase(ops.begin() + static_cast<long>(i));
          modified = true;
        }
      }
      if (modified) {
        changed = true;
        i = i > 0 ? i - 1 : 0;  // step back; a new neighbor pair may now touch
      } else {
        ++i;
      }
    }
  }
  return with_ops(c, std::move(ops));
}

QuantumCircuit cancel_commuting_cnots(const QuantumCircuit& c) {
  std::vector<GateOp> ops = c.ops;
  size_t i = 0;
  while (i < ops.size()) {
    if (ops[i].kind != GateKind::CNOT) {
      ++i;
      continue;
    }
    const int ctrl = ops[i].qubits[0], tgt = ops[i].qubits[1];
    bool cancelled = false;
    for (size_t j = i + 1; j < ops.size(); ++j) {
      const GateOp& other = ops[j];
      const bool on_c = other.touches(ctrl), on_t = other.touches(tgt);
      if (!on_c && !on_t) continue;
      if (other == ops[i]) {
        ops.erase(ops.begin() + static_cast<long>(j));
        ops.erase(ops.begin() + static_cast<long>(i));
        cancelled = true;
        break;
      }
      bool commutes = false;
      if (on_c && !on_t) {
        if (is_1q(other))
          commutes = diagonal(as_u3(other));  // rule (i)
        else if (other.kind == GateKind::CNOT)
          commutes = other.qubits[0] == ctrl;  // rule (iii): shared control
      } else if (on_t && !on_c) {
        if (is_1q(other))
          commutes = x_like(as_u3(other));  // rule (ii)
        else if (other.kind == GateKind::CNOT)
          commutes = other.qubits[1] == tgt;  // rule (iv): shared target
      }
      if (!commutes) break;
    }
    if (cancelled)
      i = i > 0 ? i - 1 : 0;
    else
      ++i;
  }
  return with_ops(c, std::move(ops));
}

QuantumCircuit resynthesize_single_qubit_runs(const QuantumCircuit& c) {
  std::vector<GateOp> ops = c.ops;
  std::vector<GateOp> out;
  std::vector<char> consumed(ops.size(), 0);
  for (size_t i = 0; i < ops.size(); ++i) {
    if (consumed[i]) continue;
    if (!is_1q(ops[i])) {
      out.push_back(ops[i]);
      continue;
    }
    const int q = ops[i].qubits[0];
    std::vector<GateOp> run{ops[i]};
    consumed[i] = 1;
    for (size_t j = i + 1; j < ops.size(); ++j) {
      if (consumed[j] || !ops[j].touches(q)) continue;
      if (!is_1q(ops[j])) break;
      run.push_back(ops[j]);
      consumed[j] = 1;
    }
    if (run.size() == 1) {
      out.push_back(run.front());
      continue;
    }
    const U3Params p = resynthesize_1q(run);
    if (auto g = canonical_1q(q, U3Triple{p.theta, p.phi, p.lambda})) out.push_back(*g);
  }
  return with_ops(c, std::move(out));
}

QuantumCircuit optimize_gates(const QuantumCircuit& c, OptimizationLevel lvl) {
  QuantumCircuit out = c;
  const int l = static_cast<int>(lvl);
  if (l >= 1) out = collapse_adjacent_gates(out);
  if (l >= 2) out = cancel_commuting_cnots(out);
  if (l >= 3) out = resynthesize_single_qubit_runs(out);
  return out;
}

std::vector<std::string> optimization_pass_names(OptimizationLevel lvl) {
  static const std::vector<std::string> all = {"collapse_adjacent", "commutative_cancel", "resynthesize_1q"};
  return {all.begin(), all.begin() + static_cast<int>(lvl)};
}

namespace {

struct DeviceTables {
  std::vector<std::vector<int>> dist;
  std::vector<std::vector<double>> err;  // min error sum over shortest paths
};

DeviceTables device_tables(const DeviceModel& d) {
  const int n = d.n_qubits;
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
  for (auto [a, b] : d.coupling) {
    const double e = d.cnot_rate(a, b);
    adj[static_cast<size_t>(a)].push_back({b, e});
    adj[static_cast<size_t>(b)].push_back({a, e});
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());

  DeviceTables t;
  t.dist.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), -1));
  t.err.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int src = 0; src < n; ++src) {
    auto& dist = t.dist[static_cast<size_t>(src)];
    auto& err = t.err[static_cast<size_t>(src)];
    dist[static_cast<size_t>(src)] = 0;
    std::vector<int> frontier{src};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int v : frontier)
        for (auto [w, e] : adj[static_cast<size_t>(v)]) {
          const double cand = err[static_cast<size_t>(v)] + e;
          if (dist[static_cast<size_t>(w)] < 0) {
            dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
            err[static_cast<size_t>(w)] = cand;
            next.push_back(w);
          } else if (dist[static_cast<size_t>(w)] == dist[static_cast<size_t>(v)] + 1) {
            err[static_cast<size_t>(w)] = std::min(err[static_cast<size_t>(w)], cand);
          }
        }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      frontier = std::move(next);
    }
  }
  return t;
}

// Cost of executing one CNOT between physical p and q: direct edge error at
// distance 1, otherwise the error of the 3-CNOT SWAP chain along a cheapest
// shortest path.
double pair_cost(const DeviceTables& t, int p, int q) {
  const int d = t.dist[static_cast<size_t>(p)][static_cast<size_t>(q)];
  if (d <= 0) return std::numeric_limits<double>::infinity();
  return (3.0 * (d - 1) + 1.0) * (t.err[static_cast<size_t>(p)][static_cast<size_t>(q)] / d);
}

struct TrafficProfile {
  std::map<std::pair<int, int>, size_t> pairs;
  std::vector<size_t> singles;
};

TrafficProfile traffic(const QuantumCircuit& c) {
  TrafficProfile t;
  t.singles.assign(static_cast<size_t>(c.width), 0);
  for (const auto& op : c.ops) {
    if (op.qubits.size() == 1) {
      ++t.singles[static_cast<size_t>(op.qubits[0])];
    } else {
      const int a = std::min(op.qubits[0], op.qubits[1]);
      const int b = std::max(op.qubits[0], op.qubits[1]);
      ++t.pairs[{a, b}];
    }
  }
  return t;
}

}  // namespace

Layout choose_layout(const QuantumCircuit& c, const DeviceModel& d, OptimizationLevel lvl) {
  const int w = c.width, n = d.n_qubits;
  Layout layout;
  layout.log_to_phys.resize(static_cast<size_t>(w));
  if (static_cast<int>(lvl) < 2) {
    for (int q = 0; q < w; ++q) layout.log_to_phys[static_cast<size_t>(q)] = q;
    return layout;
  }

  const DeviceTables tables = device_tables(d);
  const TrafficProfile prof = traffic(c);

  auto assignment_cost = [&](const std::vector<int>& l2p) {
    double cost = 0.0;
    for (const auto& [pq, t2] : prof.pairs)
      cost += static_cast<double>(t2) *
              pair_cost(tables, l2p[static_cast<size_t>(pq.first)], l2p[static_cast<size_t>(pq.second)]);
    for (int q = 0; q < w; ++q)
      cost += static_cast<double>(prof.singles[static_cast<size_t>(q)]) *
              d.u2_error[static_cast<size_t>(l2p[static_cast<size_t>(q)])];
    return cost;
  };

  double combos = 1.0;
  for (int k = 0; k < w; ++k) combos *= static_cast<double>(n - k);

  std::vector<int> best;
  double best_cost = std::numeric_limits<double>::infinity();

  if (combos <= 600000.0) {
    // exhaustive argmin, lexicographically first on ties
    std::vector<int> cur(static_cast<size_t>(w), -1);
    std::vector<char> used(static_cast<size_t>(n), 0);
    auto rec = [&](auto&& self, int k, double partial) -> void {
      if (partial >= best_cost) return;
      if (k == w) {
        best = cur;
        best_cost = partial;
        return;
      }
      for (int p = 0; p < n; ++p) {
        if (used[static_cast<size_t>(p)]) continue;
        double add = static_cast<double>(prof.singles[static_cast<size_t>(k)]) * d.u2_error[static_cast<size_t>(p)];
        for (const auto& [pq, t2] : prof.pairs) {
          const int other = pq.first == k ? pq.second : (pq.second == k ? pq.first : -1);
          if (other < 0 || other >= k) continue;
          add += static_cast<double>(t2) * pair_cost(tables, cur[static_cast<size_t>(other)], p);
        }
        used[static_cast<size_t>(p)] = 1;
        cur[static_cast<size_t>(k)] = p;
        self(self, k + 1, partial + add);
        used[static_cast<size_t>(p)] = 0;
        cur[static_cast<size_t>(k)] = -1;
      }
    };
    rec(rec, 0, 0.0);
  } else {
    // greedy placement in traffic order, then pairwise improvement
    std::vector<int> order(static_cast<size_t>(w));
    for (int q = 0; q < w; ++q) order[static_cast<size_t>(q)] = q;
    std::vector<size_t> weight(static_cast<size_t>(w), 0);
    for (const auto& [pq, t2] : prof.pairs) {
      weight[static_cast<size_t>(pq.first)] += t2;
      weight[static_cast<size_t>(pq.second)] += t2;
    }
    for (int q = 0; q < w; ++q) weight[static_cast<size_t>(q)] += prof.singles[static_cast<size_t>(q)];
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return weight[static_cast<size_t>(a)] > weight[static_cast<size_t>(b)]; });

    std::vector<int> cur(static_cast<size_t>(w), -1);
    std::vector<char> used(static_cast<size_t>(n), 0);
    for (int lq : order) {
      int best_p = -1;
      double best_add = std::numeric_limits<double>::infinity();
      for (int p = 0; p < n; ++p) {
        if (used[static_cast<size_t>(p)]) continue;
        double add = static_cast<double>(prof.singles[static_cast<size_t>(lq)]) * d.u2_error[static_cast<size_t>(p)];
        for (const auto& [pq, t2] : prof.pairs) {
          const int other = pq.first == lq ? pq.second : (pq.second == lq ? pq.first : -1);
          if (other < 0 || cur[static_cast<size_t>(other)] < 0) continue;
          add += static_cast<double>(t2) * pair_cost(tables, cur[static_cast<size_t>(other)], p);
        }
        if (add < best_add) {
          best_add = add;
          best_p = p;
        }
      }
      cur[static_cast<size_t>(lq)] = best_p;
      used[static_cast<size_t>(best_p)] = 1;
    }
    // first-improvement swaps with unused physicals and between logicals
    bool improved = true;
    int rounds = 0;
    best = cur;
    best_cost = assignment_cost(best);
    while (improved && rounds++ < 100) {
      improved = false;
      for (int a = 0; a < w && !improved; ++a) {
        for (int p = 0; p < n && !improved; ++p) {
          std::vector<int> cand = best;
          auto holder = std::find(cand.begin(), cand.end(), p);
          if (holder != cand.end())
            std::swap(*holder, cand[static_cast<size_t>(a)]);
          else
            cand[static_cast<size_t>(a)] = p;
          const double cc = assignment_cost(cand);
          if (cc + 1e-15 < best_cost) {
            best = cand;
            best_cost = cc;
            improved = true;
          }
        }
      }
    }
  }

  layout.log_to_phys = best;
  return layout;
}

RoutedCircuit route(const QuantumCircuit& c, const DeviceModel& d, const Layout& layout) {
  const int n = d.n_qubits;
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (auto [a, b] : d.coupling) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());

  std::vector<int> l2p = layout.log_to_phys;
  std::vector<int> p2l(static_cast<size_t>(n), -1);
  for (int q = 0; q < c.width; ++q) p2l[static_cast<size_t>(l2p[static_cast<size_t>(q)])] = q;

  auto bfs_dist = [&](int to) {
    std::vector<int> dist(static_cast<size_t>(n), -1);
    std::queue<int> queue;
    dist[static_cast<size_t>(to)] = 0;
    queue.push(to);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop();
      for (int w2 : adj[static_cast<size_t>(v)])
        if (dist[static_cast<size_t>(w2)] < 0) {
          dist[static_cast<size_t>(w2)] = dist[static_cast<size_t>(v)] + 1;
          queue.push(w2);
        }
    }
    return dist;
  };

  RoutedCircuit out;
  std::vector<GateOp> ops;
  auto apply_swap = [&](int pa, int pb) {
    ops.push_back(GateOp{GateKind::CNOT, {pa, pb}, {}});
    ops.push_back(GateOp{GateKind::CNOT, {pb, pa}, {}});
    ops.push_back(GateOp{GateKind::CNOT, {pa, pb}, {}});
    const int la = p2l[static_cast<size_t>(pa)], lb = p2l[static_cast<size_t>(pb)];
    if (la >= 0) l2p[static_cast<size_t>(la)] = pb;
    if (lb >= 0) l2p[static_cast<size_t>(lb)] = pa;
    std::swap(p2l[static_cast<size_t>(pa)], p2l[static_cast<size_t>(pb)]);
    ++out.swaps_inserted;
  };

  for (const auto& op : c.ops) {
    if (op.qubits.size() == 1) {
      ops.push_back(GateOp{op.kind, {l2p[static_cast<size_t>(op.qubits[0])]}, op.params});
      continue;
    }
    if (op.kind != GateKind::CNOT) throw Error("route: expected a basis circuit");
    int pa = l2p[static_cast<size_t>(op.qubits[0])];
    const int pb_log = op.qubits[1];
    while (!d.has_edge(pa, l2p[static_cast<size_t>(pb_log)])) {
      const auto dist = bfs_dist(l2p[static_cast<size_t>(pb_log)]);
      int step = -1;
      for (int nb : adj[static_cast<size_t>(pa)])
        if (step < 0 || dist[static_cast<size_t>(nb)] < dist[static_cast<size_t>(step)]) step = nb;
      apply_swap(pa, step);
      pa = step;
    }
    ops.push_back(GateOp{GateKind::CNOT, {pa, l2p[static_cast<size_t>(pb_log)]}, {}});
  }

  CircuitBuilder b(n);
  for (int p = 0; p < n; ++p) b.set_ancilla(p);
  for (int q = 0; q < c.width; ++q) {
    const auto role = c.roles[static_cast<size_t>(q)];
    if (role.has_value()) b.set_node(l2p[static_cast<size_t>(q)], *role);
  }
  for (auto& op : ops) b.gate(op.kind, op.qubits, op.params);
  for (int q : c.measured) b.measure(l2p[static_cast<size_t>(q)]);
  out.circuit = b.build();
  out.final_permutation = l2p;
  return out;
}

TranspileResult transpile(const QuantumCircuit& c, const DeviceModel& d, OptimizationLevel lvl, uint64_t seed) {
  (void)seed;  // no pass is stochastic; accepted so callers can pin one anyway
  if (c.width > d.n_qubits)
    throw ValidationError("circuit width " + std::to_string(c.width) + " exceeds device '" + d.name + "' (" +
                          std::to_string(d.n_qubits) + " qubits)");

  TranspileResult r;
  r.logical_width = c.width;
  r.metrics.input_ops = c.ops.size();

  QuantumCircuit basis = decompose_to_basis(c);
  QuantumCircuit optimized = optimize_gates(basis, lvl);
  r.layout = choose_layout(optimized, d, lvl);
  RoutedCircuit routed = route(optimized, d, r.layout);
  r.final_permutation = routed.final_permutation;
  r.metrics.swaps_inserted = routed.swaps_inserted;
  r.circuit = optimize_gates(routed.circuit, lvl);

  r.metrics.output_ops = r.circuit.ops.size();
  for (const auto& op : r.circuit.ops) {
    if (op.kind == GateKind::CNOT) {
      ++r.metrics.output_cnots;
      r.metrics.estimated_success *= 1.0 - d.cnot_rate(op.qubits[0], op.qubits[1]);
    } else {
      r.metrics.estimated_success *= 1.0 - d.u2_error[static_cast<size_t>(op.qubits[0])];
    }
  }
  return r;
}

Eigen::MatrixXcd effective_unitary(const TranspileResult& r, int max_touched) {
  const int w = r.logical_width;
  std::set<int> touched_set;
  for (const auto& op : r.circuit.ops) touched_set.insert(op.qubits.begin(), op.qubits.end());
  for (int q = 0; q < w; ++q) {
    touched_set.insert(r.layout.log_to_phys[static_cast<size_t>(q)]);
    touched_set.insert(r.final_permutation[static_cast<size_t>(q)]);
  }
  std::vector<int> touched(touched_set.begin(), touched_set.end());
  const int m = static_cast<int>(touched.size());
  if (m > max_touched)
    throw Error("effective_unitary: circuit touches " + std::to_string(m) + " qubits, cap is " +
                std::to_string(max_touched));
  std::vector<int> comp(r.circuit.width, -1);
  for (int k = 0; k < m; ++k) comp[static_cast<size_t>(touched[static_cast<size_t>(k)])] = k;

  std::vector<GateOp> compact_ops = r.circuit.ops;
  for (auto& op : compact_ops)
    for (int& q : op.qubits) q = comp[static_cast<size_t>(q)];

  const size_t ldim = size_t{1} << w;
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(ldim), static_cast<Eigen::Index>(ldim));
  Statevector sv;
  sv.width = m;
  for (size_t j = 0; j < ldim; ++j) {
    sv.amps.assign(size_t{1} << m, cd{});
    size_t start = 0;
    for (int k = 0; k < w; ++k)
      if ((j >> k) & 1u) start |= size_t{1} << comp[static_cast<size_t>(r.layout.log_to_phys[static_cast<size_t>(k)])];
    sv.amps[start] = cd(1.0, 0.0);
    for (const auto& op : compact_ops) apply_gate(sv, op, Engine::Serial);
    for (size_t out = 0; out < ldim; ++out) {
      size_t idx = 0;
      for (int k = 0; k < w; ++k)
        if ((out >> k) & 1u)
          idx |= size_t{1} << comp[static_cast<size_t>(r.final_permutation[static_cast<size_t>(k)])];
      u(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(j)) = sv.amps[idx];
    }
  }
  return u;
}

}  // namespace qbn
