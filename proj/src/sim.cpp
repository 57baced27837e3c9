// SPDX-License-Identifier: Apache-2.0
#include "qbn/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "qbn/rng.hpp"

namespace qbn {

namespace kernels {

std::array<cd, 4> base_1q(GateKind kind, const std::vector<double>& params) {
  const cd i(0.0, 1.0);
  auto u3 = [](double theta, double phi, double lambda) -> std::array<cd, 4> {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {cd(c, 0.0), -std::exp(cd(0.0, lambda)) * s, std::exp(cd(0.0, phi)) * s,
            std::exp(cd(0.0, phi + lambda)) * c};
  };
  switch (kind) {
    case GateKind::X:
    case GateKind::CNOT:
    case GateKind::CCNOT:
      return {cd(0), cd(1), cd(1), cd(0)};
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return {cd(r), cd(r), cd(r), cd(-r)};
    }
    case GateKind::S:
      return {cd(1), cd(0), cd(0), i};
    case GateKind::T:
      return {cd(1), cd(0), cd(0), std::exp(i * (M_PI / 4.0))};
    case GateKind::Tdg:
      return {cd(1), cd(0), cd(0), std::exp(-i * (M_PI / 4.0))};
    case GateKind::U1:
      return {cd(1), cd(0), cd(0), std::exp(i * params[0])};
    case GateKind::U2:
      return u3(M_PI / 2.0, params[0], params[1]);
    case GateKind::U3:
      return u3(params[0], params[1], params[2]);
    case GateKind::RY:
    case GateKind::CRY:
    case GateKind::CCRY:
      return u3(params[0], 0.0, 0.0);
    case GateKind::SWAP:
      break;
  }
  throw Error("base_1q: gate has no single-qubit block");
}

void apply_controlled_1q_serial(cd* state, int width, uint64_t ctrl_mask, int target,
                                const std::array<cd, 4>& u) {
  const uint64_t dim = uint64_t{1} << width;
  const uint64_t tmask = uint64_t{1} << target;
  for (uint64_t i = 0; i < dim; ++i) {
    if ((i & tmask) != 0 || (i & ctrl_mask) != ctrl_mask) continue;
    const uint64_t j = i | tmask;
    const cd a0 = state[i], a1 = state[j];
    state[i] = u[0] * a0 + u[1] * a1;
    state[j] = u[2] * a0 + u[3] * a1;
  }
}

void apply_controlled_1q_omp(cd* state, int width, uint64_t ctrl_mask, int target, const std::array<cd, 4>& u) {
  const int64_t dim = int64_t{1} << width;
  const uint64_t tmask = uint64_t{1} << target;
#pragma omp parallel for schedule(static)
  for (int64_t ii = 0; ii < dim; ++ii) {
    const uint64_t i = static_cast<uint64_t>(ii);
    if ((i & tmask) != 0 || (i & ctrl_mask) != ctrl_mask) continue;
    const uint64_t j = i | tmask;
    const cd a0 = state[i], a1 = state[j];
    state[i] = u[0] * a0 + u[1] * a1;
    state[j] = u[2] * a0 + u[3] * a1;
  }
}

void apply_swap_serial(cd* state, int width, int a, int b) {
  const uint64_t dim = uint64_t{1} << width;
  const uint64_t am = uint64_t{1} << a, bm = uint64_t{1} << b;
  for (uint64_t i = 0; i < dim; ++i)
    if ((i & am) && !(i & bm)) std::swap(state[i], state[(i ^ am) | bm]);
}

void apply_swap_omp(cd* state, int width, int a, int b) {
  const int64_t dim = int64_t{1} << width;
  const uint64_t am = uint64_t{1} << a, bm = uint64_t{1} << b;
#pragma omp parallel for schedule(static)
  for (int64_t ii = 0; ii < dim; ++ii) {
    const uint64_t i = static_cast<uint64_t>(ii);
    if ((i & am) && !(i & bm)) std::swap(state[i], state[(i ^ am) | bm]);
  }
}

}  // namespace kernels

namespace {

bool use_parallel(Engine e, int width) {
  switch (e) {
    case Engine::Serial:
      return false;
    case Engine::Parallel:
      return true;
    case Engine::Auto:
#ifdef _OPENMP
      return width >= 14;
#else
      return false;
#endif
  }
  return false;
}

}  // namespace

void apply_gate(Statevector& sv, const GateOp& op, Engine engine) {
  const bool par = use_parallel(engine, sv.width);
  if (op.kind == GateKind::SWAP) {
    if (par)
      kernels::apply_swap_omp(sv.amps.data(), sv.width, op.qubits[0], op.qubits[1]);
    else
      kernels::apply_swap_serial(sv.amps.data(), sv.width, op.qubits[0], op.qubits[1]);
    return;
  }
  uint64_t ctrl_mask = 0;
  for (size_t k = 0; k + 1 < op.qubits.size(); ++k) ctrl_mask |= uint64_t{1} << op.qubits[k];
  const int target = op.qubits.back();
  const auto u = kernels::base_1q(op.kind, op.params);
  if (par)
    kernels::apply_controlled_1q_omp(sv.amps.data(), sv.width, ctrl_mask, target, u);
  else
    kernels::apply_controlled_1q_serial(sv.amps.data(), sv.width, ctrl_mask, target, u);
}

Statevector evolve(const QuantumCircuit& c, const EvolveOptions& opts) {
  if (c.width > opts.max_width)
    throw Error("circuit width " + std::to_string(c.width) + " exceeds simulator cap " +
                std::to_string(opts.max_width));
  Statevector sv;
  sv.width = c.width;
  sv.amps.assign(uint64_t{1} << c.width, cd{});
  sv.amps[0] = cd(1.0, 0.0);
  for (const auto& op : c.ops) {
    apply_gate(sv, op, opts.engine);
    if (opts.check_norm) {
      double n = 0.0;
      for (const cd& a : sv.amps) n += std::norm(a);
      if (std::abs(n - 1.0) > 1e-9)
        throw Error(std::string("norm drifted to ") + std::to_string(n) + " after gate " + gate_name(op.kind));
    }
  }
  return sv;
}

namespace {

std::string pattern_key(uint64_t pattern, size_t n_bits) {
  std::string s(n_bits, '0');
  for (size_t j = 0; j < n_bits; ++j)
    if ((pattern >> j) & 1u) s[n_bits - 1 - j] = '1';
  return s;
}

}  // namespace

ShotCounts sample(const Statevector& sv, const std::vector<int>& measured, uint64_t shots, uint64_t seed) {
  if (shots < 1) throw ValidationError("sample: shots must be >= 1");
  if (measured.empty()) throw ValidationError("sample: no measured qubits");
  std::vector<int> meas = measured;
  std::sort(meas.begin(), meas.end());
  for (int q : meas)
    if (q < 0 || q >= sv.width) throw ValidationError("sample: measured qubit out of range");

  const size_t m = meas.size();
  std::vector<double> probs(size_t{1} << m, 0.0);
  for (size_t i = 0; i < sv.amps.size(); ++i) {
    uint64_t pattern = 0;
    for (size_t j = 0; j < m; ++j) pattern |= ((i >> meas[j]) & 1u) << j;
    probs[pattern] += std::norm(sv.amps[i]);
  }
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    cdf[k] = acc;
  }

  std::vector<uint64_t> tally(probs.size(), 0);
  Rng rng(seed);
  for (uint64_t s = 0; s < shots; ++s) {
    const double u = rng.next_double() * acc;
    const size_t idx = static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    ++tally[std::min(idx, tally.size() - 1)];
  }

  ShotCounts out;
  out.shots = shots;
  out.bit_qubits = meas;
  for (size_t k = 0; k < tally.size(); ++k)
    if (tally[k]) out.counts[pattern_key(k, m)] = tally[k];
  return out;
}

NoiseSpec NoiseSpec::from_device(const DeviceModel& d) {
  NoiseSpec n;
  n.u2_rate = d.u2_error;
  n.readout_rate = d.readout_error;
  n.cnot_rate = d.cnot_error;
  return n;
}

namespace {

// Pauli codes: 1 = X, 2 = Y, 3 = Z.
void apply_pauli(std::vector<cd>& state, int q, int code) {
  const uint64_t mask = uint64_t{1} << q;
  const cd i(0.0, 1.0);
  switch (code) {
    case 1:
      for (uint64_t k = 0; k < state.size(); ++k)
        if (!(k & mask)) std::swap(state[k], state[k | mask]);
      break;
    case 2:
      for (uint64_t k = 0; k < state.size(); ++k)
        if (!(k & mask)) {
          const cd a0 = state[k], a1 = state[k | mask];
          state[k] = -i * a1;
          state[k | mask] = i * a0;
        }
      break;
    case 3:
      for (uint64_t k = 0; k < state.size(); ++k)
        if (k & mask) state[k] = -state[k];
      break;
    default:
      break;
  }
}

// floor(log(1-u) / log(1-p)): number of Bernoulli(p) failures before the
// next success, inverted from one uniform draw.
uint64_t geometric_skips(double u, double p) {
  if (p >= 1.0) return 0;
  const double up = 1.0 - u;  // in (0, 1]
  const double g = std::floor(std::log(up) / std::log1p(-p));
  if (!(g >= 0.0)) return 0;
  if (g > 1e18) return static_cast<uint64_t>(1e18);
  return static_cast<uint64_t>(g);
}

struct CompiledOp {
  uint64_t ctrl_mask = 0;  // compact-index control mask (0 for 1q gates)
  int target = 0;          // compact target index
  int ctrl = -1;           // compact control index (CNOT only)
  std::array<cd, 4> u;
  double rate = 0.0;
  bool is_cnot = false;
};

}  // namespace

ShotCounts run_noisy_range(const QuantumCircuit& c, const DeviceModel& d, uint64_t first_shot, uint64_t n_shots,
                           uint64_t seed) {
  if (n_shots < 1) throw ValidationError("run_noisy: shots must be >= 1");
  if (c.width > d.n_qubits)
    throw ValidationError("circuit width " + std::to_string(c.width) + " exceeds device " + d.name);
  if (c.measured.empty()) throw ValidationError("run_noisy: circuit measures no qubits");
  for (const auto& op : c.ops) {
    const bool basis = op.kind == GateKind::U1 || op.kind == GateKind::U2 || op.kind == GateKind::U3 ||
                       op.kind == GateKind::CNOT;
    if (!basis)
      throw ValidationError(std::string("run_noisy: gate '") + gate_name(op.kind) + "' outside device basis");
    if (op.kind == GateKind::CNOT && !d.has_edge(op.qubits[0], op.qubits[1]))
      throw ValidationError("run_noisy: cx on non-edge " + std::to_string(op.qubits[0]) + "-" +
                            std::to_string(op.qubits[1]));
  }
  const NoiseSpec noise = NoiseSpec::from_device(d);

  // The circuit typically touches a small corner of the device; simulate
  // only those qubits.
  std::set<int> touched_set(c.measured.begin(), c.measured.end());
  for (const auto& op : c.ops) touched_set.insert(op.qubits.begin(), op.qubits.end());
  std::vector<int> touched(touched_set.begin(), touched_set.end());
  const int m = static_cast<int>(touched.size());
  if (m > 24) throw Error("run_noisy: circuit touches " + std::to_string(m) + " qubits, cap is 24");
  std::vector<int> comp(static_cast<size_t>(d.n_qubits), -1);
  for (int k = 0; k < m; ++k) comp[static_cast<size_t>(touched[static_cast<size_t>(k)])] = k;

  std::vector<CompiledOp> ops;
  ops.reserve(c.ops.size());
  double p_max = 0.0;
  for (const auto& op : c.ops) {
    CompiledOp co;
    co.u = kernels::base_1q(op.kind, op.params);
    if (op.kind == GateKind::CNOT) {
      co.is_cnot = true;
      co.ctrl = comp[static_cast<size_t>(op.qubits[0])];
      co.ctrl_mask = uint64_t{1} << co.ctrl;
      co.target = comp[static_cast<size_t>(op.qubits[1])];
      co.rate = noise.cnot_rate.at(op.qubits[0] < op.qubits[1]
                                       ? std::make_pair(op.qubits[0], op.qubits[1])
                                       : std::make_pair(op.qubits[1], op.qubits[0]));
    } else {
      co.target = comp[static_cast<size_t>(op.qubits[0])];
      co.rate = noise.u2_rate[static_cast<size_t>(op.qubits[0])];
    }
    p_max = std::max(p_max, co.rate);
    ops.push_back(co);
  }
  const size_t n_ops = ops.size();

  // Noiseless prefix states: prefix[k] is the state after the first k ops.
  // A shot whose first error lands after op k resumes from prefix[k+1].
  const uint64_t dim = uint64_t{1} << m;
  std::vector<std::vector<cd>> prefix(n_ops + 1);
  prefix[0].assign(dim, cd{});
  prefix[0][0] = cd(1.0, 0.0);
  for (size_t k = 0; k < n_ops; ++k) {
    prefix[k + 1] = prefix[k];
    kernels::apply_controlled_1q_serial(prefix[k + 1].data(), m, ops[k].ctrl_mask, ops[k].target, ops[k].u);
  }

  std::vector<int> meas_bits;  // compact index per output bit
  for (int q : c.measured) meas_bits.push_back(comp[static_cast<size_t>(q)]);
  const size_t mm = meas_bits.size();

  // Measured-pattern distribution of the noiseless final state.
  std::vector<double> cdf(size_t{1} << mm, 0.0);
  {
    const auto& fin = prefix[n_ops];
    for (uint64_t i = 0; i < dim; ++i) {
      uint64_t pattern = 0;
      for (size_t j = 0; j < mm; ++j) pattern |= ((i >> meas_bits[j]) & 1u) << j;
      cdf[pattern] += std::norm(fin[i]);
    }
    double acc = 0.0;
    for (double& v : cdf) {
      acc += v;
      v = acc;
    }
  }

  std::vector<uint64_t> tally(size_t{1} << mm, 0);
  const int64_t n = static_cast<int64_t>(n_shots);
#pragma omp parallel
  {
    std::vector<uint64_t> local(tally.size(), 0);
    std::vector<cd> work;
#pragma omp for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
      Rng rng(fnv1a64_u64(first_shot + static_cast<uint64_t>(i), fnv1a64_u64(seed)));

      // Error locations by thinning: skip with the max rate, accept with
      // rate/p_max. One Bernoulli per op, compressed into geometric jumps.
      bool any_error = false;
      uint64_t pattern = 0;
      size_t resume = 0;
      if (p_max > 0.0) {
        size_t pos = 0;
        uint64_t skips = geometric_skips(rng.next_double(), p_max);
        while (pos + skips < n_ops) {
          pos += skips;
          const CompiledOp& op = ops[pos];
          if (rng.next_double() * p_max < op.rate) {
            const uint64_t code = rng.next_below(op.is_cnot ? 15 : 3) + 1;
            if (!any_error) {
              any_error = true;
              work = prefix[pos + 1];
              resume = pos + 1;
            } else {
              for (size_t k = resume; k <= pos; ++k)
                kernels::apply_controlled_1q_serial(work.data(), m, ops[k].ctrl_mask, ops[k].target, ops[k].u);
              resume = pos + 1;
            }
            if (op.is_cnot) {
              const int pa = static_cast<int>(code >> 2), pb = static_cast<int>(code & 3);
              if (pa) apply_pauli(work, op.ctrl, pa);
              if (pb) apply_pauli(work, op.target, pb);
            } else {
              apply_pauli(work, op.target, static_cast<int>(code));
            }
          }
          ++pos;
          skips = geometric_skips(rng.next_double(), p_max);
        }
      }

      if (!any_error) {
        const double u = rng.next_double() * cdf.back();
        pattern = static_cast<uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        pattern = std::min<uint64_t>(pattern, cdf.size() - 1);
      } else {
        for (size_t k = resume; k < n_ops; ++k)
          kernels::apply_controlled_1q_serial(work.data(), m, ops[k].ctrl_mask, ops[k].target, ops[k].u);
        double total = 0.0;
        for (const cd& a : work) total += std::norm(a);
        const double u = rng.next_double() * total;
        double acc = 0.0;
        uint64_t hit = dim - 1;
        for (uint64_t k = 0; k < dim; ++k) {
          acc += std::norm(work[k]);
          if (acc >= u) {
            hit = k;
            break;
          }
        }
        for (size_t j = 0; j < mm; ++j) pattern |= ((hit >> meas_bits[j]) & 1u) << j;
      }

      for (size_t j = 0; j < mm; ++j) {
        const double u = rng.next_double();
        if (u < noise.readout_rate[static_cast<size_t>(c.measured[j])]) pattern ^= uint64_t{1} << j;
      }
      ++local[pattern];
    }
#pragma omp critical
    for (size_t k = 0; k < tally.size(); ++k) tally[k] += local[k];
  }

  ShotCounts out;
  out.shots = n_shots;
  out.bit_qubits = c.measured;
  for (size_t k = 0; k < tally.size(); ++k)
    if (tally[k]) out.counts[pattern_key(k, mm)] = tally[k];
  return out;
}

ShotCounts run_noisy(const QuantumCircuit& c, const DeviceModel& d, uint64_t shots, uint64_t seed) {
  return run_noisy_range(c, d, 0, shots, seed);
}

std::string counts_to_json(const ShotCounts& counts, const std::map<std::string, std::string>& metadata) {
  nlohmann::json doc;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  meta["shots"] = counts.shots;
  doc["metadata"] = meta;
  nlohmann::json jc = nlohmann::json::object();
  for (const auto& [bits, n] : counts.counts) jc[bits] = n;
  doc["counts"] = jc;
  return doc.dump(2) + "\n";
}

}  // namespace qbn
