// Copyright 2026 The qvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qvrp/simulator.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "qvrp/rng.h"

namespace qvrp {
namespace {

constexpr int kMaxQubits = 30;

std::size_t bit(int q) { return std::size_t{1} << q; }

// Visits every pair (i0, i1) of indices that differ only in qubit q, i0 with the bit clear.
template <typename F>
void for_each_pair(std::size_t dim, int q, F&& f) {
  const std::size_t stride = bit(q);
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) f(i, i + stride);
  }
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_le(std::istream& in, int bytes) {
  unsigned char b[8] = {};
  if (!in.read(reinterpret_cast<char*>(b), bytes)) throw SimulatorError("truncated statevector dump");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw SimulatorError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
  amps_.assign(bit(n_qubits), Amplitude{});
  amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > kMaxQubits || amps_.size() != bit(n_qubits)) {
    throw SimulatorError("amplitude count does not match qubit count");
  }
}

void StateVector::reset() {
  std::fill(amps_.begin(), amps_.end(), Amplitude{});
  amps_[0] = 1.0;
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= n_qubits_) throw SimulatorError("qubit " + std::to_string(q) + " out of range");
}

void StateVector::apply_h(int q) {
  check_qubit(q);
  constexpr double s = std::numbers::sqrt2 / 2;
  for_each_pair(amps_.size(), q, [&](std::size_t i0, std::size_t i1) {
    const Amplitude a = amps_[i0], b = amps_[i1];
    amps_[i0] = s * (a + b);
    amps_[i1] = s * (a - b);
  });
}

void StateVector::apply_x(int q) {
  check_qubit(q);
  for_each_pair(amps_.size(), q, [&](std::size_t i0, std::size_t i1) { std::swap(amps_[i0], amps_[i1]); });
}

void StateVector::apply_ry(int q, double theta) {
  check_qubit(q);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  for_each_pair(amps_.size(), q, [&](std::size_t i0, std::size_t i1) {
    const Amplitude a = amps_[i0], b = amps_[i1];
    amps_[i0] = c * a - s * b;
    amps_[i1] = s * a + c * b;
  });
}

void StateVector::apply_cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw SimulatorError("CNOT control and target must differ");
  const std::size_t cmask = bit(control);
  for_each_pair(amps_.size(), target, [&](std::size_t i0, std::size_t i1) {
    if (i0 & cmask) std::swap(amps_[i0], amps_[i1]);
  });
}

double StateVector::norm_squared() const noexcept {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return total;
}

void StateVector::write_binary(std::ostream& out) const {
  put_u32(out, static_cast<std::uint32_t>(n_qubits_));
  for (const auto& a : amps_) {
    put_f64(out, a.real());
    put_f64(out, a.imag());
  }
}

StateVector StateVector::read_binary(std::istream& in) {
  const auto n = static_cast<int>(get_le(in, 4));
  if (n < 1 || n > kMaxQubits) throw SimulatorError("bad qubit count in statevector dump");
  std::vector<Amplitude> amps(bit(n));
  for (auto& a : amps) {
    const double re = std::bit_cast<double>(get_le(in, 8));
    const double im = std::bit_cast<double>(get_le(in, 8));
    a = {re, im};
  }
  return StateVector(n, std::move(amps));
}

std::vector<Gate> AnsatzSpec::gates() const {
  std::vector<Gate> out;
  out.reserve(static_cast<std::size_t>(qubits + layers * (qubits + static_cast<int>(entangler.size()))));
  for (int q = 0; q < qubits; ++q) out.push_back({GateKind::kH, q});
  for (int layer = 0; layer < layers; ++layer) {
    for (const auto& [c, t] : entangler) out.push_back({GateKind::kCnot, c, t});
    for (int q = 0; q < qubits; ++q) out.push_back({GateKind::kRy, q, -1, layer * qubits + q});
  }
  return out;
}

AnsatzSpec build_ansatz(int qubits, int layers) {
  if (qubits < 1 || layers < 1) throw SimulatorError("ansatz needs at least one qubit and one layer");
  AnsatzSpec spec{qubits, layers, {}};
  for (int q = 0; q + 1 < qubits; ++q) spec.entangler.emplace_back(q, q + 1);
  return spec;
}

void apply_gate(StateVector& state, const Gate& gate, std::span<const double> theta) {
  switch (gate.kind) {
    case GateKind::kH:
      state.apply_h(gate.qubit);
      break;
    case GateKind::kX:
      state.apply_x(gate.qubit);
      break;
    case GateKind::kRy:
      state.apply_ry(gate.qubit, theta[static_cast<std::size_t>(gate.parameter)]);
      break;
    case GateKind::kCnot:
      state.apply_cnot(gate.qubit, gate.target);
      break;
  }
}

void run_statevector(const AnsatzSpec& spec, std::span<const double> theta, StateVector& state) {
  if (theta.size() != static_cast<std::size_t>(spec.parameter_count())) {
    throw SimulatorError("expected " + std::to_string(spec.parameter_count()) + " parameters, got " +
                         std::to_string(theta.size()));
  }
  if (state.qubits() != spec.qubits) {
    state = StateVector(spec.qubits);
  } else {
    state.reset();
  }
  for (const Gate& g : spec.gates()) apply_gate(state, g, theta);
}

StateVector run_statevector(const AnsatzSpec& spec, std::span<const double> theta) {
  StateVector state(spec.qubits);
  run_statevector(spec, theta, state);
  return state;
}

std::vector<double> basis_probabilities(const StateVector& state) {
  std::vector<double> p(state.dimension());
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amps[i]);
  return p;
}

ShotCounts sample_distribution(std::span<const double> probabilities, int qubits, std::uint64_t n_shots,
                               Rng& rng) {
  if (n_shots == 0) throw SimulatorError("shot count must be positive");
  std::vector<double> cdf(probabilities.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = acc += probabilities[i];
  if (!(acc > 0.0)) throw SimulatorError("distribution has zero mass");

  std::vector<std::uint64_t> tally(cdf.size(), 0);
  for (std::uint64_t s = 0; s < n_shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Skip zero-probability tail entries that share the final cdf value.
    if (it == cdf.end()) it = std::lower_bound(cdf.begin(), cdf.end(), acc);
    ++tally[static_cast<std::size_t>(it - cdf.begin())];
  }
  ShotCounts out;
  out.qubits = qubits;
  out.total = n_shots;
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (tally[i]) out.counts.emplace_hint(out.counts.end(), i, tally[i]);
  }
  return out;
}

ShotCounts sample(const StateVector& state, std::uint64_t n_shots, std::uint64_t seed) {
  Rng rng(seed);
  const auto p = basis_probabilities(state);
  return sample_distribution(p, state.qubits(), n_shots, rng);
}

}  // namespace qvrp
