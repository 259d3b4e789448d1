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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qvrp {

class Rng;

using Amplitude = std::complex<double>;

class SimulatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense state of n_q qubits.
///
/// Bit order: qubit q is bit q of the basis index, so qubit 0 is the least
/// significant bit. A ket |b_{n-1} ... b_1 b_0> has index sum_q b_q 2^q.
class StateVector {
 public:
  /// |0...0> on n_qubits qubits (at most 30).
  explicit StateVector(int n_qubits);
  StateVector(int n_qubits, std::vector<Amplitude> amplitudes);

  int qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  Amplitude operator[](std::size_t index) const { return amps_[index]; }

  /// Back to |0...0>.
  void reset();

  void apply_h(int q);
  void apply_x(int q);
  /// [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
  void apply_ry(int q, double theta);
  void apply_cnot(int control, int target);

  double norm_squared() const noexcept;

  /// Binary dump: little-endian u32 n_q, then interleaved f64 (re, im).
  void write_binary(std::ostream& out) const;
  static StateVector read_binary(std::istream& in);

 private:
  void check_qubit(int q) const;

  int n_qubits_;
  std::vector<Amplitude> amps_;
};

enum class GateKind { kH, kX, kRy, kCnot };

struct Gate {
  GateKind kind;
  int qubit = 0;
  /// Target qubit for CNOT (qubit is the control).
  int target = -1;
  /// Index into the parameter vector for RY, -1 otherwise.
  int parameter = -1;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Hardware-efficient ansatz: H on every qubit, then `layers` blocks of
/// [entangling CNOTs, RY on every qubit].
struct AnsatzSpec {
  int qubits = 1;
  int layers = 1;
  /// CNOT (control, target) pairs applied at the start of every layer.
  std::vector<std::pair<int, int>> entangler;

  int parameter_count() const noexcept { return qubits * layers; }
  /// Flattened gate list in application order. RY parameter index is
  /// layer * qubits + qubit.
  std::vector<Gate> gates() const;
};

/// Linear CNOT chain q0->q1, ..., q_{n-2}->q_{n-1}.
AnsatzSpec build_ansatz(int qubits, int layers);

void apply_gate(StateVector& state, const Gate& gate, std::span<const double> theta);

/// Runs the circuit from |0...0>. Throws SimulatorError on a parameter count mismatch.
StateVector run_statevector(const AnsatzSpec& spec, std::span<const double> theta);
/// Reuses `state`'s storage.
void run_statevector(const AnsatzSpec& spec, std::span<const double> theta, StateVector& state);

std::vector<double> basis_probabilities(const StateVector& state);

struct ShotCounts {
  int qubits = 0;
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(std::uint64_t index) const {
    auto it = counts.find(index);
    return it == counts.end() ? 0 : it->second;
  }
};

/// n_shots draws from the given distribution by inverse CDF.
ShotCounts sample_distribution(std::span<const double> probabilities, int qubits,
                               std::uint64_t n_shots, Rng& rng);

ShotCounts sample(const StateVector& state, std::uint64_t n_shots, std::uint64_t seed);

}  // namespace qvrp
