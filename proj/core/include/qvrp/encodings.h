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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qvrp/qubo.h"
#include "qvrp/simulator.h"

namespace qvrp {

enum class Encoding { kMinimal, kFull };

std::string_view to_string(Encoding e) noexcept;
/// Accepts "minimal" or "full"; throws std::invalid_argument otherwise.
Encoding parse_encoding(std::string_view name);

/// Qubits needed for n_c variables: 1 + ceil(log2 n_c) for the minimal
/// encoding, n_c for the full one.
int qubits_required(std::size_t n_c, Encoding encoding);

/// One ancilla (the highest qubit) plus ceil(log2 n_c) register qubits.
/// Register basis index k addresses variable k; indices >= n_c are unassigned.
struct MinimalLayout {
  std::size_t variables = 1;
  int register_qubits = 0;
  int qubits = 1;
  int ancilla = 0;

  explicit MinimalLayout(std::size_t n_c);

  std::size_t register_of(std::uint64_t basis_index) const noexcept {
    return static_cast<std::size_t>(basis_index & ((std::uint64_t{1} << register_qubits) - 1));
  }
  bool ancilla_set(std::uint64_t basis_index) const noexcept {
    return ((basis_index >> ancilla) & 1U) != 0;
  }
};

struct FullLayout {
  std::size_t variables = 1;
  int qubits = 1;

  explicit FullLayout(std::size_t n_c) : variables(n_c), qubits(static_cast<int>(n_c)) {}
};

/// Per-variable projector estimates for the minimal encoding.
///
/// `total[k]` is the weight observed on register k (any ancilla), `ones[k]` the
/// part with the ancilla set. For shot data these are counts and `samples` is
/// the shot total; for exact data they are probabilities and `samples` is 1.
/// Expectations are total[k] / samples and ones[k] / samples.
struct RegisterStats {
  enum class Source { kShots, kExact };

  std::vector<double> total;
  std::vector<double> ones;
  std::vector<double> p;
  std::vector<std::uint8_t> fallback;
  double discarded = 0.0;
  double samples = 1.0;
  Source source = Source::kExact;

  std::size_t size() const noexcept { return p.size(); }
  std::size_t fallback_count() const noexcept;
};

/// Marginal assigned to variables whose register was never observed.
inline constexpr double kFallbackMarginal = 0.5;
/// Exact register weight below which a variable is treated as unobserved.
inline constexpr double kExactFallbackThreshold = 1e-12;

RegisterStats register_stats_from_counts(const ShotCounts& counts, const MinimalLayout& layout);
RegisterStats register_stats_exact(const StateVector& state, const MinimalLayout& layout);
RegisterStats register_stats_from_probabilities(std::span<const double> probabilities,
                                                const MinimalLayout& layout);

/// sum_{k != l} A_kl p_k p_l + sum_k A_kk p_k, offset excluded.
double minimal_cost(const QuboProblem& qubo, std::span<const double> p);
double minimal_cost(const QuboProblem& qubo, const RegisterStats& stats);

/// dC/dp_k = 2 sum_{l != k} A_kl p_l + A_kk.
std::vector<double> minimal_cost_partials(const QuboProblem& qubo, std::span<const double> p);

/// Independent draws with P(x_k = 1) = p_k.
std::vector<Bitstring> sample_minimal_solutions(const RegisterStats& stats, std::size_t n_samples,
                                                std::uint64_t seed);

/// Mean of x^T A x over the shot record (offset excluded). Basis index bit k is x_k.
double full_cost(const QuboProblem& qubo, const ShotCounts& counts);

/// x^T A x for every basis index (offset excluded), for repeated exact evaluation.
std::vector<double> full_energy_table(const QuboProblem& qubo);
/// Expectation of x^T A x under exact basis probabilities.
double full_cost_exact(std::span<const double> energy_table, std::span<const double> probabilities);

std::vector<std::pair<Bitstring, std::uint64_t>> full_solutions_from_counts(const ShotCounts& counts);

/// Text rows `k total ones p fallback`, then `discarded <tally>`.
std::string write_register_stats(const RegisterStats& stats);

}  // namespace qvrp
