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

#include "qvrp/encodings.h"

#include <bit>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "qvrp/rng.h"

namespace qvrp {
namespace {

int ceil_log2(std::size_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

void finish_marginals(RegisterStats& stats, double threshold) {
  const std::size_t n = stats.total.size();
  stats.p.assign(n, kFallbackMarginal);
  stats.fallback.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (stats.total[k] <= threshold) {
      stats.fallback[k] = 1;
    } else {
      stats.p[k] = stats.ones[k] / stats.total[k];
    }
  }
}

void require_variables(const QuboProblem& qubo, std::size_t n) {
  if (n != qubo.size()) {
    throw QuboError(QuboError::Kind::kLengthMismatch,
                    "expected " + std::to_string(qubo.size()) + " marginals, got " + std::to_string(n));
  }
}

}  // namespace

std::string_view to_string(Encoding e) noexcept { return e == Encoding::kMinimal ? "minimal" : "full"; }

Encoding parse_encoding(std::string_view name) {
  if (name == "minimal") return Encoding::kMinimal;
  if (name == "full") return Encoding::kFull;
  throw std::invalid_argument("unknown encoding '" + std::string(name) + "'");
}

int qubits_required(std::size_t n_c, Encoding encoding) {
  if (n_c == 0) throw std::invalid_argument("need at least one variable");
  return encoding == Encoding::kMinimal ? 1 + ceil_log2(n_c) : static_cast<int>(n_c);
}

MinimalLayout::MinimalLayout(std::size_t n_c)
    : variables(n_c), register_qubits(ceil_log2(n_c)), qubits(1 + register_qubits), ancilla(register_qubits) {
  if (n_c == 0) throw std::invalid_argument("need at least one variable");
}

std::size_t RegisterStats::fallback_count() const noexcept {
  std::size_t n = 0;
  for (auto f : fallback) n += f;
  return n;
}

RegisterStats register_stats_from_counts(const ShotCounts& counts, const MinimalLayout& layout) {
  if (counts.qubits != 0 && counts.qubits != layout.qubits) {
    throw SimulatorError("shot record has " + std::to_string(counts.qubits) + " qubits, layout needs " +
                         std::to_string(layout.qubits));
  }
  RegisterStats stats;
  stats.source = RegisterStats::Source::kShots;
  stats.total.assign(layout.variables, 0.0);
  stats.ones.assign(layout.variables, 0.0);
  stats.samples = static_cast<double>(counts.total);
  for (const auto& [index, count] : counts.counts) {
    const std::size_t k = layout.register_of(index);
    const auto c = static_cast<double>(count);
    if (k >= layout.variables) {
      stats.discarded += c;
      continue;
    }
    stats.total[k] += c;
    if (layout.ancilla_set(index)) stats.ones[k] += c;
  }
  finish_marginals(stats, 0.0);
  return stats;
}

RegisterStats register_stats_from_probabilities(std::span<const double> probabilities,
                                                const MinimalLayout& layout) {
  if (probabilities.size() != (std::size_t{1} << layout.qubits)) {
    throw SimulatorError("probability vector does not match layout");
  }
  RegisterStats stats;
  stats.source = RegisterStats::Source::kExact;
  stats.total.assign(layout.variables, 0.0);
  stats.ones.assign(layout.variables, 0.0);
  const std::size_t registers = std::size_t{1} << layout.register_qubits;
  for (std::size_t k = 0; k < registers; ++k) {
    const double zero = probabilities[k];
    const double one = probabilities[k | registers];
    if (k >= layout.variables) {
      stats.discarded += zero + one;
      continue;
    }
    stats.total[k] = zero + one;
    stats.ones[k] = one;
  }
  finish_marginals(stats, kExactFallbackThreshold);
  return stats;
}

RegisterStats register_stats_exact(const StateVector& state, const MinimalLayout& layout) {
  if (state.qubits() != layout.qubits) {
    throw SimulatorError("state has " + std::to_string(state.qubits()) + " qubits, layout needs " +
                         std::to_string(layout.qubits));
  }
  return register_stats_from_probabilities(basis_probabilities(state), layout);
}

double minimal_cost(const QuboProblem& qubo, std::span<const double> p) {
  require_variables(qubo, p.size());
  const std::size_t n = p.size();
  double cost = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = qubo.row(k);
    double cross = 0.0;
    for (std::size_t l = k + 1; l < n; ++l) cross += row[l] * p[l];
    cost += p[k] * (row[k] + 2.0 * cross);
  }
  return cost;
}

double minimal_cost(const QuboProblem& qubo, const RegisterStats& stats) { return minimal_cost(qubo, stats.p); }

std::vector<double> minimal_cost_partials(const QuboProblem& qubo, std::span<const double> p) {
  require_variables(qubo, p.size());
  const std::size_t n = p.size();
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = qubo.row(k);
    double cross = 0.0;
    for (std::size_t l = 0; l < n; ++l) cross += l == k ? 0.0 : row[l] * p[l];
    d[k] = 2.0 * cross + row[k];
  }
  return d;
}

std::vector<Bitstring> sample_minimal_solutions(const RegisterStats& stats, std::size_t n_samples,
                                                std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("sample count must be positive");
  Rng rng(seed);
  std::vector<Bitstring> out;
  out.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Bitstring x(stats.size());
    for (std::size_t k = 0; k < stats.size(); ++k) x[k] = rng.bernoulli(stats.p[k]) ? 1 : 0;
    out.push_back(std::move(x));
  }
  return out;
}

double full_cost(const QuboProblem& qubo, const ShotCounts& counts) {
  if (counts.total == 0) return 0.0;
  double acc = 0.0;
  for (const auto& [index, count] : counts.counts) {
    acc += static_cast<double>(count) * evaluate(qubo, Bitstring::from_index(index, qubo.size()), false);
  }
  return acc / static_cast<double>(counts.total);
}

std::vector<double> full_energy_table(const QuboProblem& qubo) {
  std::vector<double> table(std::size_t{1} << qubo.size());
  const double offset = qubo.offset();
  enumerate_costs(qubo, [&](std::uint64_t index, double cost) { table[index] = cost - offset; });
  return table;
}

double full_cost_exact(std::span<const double> energy_table, std::span<const double> probabilities) {
  if (energy_table.size() != probabilities.size()) {
    throw SimulatorError("energy table does not match the state dimension");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) acc += energy_table[i] * probabilities[i];
  return acc;
}

std::vector<std::pair<Bitstring, std::uint64_t>> full_solutions_from_counts(const ShotCounts& counts) {
  std::vector<std::pair<Bitstring, std::uint64_t>> out;
  out.reserve(counts.counts.size());
  for (const auto& [index, count] : counts.counts) {
    out.emplace_back(Bitstring::from_index(index, static_cast<std::size_t>(counts.qubits)), count);
  }
  return out;
}

std::string write_register_stats(const RegisterStats& stats) {
  std::ostringstream os;
  os << "# qvrp register stats schema_version 1 source "
     << (stats.source == RegisterStats::Source::kShots ? "shots" : "exact") << "\n";
  os << "# k total ones p fallback\n";
  char buf[160];
  for (std::size_t k = 0; k < stats.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g %d\n", k, stats.total[k], stats.ones[k], stats.p[k],
                  stats.fallback[k] ? 1 : 0);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "discarded %.17g\n", stats.discarded);
  os << buf;
  return os.str();
}

}  // namespace qvrp
