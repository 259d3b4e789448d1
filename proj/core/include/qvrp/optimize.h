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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qvrp/encodings.h"
#include "qvrp/qubo.h"
#include "qvrp/simulator.h"

namespace qvrp {

class Rng;

enum class GradientMode { kChainRule, kNaiveShift };

std::string_view to_string(GradientMode mode) noexcept;
GradientMode parse_gradient_mode(std::string_view name);

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct RunConfig {
  Encoding encoding = Encoding::kMinimal;
  int layers = 4;
  std::size_t n_starts = 20;
  std::size_t samples_per_start = 10;
  /// Shots per circuit evaluation; nullopt means exact statevector probabilities.
  std::optional<std::uint64_t> shots;
  std::size_t max_iterations = 500;
  std::uint64_t seed = 0;
  /// nullopt picks chain_rule for the minimal encoding and naive_shift for full.
  std::optional<GradientMode> gradient_mode;
  AdamConfig adam;
  /// Reuse one shot seed for the +/- evaluations of a parameter shift.
  bool common_random_numbers = true;
  /// Stop once |cost change| < tolerance for `plateau_window` iterations in a row.
  std::optional<double> plateau_tolerance;
  std::size_t plateau_window = 50;
  /// Worker threads for independent starts; 0 uses the hardware concurrency.
  std::size_t threads = 1;

  GradientMode resolved_gradient_mode() const noexcept;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  AdamConfig config;

  AdamState(std::size_t n, AdamConfig hp) : m(n, 0.0), v(n, 0.0), config(hp) {}
};

/// One bias-corrected ADAM update of theta in place.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> gradient);

/// Cost of the ansatz state under one encoding, in exact or shot mode.
///
/// Costs exclude the QUBO offset. Shot-mode evaluations take an explicit seed
/// so that callers control the random stream. All methods are const and safe
/// to call concurrently.
class CostEvaluator {
 public:
  CostEvaluator(const QuboProblem& qubo, Encoding encoding, int layers,
                std::optional<std::uint64_t> shots = std::nullopt);

  struct Evaluation {
    double cost = 0.0;
    std::size_t fallback_count = 0;
  };

  struct Gradient {
    std::vector<double> gradient;
    /// Cost at the unshifted parameters.
    Evaluation at;
  };

  const QuboProblem& qubo() const noexcept { return *qubo_; }
  Encoding encoding() const noexcept { return encoding_; }
  const AnsatzSpec& ansatz() const noexcept { return ansatz_; }
  std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(ansatz_.parameter_count()); }
  std::optional<std::uint64_t> shots() const noexcept { return shots_; }
  const MinimalLayout& minimal_layout() const noexcept { return layout_; }

  StateVector prepare(std::span<const double> theta) const;
  Evaluation evaluate(std::span<const double> theta, std::uint64_t seed = 0) const;
  double cost(std::span<const double> theta, std::uint64_t seed = 0) const {
    return evaluate(theta, seed).cost;
  }

  /// Register statistics of the prepared state (minimal encoding only).
  RegisterStats register_stats(std::span<const double> theta, std::uint64_t seed = 0) const;

  /// Parameter-shift gradient; `rng` supplies the shot seeds.
  Gradient gradient(std::span<const double> theta, GradientMode mode, Rng& rng,
                    bool common_random_numbers = true) const;

 private:
  RegisterStats stats_from_state(const StateVector& state, std::uint64_t seed) const;
  double full_cost_of(const StateVector& state, std::uint64_t seed) const;

  const QuboProblem* qubo_;
  Encoding encoding_;
  AnsatzSpec ansatz_;
  std::optional<std::uint64_t> shots_;
  MinimalLayout layout_;
  std::vector<double> energy_table_;  // full encoding only
};

struct OptimizationTrace {
  std::vector<double> costs;
  std::vector<double> normalized_costs;  // empty when no bounds are attached
  std::vector<std::size_t> fallback_counts;
  std::vector<double> wall_ms;
  std::vector<double> initial_theta;
  std::vector<double> final_theta;
  std::uint64_t start_seed = 0;

  std::size_t iterations() const noexcept { return costs.size(); }
};

/// theta_0 ~ U[0, 2 pi) from start_seed, then gradient + ADAM for max_iterations.
OptimizationTrace run_optimization(const QuboProblem& qubo, const RunConfig& config, std::uint64_t start_seed);
OptimizationTrace run_optimization(const CostEvaluator& evaluator, const RunConfig& config,
                                   std::uint64_t start_seed);

struct SampledSolution {
  std::size_t start = 0;
  std::size_t sample = 0;
  EvaluatedSolution solution;
};

struct ExperimentResult {
  RunConfig config;
  int qubits = 0;
  CostBounds bounds;
  std::vector<OptimizationTrace> traces;
  std::vector<SampledSolution> solutions;
  /// Per-start register statistics of the final state (minimal encoding only).
  std::vector<RegisterStats> final_stats;

  const SampledSolution* best() const noexcept;
  std::size_t feasible_count() const noexcept;
};

/// Seed of start i for a given master seed.
std::uint64_t start_seed(std::uint64_t master, std::size_t start);

/// n_starts optimizations followed by samples_per_start solutions per start.
/// Uses the bounds attached to `qubo`, or computes them when absent.
ExperimentResult run_experiment(const QuboProblem& qubo, const RunConfig& config);

/// JSON document with config echo, traces, bounds provenance and the solution
/// table. Wall-clock timings are left out so the output is reproducible.
std::string experiment_to_json(const ExperimentResult& result);

}  // namespace qvrp
