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

#include "qvrp/optimize.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qvrp/rng.h"

namespace qvrp {
namespace {

constexpr double kShift = std::numbers::pi / 2;
constexpr std::size_t kMaxEnergyTableVariables = 22;

// Stream ids under a start seed.
enum Stream : std::uint64_t { kInitStream = 0, kShotStream = 1, kFinalStatsStream = 2, kSolutionStream = 3 };

}  // namespace

std::string_view to_string(GradientMode mode) noexcept {
  return mode == GradientMode::kChainRule ? "chain_rule" : "naive_shift";
}

GradientMode parse_gradient_mode(std::string_view name) {
  if (name == "chain_rule") return GradientMode::kChainRule;
  if (name == "naive_shift") return GradientMode::kNaiveShift;
  throw std::invalid_argument("unknown gradient mode '" + std::string(name) + "'");
}

GradientMode RunConfig::resolved_gradient_mode() const noexcept {
  if (gradient_mode) return *gradient_mode;
  return encoding == Encoding::kMinimal ? GradientMode::kChainRule : GradientMode::kNaiveShift;
}

void adam_step(AdamState& state, std::span<double> theta, std::span<const double> gradient) {
  if (theta.size() != state.m.size() || gradient.size() != state.m.size()) {
    throw std::invalid_argument("ADAM dimension mismatch");
  }
  const AdamConfig& hp = state.config;
  ++state.t;
  const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = gradient[i];
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= hp.lr * m_hat / (std::sqrt(v_hat) + hp.eps);
  }
}

CostEvaluator::CostEvaluator(const QuboProblem& qubo, Encoding encoding, int layers,
                             std::optional<std::uint64_t> shots)
    : qubo_(&qubo),
      encoding_(encoding),
      ansatz_(build_ansatz(qubits_required(qubo.size(), encoding), layers)),
      shots_(shots),
      layout_(qubo.size()) {
  if (shots && *shots == 0) throw std::invalid_argument("shot count must be positive");
  if (encoding == Encoding::kFull) {
    if (qubo.size() > kMaxEnergyTableVariables) {
      throw std::invalid_argument("full encoding supports at most " +
                                  std::to_string(kMaxEnergyTableVariables) + " variables");
    }
    energy_table_ = full_energy_table(qubo);
  }
}

StateVector CostEvaluator::prepare(std::span<const double> theta) const { return run_statevector(ansatz_, theta); }

RegisterStats CostEvaluator::stats_from_state(const StateVector& state, std::uint64_t seed) const {
  if (!shots_) return register_stats_exact(state, layout_);
  return register_stats_from_counts(sample(state, *shots_, seed), layout_);
}

double CostEvaluator::full_cost_of(const StateVector& state, std::uint64_t seed) const {
  const auto probs = basis_probabilities(state);
  if (!shots_) return full_cost_exact(energy_table_, probs);
  Rng rng(seed);
  const ShotCounts counts = sample_distribution(probs, state.qubits(), *shots_, rng);
  double acc = 0.0;
  for (const auto& [index, count] : counts.counts) acc += static_cast<double>(count) * energy_table_[index];
  return acc / static_cast<double>(counts.total);
}

CostEvaluator::Evaluation CostEvaluator::evaluate(std::span<const double> theta, std::uint64_t seed) const {
  const StateVector state = prepare(theta);
  if (encoding_ == Encoding::kFull) return {full_cost_of(state, seed), 0};
  const RegisterStats stats = stats_from_state(state, seed);
  return {minimal_cost(*qubo_, stats), stats.fallback_count()};
}

RegisterStats CostEvaluator::register_stats(std::span<const double> theta, std::uint64_t seed) const {
  if (encoding_ != Encoding::kMinimal) throw std::logic_error("register statistics need the minimal encoding");
  return stats_from_state(prepare(theta), seed);
}

CostEvaluator::Gradient CostEvaluator::gradient(std::span<const double> theta, GradientMode mode, Rng& rng,
                                                bool common_random_numbers) const {
  const std::size_t n_params = parameter_count();
  if (theta.size() != n_params) {
    throw SimulatorError("expected " + std::to_string(n_params) + " parameters, got " +
                         std::to_string(theta.size()));
  }
  Gradient out;
  out.gradient.assign(n_params, 0.0);
  std::vector<double> shifted(theta.begin(), theta.end());
  StateVector state(ansatz_.qubits);

  // Full-encoding cost is linear in the basis probabilities, so both modes
  // reduce to shifting the scalar cost.
  if (mode == GradientMode::kNaiveShift || encoding_ == Encoding::kFull) {
    out.at = evaluate(theta, rng.next());
    for (std::size_t j = 0; j < n_params; ++j) {
      const std::uint64_t plus_seed = rng.next();
      const std::uint64_t minus_seed = common_random_numbers ? plus_seed : rng.next();
      shifted[j] = theta[j] + kShift;
      const double up = evaluate(shifted, plus_seed).cost;
      shifted[j] = theta[j] - kShift;
      const double down = evaluate(shifted, minus_seed).cost;
      shifted[j] = theta[j];
      out.gradient[j] = 0.5 * (up - down);
    }
    return out;
  }

  run_statevector(ansatz_, theta, state);
  const RegisterStats base = stats_from_state(state, rng.next());
  out.at = {minimal_cost(*qubo_, base), base.fallback_count()};
  const std::vector<double> partials = minimal_cost_partials(*qubo_, base.p);
  const std::size_t n = base.size();

  for (std::size_t j = 0; j < n_params; ++j) {
    const std::uint64_t plus_seed = rng.next();
    const std::uint64_t minus_seed = common_random_numbers ? plus_seed : rng.next();
    shifted[j] = theta[j] + kShift;
    run_statevector(ansatz_, shifted, state);
    const RegisterStats up = stats_from_state(state, plus_seed);
    shifted[j] = theta[j] - kShift;
    run_statevector(ansatz_, shifted, state);
    const RegisterStats down = stats_from_state(state, minus_seed);
    shifted[j] = theta[j];

    double g = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (base.fallback[k]) continue;
      const double total = base.total[k] / base.samples;
      const double ones = base.ones[k] / base.samples;
      const double d_total = 0.5 * (up.total[k] / up.samples - down.total[k] / down.samples);
      const double d_ones = 0.5 * (up.ones[k] / up.samples - down.ones[k] / down.samples);
      const double dp = (total * d_ones - ones * d_total) / (total * total);
      g += partials[k] * dp;
    }
    out.gradient[j] = g;
  }
  return out;
}

OptimizationTrace run_optimization(const CostEvaluator& evaluator, const RunConfig& config,
                                   std::uint64_t start_seed) {
  const std::size_t n_params = evaluator.parameter_count();
  Rng init = Rng(start_seed).split(kInitStream);
  Rng shots = Rng(start_seed).split(kShotStream);

  OptimizationTrace trace;
  trace.start_seed = start_seed;
  trace.initial_theta.resize(n_params);
  for (double& t : trace.initial_theta) t = init.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> theta = trace.initial_theta;

  const auto& bounds = evaluator.qubo().bounds();
  const bool normalize = bounds && bounds->max > bounds->min;
  const GradientMode mode = config.resolved_gradient_mode();
  AdamState adam(n_params, config.adam);
  std::size_t flat_run = 0;

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grad = evaluator.gradient(theta, mode, shots, config.common_random_numbers);
    adam_step(adam, theta, grad.gradient);
    const auto t1 = std::chrono::steady_clock::now();

    const double cost = grad.at.cost;
    if (config.plateau_tolerance && !trace.costs.empty()) {
      flat_run = std::abs(cost - trace.costs.back()) < *config.plateau_tolerance ? flat_run + 1 : 0;
    }
    trace.costs.push_back(cost);
    trace.fallback_counts.push_back(grad.at.fallback_count);
    trace.wall_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (normalize) {
      trace.normalized_costs.push_back(
          normalize_cost(cost + evaluator.qubo().offset(), bounds->min, bounds->max));
    }
    if (config.plateau_tolerance && flat_run >= config.plateau_window) break;
  }
  trace.final_theta = std::move(theta);
  return trace;
}

OptimizationTrace run_optimization(const QuboProblem& qubo, const RunConfig& config, std::uint64_t start_seed) {
  if (qubo.size() == 0) throw std::invalid_argument("QUBO has no variables");
  const CostEvaluator evaluator(qubo, config.encoding, config.layers, config.shots);
  return run_optimization(evaluator, config, start_seed);
}

const SampledSolution* ExperimentResult::best() const noexcept {
  const SampledSolution* best = nullptr;
  for (const auto& s : solutions) {
    if (!best || s.solution.cost < best->solution.cost) best = &s;
  }
  return best;
}

std::size_t ExperimentResult::feasible_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(solutions.begin(), solutions.end(), [](const auto& s) { return s.solution.feasible; }));
}

std::uint64_t start_seed(std::uint64_t master, std::size_t start) { return derive_seed(master, start); }

namespace {

struct StartOutcome {
  OptimizationTrace trace;
  std::vector<SampledSolution> solutions;
  RegisterStats stats;
};

StartOutcome run_start(const CostEvaluator& evaluator, const QuboProblem& qubo, const RunConfig& config,
                       std::size_t start) {
  StartOutcome out;
  const std::uint64_t seed = start_seed(config.seed, start);
  out.trace = run_optimization(evaluator, config, seed);

  const StateVector final_state = evaluator.prepare(out.trace.final_theta);
  const std::uint64_t stats_seed = derive_seed(seed, kFinalStatsStream);
  const std::uint64_t solution_seed = derive_seed(seed, kSolutionStream);

  std::vector<Bitstring> picks;
  if (config.encoding == Encoding::kMinimal) {
    const MinimalLayout& layout = evaluator.minimal_layout();
    out.stats = config.shots
                    ? register_stats_from_counts(sample(final_state, *config.shots, stats_seed), layout)
                    : register_stats_exact(final_state, layout);
    picks = sample_minimal_solutions(out.stats, config.samples_per_start, solution_seed);
  } else {
    // Each computational-basis shot is one candidate solution.
    Rng rng(solution_seed);
    const auto probs = basis_probabilities(final_state);
    for (std::size_t s = 0; s < config.samples_per_start; ++s) {
      const ShotCounts one = sample_distribution(probs, final_state.qubits(), 1, rng);
      picks.push_back(Bitstring::from_index(one.counts.begin()->first, qubo.size()));
    }
  }
  for (std::size_t s = 0; s < picks.size(); ++s) {
    out.solutions.push_back({start, s, check_feasibility(qubo, picks[s])});
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const QuboProblem& input, const RunConfig& config) {
  if (config.n_starts == 0 || config.samples_per_start == 0) {
    throw std::invalid_argument("n_starts and samples_per_start must be positive");
  }
  QuboProblem qubo = input;
  if (!qubo.bounds()) qubo.set_bounds(compute_bounds(qubo, config.seed));

  ExperimentResult result;
  result.config = config;
  result.bounds = *qubo.bounds();
  result.qubits = qubits_required(qubo.size(), config.encoding);

  const CostEvaluator evaluator(qubo, config.encoding, config.layers, config.shots);
  std::vector<StartOutcome> outcomes(config.n_starts);

  std::size_t workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  workers = std::clamp<std::size_t>(workers, 1, config.n_starts);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < config.n_starts; i = next++) {
      try {
        outcomes[i] = run_start(evaluator, qubo, config, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& o : outcomes) {
    result.traces.push_back(std::move(o.trace));
    for (auto& s : o.solutions) result.solutions.push_back(std::move(s));
    if (config.encoding == Encoding::kMinimal) result.final_stats.push_back(std::move(o.stats));
  }
  return result;
}

std::string experiment_to_json(const ExperimentResult& result) {
  using nlohmann::ordered_json;
  const RunConfig& c = result.config;
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["rng"] = {{"name", std::string(Rng::kName)}, {"version", Rng::kVersion}};
  doc["config"] = {
      {"encoding", std::string(to_string(c.encoding))},
      {"layers", c.layers},
      {"n_starts", c.n_starts},
      {"samples_per_start", c.samples_per_start},
      {"shots", c.shots ? ordered_json(*c.shots) : ordered_json("exact")},
      {"max_iterations", c.max_iterations},
      {"seed", c.seed},
      {"gradient_mode", std::string(to_string(c.resolved_gradient_mode()))},
      {"adam", {{"lr", c.adam.lr}, {"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps}}},
      {"common_random_numbers", c.common_random_numbers},
  };
  doc["qubits"] = result.qubits;
  doc["bounds"] = {{"min", result.bounds.min},
                   {"max", result.bounds.max},
                   {"certified", result.bounds.certified},
                   {"method", result.bounds.method}};

  ordered_json traces = ordered_json::array();
  for (std::size_t s = 0; s < result.traces.size(); ++s) {
    const auto& t = result.traces[s];
    traces.push_back({{"start", s},
                      {"start_seed", t.start_seed},
                      {"costs", t.costs},
                      {"normalized_costs", t.normalized_costs},
                      {"fallback_counts", t.fallback_counts},
                      {"final_theta", t.final_theta}});
  }
  doc["traces"] = std::move(traces);

  ordered_json rows = ordered_json::array();
  for (const auto& s : result.solutions) {
    rows.push_back({{"start", s.start},
                    {"sample", s.sample},
                    {"bits", s.solution.bits.str()},
                    {"cost", s.solution.cost},
                    {"normalized_cost",
                     s.solution.normalized_cost ? ordered_json(*s.solution.normalized_cost) : ordered_json(nullptr)},
                    {"feasible", s.solution.feasible}});
  }
  doc["solutions"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace qvrp
