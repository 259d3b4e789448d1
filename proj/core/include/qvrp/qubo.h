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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qvrp {

class RouteSet;

class QuboError : public std::invalid_argument {
 public:
  enum class Kind { kEmptyRouteSet, kLengthMismatch, kTooLarge, kDegenerateRange, kBadInput };
  QuboError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Binary assignment x, one entry per route variable.
struct Bitstring {
  std::vector<std::uint8_t> bits;

  Bitstring() = default;
  explicit Bitstring(std::size_t n) : bits(n, 0) {}
  Bitstring(std::initializer_list<std::uint8_t> values) : bits(values) {}

  /// Decodes a basis index; variable k is bit k of the index.
  static Bitstring from_index(std::uint64_t index, std::size_t n);
  std::uint64_t to_index() const;

  std::size_t size() const noexcept { return bits.size(); }
  std::uint8_t operator[](std::size_t k) const { return bits[k]; }
  std::uint8_t& operator[](std::size_t k) { return bits[k]; }
  /// Characters '0'/'1', variable 0 first.
  std::string str() const;

  friend bool operator==(const Bitstring&, const Bitstring&) = default;
  friend auto operator<=>(const Bitstring&, const Bitstring&) = default;
};

/// Bounds used to normalize costs; `certified` is false for annealing estimates.
struct CostBounds {
  double min = 0.0;
  double max = 0.0;
  bool certified = false;
  std::string method;
  Bitstring argmin;
  Bitstring argmax;
};

/// x^T A x + offset with A symmetric, built from a route-based set partition.
///
/// The offset is kept out of the matrix so that the bare quadratic form can be
/// evaluated on its own.
class QuboProblem {
 public:
  QuboProblem() = default;

  /// General QUBO without routing structure (no coverage, node_count 0).
  QuboProblem(std::size_t n, std::vector<double> matrix, double offset = 0.0, double penalty = 1.0);

  std::size_t size() const noexcept { return n_; }
  double at(std::size_t k, std::size_t l) const noexcept { return matrix_[k * n_ + l]; }
  std::span<const double> matrix() const noexcept { return matrix_; }
  std::span<const double> row(std::size_t k) const noexcept { return {matrix_.data() + k * n_, n_}; }
  double penalty() const noexcept { return penalty_; }
  double offset() const noexcept { return offset_; }
  int node_count() const noexcept { return node_count_; }
  std::span<const double> route_costs() const noexcept { return route_costs_; }
  /// Row-major node_count x n matrix, entry (i, r) = 1 if route r visits customer i+1.
  std::span<const std::uint8_t> coverage() const noexcept { return coverage_; }
  bool covers(int customer_index, std::size_t r) const noexcept {
    return coverage_[static_cast<std::size_t>(customer_index) * n_ + r] != 0;
  }
  std::optional<int> vehicle_count() const noexcept { return vehicle_count_; }

  const std::optional<CostBounds>& bounds() const noexcept { return bounds_; }
  void set_bounds(CostBounds b) { bounds_ = std::move(b); }

  friend QuboProblem build_qubo(std::span<const double>, std::span<const std::uint8_t>, int,
                                std::optional<double>, std::optional<int>);
  friend QuboProblem read_qubo(const std::string&);

 private:
  std::size_t n_ = 0;
  std::vector<double> matrix_;
  double penalty_ = 1.0;
  double offset_ = 0.0;
  int node_count_ = 0;
  std::vector<double> route_costs_;
  std::vector<std::uint8_t> coverage_;
  std::optional<int> vehicle_count_;
  std::optional<CostBounds> bounds_;
};

/// rho = sum |c_r|, or 1 when every cost is zero.
double default_penalty(std::span<const double> route_costs);
double default_penalty(const RouteSet& routes);

/// A = diag(c) + rho D^T D - diag(2 rho 1^T D), offset = rho N, where D is the
/// coverage matrix. With a vehicle count V the expansion of rho (sum x - V)^2
/// is added as well.
QuboProblem build_qubo(std::span<const double> route_costs, std::span<const std::uint8_t> coverage,
                       int node_count, std::optional<double> penalty = std::nullopt,
                       std::optional<int> vehicle_count = std::nullopt);
QuboProblem build_qubo(const RouteSet& routes, std::optional<double> penalty = std::nullopt,
                       std::optional<int> vehicle_count = std::nullopt);

/// Penalized objective evaluated term by term, without the matrix.
double penalized_cost(const QuboProblem& qubo, const Bitstring& x);

double evaluate(const QuboProblem& qubo, const Bitstring& x, bool include_offset);

struct EvaluatedSolution {
  Bitstring bits;
  double cost = 0.0;
  std::optional<double> normalized_cost;
  std::vector<int> visit_counts;
  bool feasible = false;
};

EvaluatedSolution check_feasibility(const QuboProblem& qubo, const Bitstring& x);

struct BruteForceResult {
  Bitstring argmin;
  double min = 0.0;
  Bitstring argmax;
  double max = 0.0;
};

inline constexpr std::size_t kBruteForceCap = 26;

/// Exhaustive scan with offset included. Ties go to the lexicographically
/// smallest bitstring (variable 0 compared first).
BruteForceResult brute_force(const QuboProblem& qubo, std::size_t cap = kBruteForceCap);

/// Calls `visit(index, cost)` for every bitstring index with offset included.
/// Uses the same cap as brute_force.
void enumerate_costs(const QuboProblem& qubo, const std::function<void(std::uint64_t, double)>& visit,
                     std::size_t cap = kBruteForceCap);

struct AnnealSchedule {
  std::size_t sweeps = 2000;
  /// Temperatures; <= 0 picks values from the matrix scale.
  double t_hi = 0.0;
  double t_lo = 0.0;
  std::size_t restarts = 4;
};

struct AnnealResult {
  double min_estimate = 0.0;
  double max_estimate = 0.0;
  Bitstring best;
  Bitstring worst;
  bool certified = false;
};

/// Single-flip Metropolis annealing, once on A and once on -A.
AnnealResult anneal_bounds(const QuboProblem& qubo, const AnnealSchedule& schedule, std::uint64_t seed);

/// Brute force up to `cap`, annealing beyond it.
CostBounds compute_bounds(const QuboProblem& qubo, std::uint64_t seed, std::size_t cap = kBruteForceCap,
                          const AnnealSchedule& schedule = {});

/// (C - min) / (max - min), unclamped. Throws QuboError(kDegenerateRange).
double normalize_cost(double cost, double min, double max);

/// H = constant + sum_k linear_k s_k + sum_{k != l} quadratic_kl s_k s_l with
/// s_k = 1 - 2 x_k.
struct IsingView {
  std::size_t n = 0;
  std::vector<double> linear;
  std::vector<double> quadratic;  // n x n, zero diagonal
  double constant = 0.0;

  double energy(std::span<const int> spins) const;
};

IsingView to_ising(const QuboProblem& qubo);

/// Text export: header (schema_version, n_c, penalty, offset, node_count,
/// vehicles), one `route` line per variable, then upper-triangle `a k l value`
/// triplets. Doubles are printed with 17 significant digits.
std::string write_qubo(const QuboProblem& qubo);
QuboProblem read_qubo(const std::string& text);

}  // namespace qvrp
