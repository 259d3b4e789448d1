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

#include "qvrp/qubo.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qvrp/rng.h"
#include "qvrp/vrptw.h"

namespace qvrp {
namespace {

void require_length(const QuboProblem& qubo, const Bitstring& x) {
  if (x.size() != qubo.size()) {
    throw QuboError(QuboError::Kind::kLengthMismatch,
                    "bitstring has " + std::to_string(x.size()) + " bits, problem has " +
                        std::to_string(qubo.size()) + " variables");
  }
}

// Lexicographic order on bitstrings stored as basis indices (variable 0 first).
bool lex_less(std::uint64_t a, std::uint64_t b) noexcept {
  if (a == b) return false;
  const int d = std::countr_zero(a ^ b);
  return ((a >> d) & 1U) == 0;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Bitstring Bitstring::from_index(std::uint64_t index, std::size_t n) {
  Bitstring x(n);
  for (std::size_t k = 0; k < n; ++k) x.bits[k] = static_cast<std::uint8_t>((index >> k) & 1U);
  return x;
}

std::uint64_t Bitstring::to_index() const {
  if (bits.size() > 64) throw std::out_of_range("bitstring longer than 64 bits has no index");
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) index |= static_cast<std::uint64_t>(bits[k] & 1U) << k;
  return index;
}

std::string Bitstring::str() const {
  std::string s(bits.size(), '0');
  for (std::size_t k = 0; k < bits.size(); ++k) s[k] = bits[k] ? '1' : '0';
  return s;
}

QuboProblem::QuboProblem(std::size_t n, std::vector<double> matrix, double offset, double penalty)
    : n_(n), matrix_(std::move(matrix)), penalty_(penalty), offset_(offset), route_costs_(n, 0.0) {
  if (matrix_.size() != n * n) {
    throw QuboError(QuboError::Kind::kBadInput, "matrix size does not match variable count");
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      if (matrix_[k * n + l] != matrix_[l * n + k]) {
        throw QuboError(QuboError::Kind::kBadInput, "matrix is not symmetric");
      }
    }
  }
}

double default_penalty(std::span<const double> route_costs) {
  double rho = 0.0;
  for (double c : route_costs) rho += std::abs(c);
  return rho == 0.0 ? 1.0 : rho;
}

double default_penalty(const RouteSet& routes) {
  std::vector<double> costs;
  costs.reserve(routes.size());
  for (const Route& r : routes.routes()) costs.push_back(r.cost);
  return default_penalty(costs);
}

QuboProblem build_qubo(std::span<const double> route_costs, std::span<const std::uint8_t> coverage,
                       int node_count, std::optional<double> penalty, std::optional<int> vehicle_count) {
  const std::size_t n = route_costs.size();
  if (n == 0) throw QuboError(QuboError::Kind::kEmptyRouteSet, "route set is empty");
  if (node_count < 0 || coverage.size() != static_cast<std::size_t>(node_count) * n) {
    throw QuboError(QuboError::Kind::kBadInput, "coverage matrix does not match node count");
  }
  if (penalty && !(*penalty > 0.0)) {
    throw QuboError(QuboError::Kind::kBadInput, "penalty must be positive");
  }
  if (vehicle_count && *vehicle_count < 0) {
    throw QuboError(QuboError::Kind::kBadInput, "vehicle count must be non-negative");
  }
  const double rho = penalty ? *penalty : default_penalty(route_costs);

  QuboProblem q;
  q.n_ = n;
  q.penalty_ = rho;
  q.node_count_ = node_count;
  q.route_costs_.assign(route_costs.begin(), route_costs.end());
  q.coverage_.assign(coverage.begin(), coverage.end());
  q.vehicle_count_ = vehicle_count;
  q.matrix_.assign(n * n, 0.0);
  q.offset_ = rho * node_count;

  std::vector<std::vector<std::size_t>> visits(n);
  for (int i = 0; i < node_count; ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      if (coverage[static_cast<std::size_t>(i) * n + r]) visits[r].push_back(static_cast<std::size_t>(i));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto own = static_cast<double>(visits[k].size());
    q.matrix_[k * n + k] = route_costs[k] + rho * own - 2.0 * rho * own;
    for (std::size_t l = k + 1; l < n; ++l) {
      std::size_t shared = 0;
      for (std::size_t i : visits[k]) shared += coverage[i * n + l];
      const double v = rho * static_cast<double>(shared);
      q.matrix_[k * n + l] = v;
      q.matrix_[l * n + k] = v;
    }
  }

  if (vehicle_count) {
    const double v = *vehicle_count;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) q.matrix_[k * n + l] += k == l ? rho * (1.0 - 2.0 * v) : rho;
    }
    q.offset_ += rho * v * v;
  }
  return q;
}

QuboProblem build_qubo(const RouteSet& routes, std::optional<double> penalty,
                       std::optional<int> vehicle_count) {
  if (routes.empty()) throw QuboError(QuboError::Kind::kEmptyRouteSet, "route set is empty");
  const std::size_t n = routes.size();
  const int customers = routes.instance().customer_count();
  std::vector<double> costs(n);
  std::vector<std::uint8_t> coverage(static_cast<std::size_t>(customers) * n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const Route& route = routes.route(r);
    costs[r] = route.cost;
    for (NodeId id : route.coverage) coverage[static_cast<std::size_t>(id - 1) * n + r] = 1;
  }
  return build_qubo(costs, coverage, customers, penalty,
                    vehicle_count ? vehicle_count : routes.vehicle_count);
}

double penalized_cost(const QuboProblem& qubo, const Bitstring& x) {
  require_length(qubo, x);
  const std::size_t n = qubo.size();
  double cost = 0.0;
  for (std::size_t r = 0; r < n; ++r) cost += qubo.route_costs()[r] * x[r];
  for (int i = 0; i < qubo.node_count(); ++i) {
    double visits = 0.0;
    for (std::size_t r = 0; r < n; ++r) visits += qubo.covers(i, r) ? x[r] : 0;
    cost += qubo.penalty() * (visits - 1.0) * (visits - 1.0);
  }
  if (auto v = qubo.vehicle_count()) {
    double used = 0.0;
    for (std::size_t r = 0; r < n; ++r) used += x[r];
    cost += qubo.penalty() * (used - *v) * (used - *v);
  }
  return cost;
}

double evaluate(const QuboProblem& qubo, const Bitstring& x, bool include_offset) {
  require_length(qubo, x);
  const std::size_t n = qubo.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!x[k]) continue;
    const auto row = qubo.row(k);
    total += row[k];
    double cross = 0.0;
    for (std::size_t l = k + 1; l < n; ++l) cross += x[l] ? row[l] : 0.0;
    total += 2.0 * cross;
  }
  return include_offset ? total + qubo.offset() : total;
}

EvaluatedSolution check_feasibility(const QuboProblem& qubo, const Bitstring& x) {
  require_length(qubo, x);
  EvaluatedSolution out;
  out.bits = x;
  out.cost = evaluate(qubo, x, true);
  out.visit_counts.assign(static_cast<std::size_t>(qubo.node_count()), 0);
  out.feasible = true;
  for (int i = 0; i < qubo.node_count(); ++i) {
    int count = 0;
    for (std::size_t r = 0; r < qubo.size(); ++r) count += qubo.covers(i, r) && x[r];
    out.visit_counts[static_cast<std::size_t>(i)] = count;
    out.feasible = out.feasible && count == 1;
  }
  if (auto v = qubo.vehicle_count()) {
    int used = 0;
    for (std::size_t r = 0; r < qubo.size(); ++r) used += x[r];
    out.feasible = out.feasible && used == *v;
  }
  if (const auto& b = qubo.bounds(); b && b->max > b->min) {
    out.normalized_cost = normalize_cost(out.cost, b->min, b->max);
  }
  return out;
}

void enumerate_costs(const QuboProblem& qubo, const std::function<void(std::uint64_t, double)>& visit,
                     std::size_t cap) {
  const std::size_t n = qubo.size();
  if (n > cap || n >= 63) {
    throw QuboError(QuboError::Kind::kTooLarge, "exhaustive scan over " + std::to_string(n) +
                                                    " variables exceeds the cap of " +
                                                    std::to_string(cap));
  }
  // Gray-code walk: one flip per step, O(n) field update.
  std::vector<double> field(n, 0.0);  // field[l] = sum_k A_lk x_k
  std::uint64_t state = 0;
  double cost = qubo.offset();
  visit(0, cost);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < count; ++step) {
    const auto k = static_cast<std::size_t>(std::countr_zero(step));
    const bool on = ((state >> k) & 1U) == 0;
    const double akk = qubo.at(k, k);
    if (on) {
      cost += akk + 2.0 * field[k];
    } else {
      cost -= 2.0 * field[k] - akk;
    }
    const double sign = on ? 1.0 : -1.0;
    const auto col = qubo.row(k);
    for (std::size_t l = 0; l < n; ++l) field[l] += sign * col[l];
    state ^= std::uint64_t{1} << k;
    visit(state, cost);
  }
}

BruteForceResult brute_force(const QuboProblem& qubo, std::size_t cap) {
  std::uint64_t best = 0, worst = 0;
  double lo = qubo.offset(), hi = qubo.offset();
  enumerate_costs(
      qubo,
      [&](std::uint64_t index, double cost) {
        if (cost < lo || (cost == lo && lex_less(index, best))) {
          lo = cost;
          best = index;
        }
        if (cost > hi || (cost == hi && lex_less(index, worst))) {
          hi = cost;
          worst = index;
        }
      },
      cap);
  BruteForceResult out;
  out.argmin = Bitstring::from_index(best, qubo.size());
  out.argmax = Bitstring::from_index(worst, qubo.size());
  out.min = evaluate(qubo, out.argmin, true);
  out.max = evaluate(qubo, out.argmax, true);
  return out;
}

namespace {

// Minimizes sign * x^T A x; returns the best state and its bare quadratic value.
std::pair<Bitstring, double> anneal_once(const QuboProblem& qubo, double sign,
                                         const AnnealSchedule& schedule, double t_hi, double t_lo,
                                         Rng& rng) {
  const std::size_t n = qubo.size();
  Bitstring x(n);
  for (auto& b : x.bits) b = static_cast<std::uint8_t>(rng.next() >> 63);
  std::vector<double> field(n, 0.0);
  double energy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!x[k]) continue;
    const auto row = qubo.row(k);
    for (std::size_t l = 0; l < n; ++l) field[l] += sign * row[l];
  }
  energy = sign * evaluate(qubo, x, false);

  auto delta = [&](std::size_t k) {
    const double akk = sign * qubo.at(k, k);
    return x[k] ? -(2.0 * field[k] - akk) : akk + 2.0 * field[k];
  };
  auto flip = [&](std::size_t k) {
    const double s = x[k] ? -sign : sign;
    const auto row = qubo.row(k);
    for (std::size_t l = 0; l < n; ++l) field[l] += s * row[l];
    x[k] ^= 1U;
  };

  Bitstring best = x;
  double best_energy = energy;
  const std::size_t sweeps = std::max<std::size_t>(schedule.sweeps, 1);
  const double ratio = sweeps > 1 ? std::pow(t_lo / t_hi, 1.0 / static_cast<double>(sweeps - 1)) : 1.0;
  double temperature = t_hi;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep, temperature *= ratio) {
    for (std::size_t step = 0; step < n; ++step) {
      const auto k = static_cast<std::size_t>(rng.below(n));
      const double d = delta(k);
      if (d <= 0.0 || rng.uniform() < std::exp(-d / temperature)) {
        flip(k);
        energy += d;
        if (energy < best_energy) {
          best_energy = energy;
          best = x;
        }
      }
    }
  }

  // Greedy descent from the best state visited.
  x = best;
  std::fill(field.begin(), field.end(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!x[k]) continue;
    const auto row = qubo.row(k);
    for (std::size_t l = 0; l < n; ++l) field[l] += sign * row[l];
  }
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (delta(k) < 0.0) {
        flip(k);
        improved = true;
      }
    }
  }
  return {x, evaluate(qubo, x, false)};
}

}  // namespace

AnnealResult anneal_bounds(const QuboProblem& qubo, const AnnealSchedule& schedule, std::uint64_t seed) {
  const std::size_t n = qubo.size();
  if (n == 0) throw QuboError(QuboError::Kind::kBadInput, "annealing needs at least one variable");

  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double s = std::abs(qubo.at(k, k));
    for (std::size_t l = 0; l < n; ++l) s += l == k ? 0.0 : 2.0 * std::abs(qubo.at(k, l));
    scale = std::max(scale, s);
  }
  if (scale == 0.0) scale = 1.0;
  const double t_hi = schedule.t_hi > 0.0 ? schedule.t_hi : scale;
  const double t_lo = schedule.t_lo > 0.0 ? std::min(schedule.t_lo, t_hi) : t_hi * 1e-4;

  Rng master(seed);
  AnnealResult out;
  bool first = true;
  const std::size_t restarts = std::max<std::size_t>(schedule.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng lo_rng = master.split(2 * r);
    Rng hi_rng = master.split(2 * r + 1);
    auto [lo_x, lo] = anneal_once(qubo, 1.0, schedule, t_hi, t_lo, lo_rng);
    auto [hi_x, hi] = anneal_once(qubo, -1.0, schedule, t_hi, t_lo, hi_rng);
    if (first || lo < out.min_estimate || (lo == out.min_estimate && lo_x < out.best)) {
      out.min_estimate = lo;
      out.best = lo_x;
    }
    if (first || hi > out.max_estimate || (hi == out.max_estimate && hi_x < out.worst)) {
      out.max_estimate = hi;
      out.worst = hi_x;
    }
    first = false;
  }
  out.min_estimate += qubo.offset();
  out.max_estimate += qubo.offset();
  return out;
}

CostBounds compute_bounds(const QuboProblem& qubo, std::uint64_t seed, std::size_t cap,
                          const AnnealSchedule& schedule) {
  CostBounds b;
  if (qubo.size() <= cap) {
    const auto bf = brute_force(qubo, cap);
    b.min = bf.min;
    b.max = bf.max;
    b.argmin = bf.argmin;
    b.argmax = bf.argmax;
    b.certified = true;
    b.method = "brute_force";
  } else {
    const auto sa = anneal_bounds(qubo, schedule, seed);
    b.min = sa.min_estimate;
    b.max = sa.max_estimate;
    b.argmin = sa.best;
    b.argmax = sa.worst;
    b.certified = false;
    b.method = "simulated_annealing";
  }
  return b;
}

double normalize_cost(double cost, double min, double max) {
  if (!(max > min)) {
    throw QuboError(QuboError::Kind::kDegenerateRange,
                    "cost range is degenerate (min " + format_double(min) + ", max " +
                        format_double(max) + ")");
  }
  return (cost - min) / (max - min);
}

double IsingView::energy(std::span<const int> spins) const {
  if (spins.size() != n) {
    throw QuboError(QuboError::Kind::kLengthMismatch, "spin vector length mismatch");
  }
  double e = constant;
  for (std::size_t k = 0; k < n; ++k) {
    e += linear[k] * spins[k];
    for (std::size_t l = 0; l < n; ++l) e += quadratic[k * n + l] * spins[k] * spins[l];
  }
  return e;
}

IsingView to_ising(const QuboProblem& qubo) {
  // x_k = (1 - s_k) / 2, so x^T A x = 1/4 sum_kl A_kl (1 - s_k)(1 - s_l), with s_k^2 = 1.
  const std::size_t n = qubo.size();
  IsingView view;
  view.n = n;
  view.linear.assign(n, 0.0);
  view.quadratic.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      const double a = qubo.at(k, l);
      view.constant += 0.25 * a;
      view.linear[k] -= 0.5 * a;
      if (k == l) {
        view.constant += 0.25 * a;
      } else {
        view.quadratic[k * n + l] = 0.25 * a;
      }
    }
  }
  return view;
}

std::string write_qubo(const QuboProblem& qubo) {
  std::ostringstream os;
  os << "# qvrp qubo\n";
  os << "schema_version 1\n";
  os << "n_c " << qubo.size() << "\n";
  os << "penalty " << format_double(qubo.penalty()) << "\n";
  os << "offset " << format_double(qubo.offset()) << "\n";
  os << "node_count " << qubo.node_count() << "\n";
  os << "vehicles ";
  if (auto v = qubo.vehicle_count()) {
    os << *v << "\n";
  } else {
    os << "none\n";
  }
  for (std::size_t r = 0; r < qubo.size(); ++r) {
    os << "route " << r << " " << format_double(qubo.route_costs()[r]);
    for (int i = 0; i < qubo.node_count(); ++i) {
      if (qubo.covers(i, r)) os << " " << (i + 1);
    }
    os << "\n";
  }
  for (std::size_t k = 0; k < qubo.size(); ++k) {
    for (std::size_t l = k; l < qubo.size(); ++l) {
      if (qubo.at(k, l) != 0.0) os << "a " << k << " " << l << " " << format_double(qubo.at(k, l)) << "\n";
    }
  }
  os << "end\n";
  return os.str();
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw QuboError(QuboError::Kind::kBadInput, "qubo line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) parse_fail(line, "bad number '" + token + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_fail(line, "bad number '" + token + "'");
  }
}

long long parse_int(const std::string& token, std::size_t line) {
  long long v = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end) parse_fail(line, "bad integer '" + token + "'");
  return v;
}

}  // namespace

QuboProblem read_qubo(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> n;
  double penalty = 1.0, offset = 0.0;
  int node_count = 0;
  std::optional<int> vehicles;
  std::vector<double> matrix, costs;
  std::vector<std::uint8_t> coverage;
  bool ended = false;

  auto need_n = [&](std::size_t line) {
    if (!n) parse_fail(line, "n_c must precede routes and entries");
    if (matrix.empty()) {
      matrix.assign(*n * *n, 0.0);
      costs.assign(*n, 0.0);
      coverage.assign(static_cast<std::size_t>(node_count) * *n, 0);
    }
    return *n;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty() || raw[0] == '#') continue;
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "end") {
      ended = true;
      break;
    }
    if (key == "schema_version") {
      if (tok.size() != 2 || parse_int(tok[1], line_no) != 1) parse_fail(line_no, "unsupported schema_version");
    } else if (key == "n_c" && tok.size() == 2) {
      n = static_cast<std::size_t>(parse_int(tok[1], line_no));
    } else if (key == "penalty" && tok.size() == 2) {
      penalty = parse_double(tok[1], line_no);
    } else if (key == "offset" && tok.size() == 2) {
      offset = parse_double(tok[1], line_no);
    } else if (key == "node_count" && tok.size() == 2) {
      if (!matrix.empty()) parse_fail(line_no, "node_count must precede routes and entries");
      node_count = static_cast<int>(parse_int(tok[1], line_no));
    } else if (key == "vehicles" && tok.size() == 2) {
      if (tok[1] != "none") vehicles = static_cast<int>(parse_int(tok[1], line_no));
    } else if (key == "route" && tok.size() >= 3) {
      const std::size_t size = need_n(line_no);
      const auto r = static_cast<std::size_t>(parse_int(tok[1], line_no));
      if (r >= size) parse_fail(line_no, "route index out of range");
      costs[r] = parse_double(tok[2], line_no);
      for (std::size_t t = 3; t < tok.size(); ++t) {
        const auto id = parse_int(tok[t], line_no);
        if (id < 1 || id > node_count) parse_fail(line_no, "customer id out of range");
        coverage[static_cast<std::size_t>(id - 1) * size + r] = 1;
      }
    } else if (key == "a" && tok.size() == 4) {
      const std::size_t size = need_n(line_no);
      const auto k = static_cast<std::size_t>(parse_int(tok[1], line_no));
      const auto l = static_cast<std::size_t>(parse_int(tok[2], line_no));
      if (k >= size || l >= size) parse_fail(line_no, "matrix index out of range");
      const double v = parse_double(tok[3], line_no);
      matrix[k * size + l] = v;
      matrix[l * size + k] = v;
    } else {
      parse_fail(line_no, "unrecognized line '" + raw + "'");
    }
  }
  if (!ended) parse_fail(line_no, "missing 'end'");
  if (!n || *n == 0) throw QuboError(QuboError::Kind::kBadInput, "qubo has no variables");
  need_n(line_no);

  if (!(penalty > 0.0)) throw QuboError(QuboError::Kind::kBadInput, "penalty must be positive");
  QuboProblem q = build_qubo(costs, coverage, node_count, penalty, vehicles);
  // The stored matrix and offset are authoritative.
  QuboProblem checked(*n, std::move(matrix), offset, penalty);
  q.matrix_ = std::move(checked.matrix_);
  q.offset_ = offset;
  return q;
}

}  // namespace qvrp
