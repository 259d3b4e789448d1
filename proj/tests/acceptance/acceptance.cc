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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Pass criterion numbers as arguments
// to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qvrp/encodings.h"
#include "qvrp/io.h"
#include "qvrp/optimize.h"
#include "qvrp/qubo.h"
#include "qvrp/rng.h"
#include "qvrp/simulator.h"
#include "qvrp/vrptw.h"
#include "qvrp_cli/commands.h"
#include "test_util.h"

namespace {

using namespace qvrp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> random_theta(Rng& rng, std::size_t n) {
  std::vector<double> t(n);
  for (double& v : t) v = rng.uniform(0.0, 2 * std::numbers::pi);
  return t;
}

RouteSet random_route_set(int customers, std::uint64_t seed, int max_stops, std::size_t max_routes,
                          double window_width = 0.0) {
  InstanceSpec spec;
  spec.customers = customers;
  spec.seed = seed;
  spec.window_width = window_width;
  auto inst = std::make_shared<const VrptwInstance>(random_instance(spec));
  return generate_routes(inst, {.max_stops = max_stops, .max_routes = max_routes, .seed = seed});
}

// Three random customers with unbounded windows. The 11-route cap keeps the
// two cheapest first-stop subtrees and the last singleton.
const RouteSet& eleven_routes() {
  static const RouteSet rs = random_route_set(3, 2, 3, 11);
  return rs;
}

const QuboProblem& eleven_qubo() {
  static const QuboProblem q = [] {
    QuboProblem p = build_qubo(eleven_routes());
    p.set_bounds(compute_bounds(p, 0));
    return p;
  }();
  return q;
}

oracle::RawRoutes raw_routes(const RouteSet& rs) {
  oracle::RawRoutes raw;
  raw.customers = rs.instance().customer_count();
  for (const Route& r : rs.routes()) {
    raw.costs.push_back(r.cost);
    raw.visits.emplace_back(r.coverage.begin(), r.coverage.end());
  }
  return raw;
}

// ------------------------------------------------------------------------

Outcome qubo_equivalence() {
  double worst = 0.0;
  std::size_t evaluated = 0, largest = 0;
  Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    const int customers = 3 + static_cast<int>(rng.below(4));
    const std::size_t cap = 2 + rng.below(13);
    const RouteSet rs = random_route_set(customers, 1000 + static_cast<std::uint64_t>(i), 1 + static_cast<int>(rng.below(3)),
                                         cap, i % 2 ? 80.0 : 0.0);
    std::optional<int> vehicles;
    if (i % 5 == 0) vehicles = 1 + static_cast<int>(rng.below(3));
    const QuboProblem q = build_qubo(rs, std::nullopt, vehicles);
    const oracle::RawRoutes raw = raw_routes(rs);
    const double rho = q.penalty();
    const std::size_t n = q.size();
    largest = std::max(largest, n);
    if (n > 14) return {false, fmt("route set %d has n_c = %zu > 14", i, n)};
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
      const auto bits = oracle::bits_of(idx, n);
      const double direct = oracle::direct_penalized_cost(raw, rho, bits, vehicles);
      const double via_matrix = evaluate(q, Bitstring::from_index(idx, n), true);
      worst = std::max(worst, std::abs(direct - via_matrix));
      ++evaluated;
    }
  }
  return {worst <= 1e-9, fmt("50 route sets, largest n_c = %zu, %zu bitstrings, max |diff| = %.3g", largest,
                             evaluated, worst)};
}

Outcome qubit_counts() {
  const std::vector<std::tuple<std::size_t, Encoding, int>> table{
      {4, Encoding::kMinimal, 3},   {11, Encoding::kMinimal, 5},  {16, Encoding::kMinimal, 5},
      {128, Encoding::kMinimal, 8}, {3964, Encoding::kMinimal, 13}, {16, Encoding::kFull, 16}};
  std::string got;
  bool ok = true;
  for (const auto& [n_c, enc, want] : table) {
    const int q = qubits_required(n_c, enc);
    ok = ok && q == want;
    got += fmt("%s(%zu)=%d ", std::string(to_string(enc)).c_str(), n_c, q);
  }
  return {ok, got};
}

Outcome partition_toy() {
  // Four singleton routes, one per customer: the routes partition the customers.
  const RouteSet rs = random_route_set(4, 7, 1, 4);
  if (rs.size() != 4) return {false, fmt("expected 4 routes, got %zu", rs.size())};
  QuboProblem q = build_qubo(rs);
  const BruteForceResult bf = brute_force(q);
  const Bitstring ones{1, 1, 1, 1};
  double route_sum = 0.0;
  for (const Route& r : rs.routes()) route_sum += r.cost;
  const EvaluatedSolution at_ones = check_feasibility(q, ones);
  const bool optimum_ok = bf.argmin == ones && at_ones.feasible && std::abs(bf.min - route_sum) <= 1e-9;

  const std::vector<double> p(4, 1.0);
  const double p_cost = minimal_cost(q, p) + q.offset();
  const bool p_ok = std::abs(p_cost - route_sum) <= 1e-9;

  q.set_bounds(compute_bounds(q, 0));
  RunConfig cfg;
  const ExperimentResult res = run_experiment(q, cfg);
  std::set<std::size_t> starts_hitting;
  for (const auto& s : res.solutions) {
    if (s.solution.bits == ones) starts_hitting.insert(s.start);
  }
  return {optimum_ok && p_ok && !starts_hitting.empty(),
          fmt("brute argmin %s (feasible %d), C(p=1) = %.6f vs sum c = %.6f, optimum sampled in %zu/20 starts",
              bf.argmin.str().c_str(), at_ones.feasible, p_cost, route_sum, starts_hitting.size())};
}

Outcome gradient_check() {
  double worst = 0.0;
  std::size_t compared = 0;
  Rng rng(77);
  for (int i = 0; i < 20; ++i) {
    const RouteSet rs = random_route_set(3, 300 + static_cast<std::uint64_t>(i), 3, 11);
    if (rs.size() != 11) return {false, fmt("configuration %d has n_c = %zu", i, rs.size())};
    const QuboProblem q = build_qubo(rs);
    const CostEvaluator ev(q, Encoding::kMinimal, 4);
    const auto theta = random_theta(rng, ev.parameter_count());
    Rng unused(0);
    const auto chain = ev.gradient(theta, GradientMode::kChainRule, unused);
    const auto fd = oracle::central_differences([&](std::span<const double> t) { return ev.cost(t); }, theta, 1e-5);
    for (std::size_t j = 0; j < theta.size(); ++j) {
      if (std::abs(fd[j]) <= 1e-8) continue;
      worst = std::max(worst, std::abs(chain.gradient[j] - fd[j]) / std::abs(fd[j]));
      ++compared;
    }
  }
  return {worst <= 1e-5, fmt("20 configurations, %zu components, max relative error %.3g", compared, worst)};
}

Outcome estimator_consistency() {
  constexpr std::uint64_t kShots = 1'000'000;
  constexpr std::size_t kSamples = 100'000;
  const RouteSet rs = random_route_set(5, 55, 3, 16);
  const QuboProblem q = build_qubo(rs);
  const MinimalLayout layout(q.size());
  Rng rng(5);
  double worst_z_stats = 0.0, worst_z_cost = 0.0;
  bool ok = true;
  for (int s = 0; s < 10; ++s) {
    const StateVector sv = oracle::random_state(rng, layout.qubits);
    const RegisterStats exact = register_stats_exact(sv, layout);
    const RegisterStats shots = register_stats_from_counts(sample(sv, kShots, rng.next()), layout);
    for (std::size_t k = 0; k < exact.size(); ++k) {
      if (shots.fallback[k]) continue;
      const double var = exact.p[k] * (1 - exact.p[k]) / shots.total[k];
      const double diff = std::abs(shots.p[k] - exact.p[k]);
      if (var == 0.0) {
        ok = ok && diff == 0.0;
        continue;
      }
      worst_z_stats = std::max(worst_z_stats, diff / std::sqrt(var));
    }

    const auto xs = sample_minimal_solutions(exact, kSamples, rng.next());
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& x : xs) {
      const double c = evaluate(q, x, false);
      sum += c;
      sum_sq += c * c;
    }
    const double m = static_cast<double>(kSamples);
    const double mean = sum / m;
    const double se = std::sqrt(std::max(sum_sq / m - mean * mean, 0.0) / m);
    const double target = minimal_cost(q, exact);
    worst_z_cost = std::max(worst_z_cost, std::abs(mean - target) / se);
  }
  ok = ok && worst_z_stats <= 5.0 && worst_z_cost <= 5.0;
  return {ok, fmt("10 states on %d qubits: worst |p_hat - p| = %.2f sigma at 1e6 shots, worst cost gap = %.2f SE "
                  "at 1e5 samples",
                  layout.qubits, worst_z_stats, worst_z_cost)};
}

// Pinned from the observed run: 121/200 minimal and 162/200 full samples were feasible.
constexpr double kPinnedMinimalFeasible = 0.60;
constexpr double kPinnedFullFeasible = 0.80;

Outcome eleven_route_reproduction() {
  const QuboProblem& q = eleven_qubo();
  if (q.size() != 11) return {false, fmt("n_c = %zu", q.size())};
  const CostBounds& b = *q.bounds();
  std::string detail = fmt("C_min %.4f (%s, certified %d); ", b.min, b.argmin.str().c_str(), b.certified);
  bool ok = b.certified;
  for (Encoding enc : {Encoding::kMinimal, Encoding::kFull}) {
    RunConfig cfg;
    cfg.encoding = enc;
    cfg.threads = 0;
    const ExperimentResult res = run_experiment(q, cfg);
    const SampledSolution* best = res.best();
    const double c_norm = best ? *best->solution.normalized_cost : 1.0;
    const double feasible = static_cast<double>(res.feasible_count()) / static_cast<double>(res.solutions.size());
    const bool enc_ok = best && c_norm <= 1e-12 && best->solution.bits == b.argmin;
    const double pin = enc == Encoding::kMinimal ? kPinnedMinimalFeasible : kPinnedFullFeasible;
    ok = ok && enc_ok && feasible >= pin;
    if (enc == Encoding::kMinimal) ok = ok && feasible >= 0.5;
    detail += fmt("%s: best C_norm %.3g, feasible %zu/%zu (pin %.2f); ", std::string(to_string(enc)).c_str(), c_norm,
                  res.feasible_count(), res.solutions.size(), pin);
  }
  return {ok, detail};
}

struct Interval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Paired bootstrap of mean(b - a).
Interval paired_bootstrap(const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed) {
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = b[i] - a[i];
  Rng rng(seed);
  std::vector<double> means;
  for (int rep = 0; rep < 10000; ++rep) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += d[rng.below(n)];
    means.push_back(s / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  double mean = 0.0;
  for (double v : d) mean += v;
  return {mean / static_cast<double>(n), means[249], means[9749]};
}

Outcome shot_noise_ordering() {
  const QuboProblem& q = eleven_qubo();
  const CostEvaluator exact_ev(q, Encoding::kMinimal, 4);
  std::map<std::string, std::vector<double>> finals;
  const std::vector<std::pair<std::string, std::optional<std::uint64_t>>> modes{
      {"exact", std::nullopt}, {"10000", 10000}, {"1000", 1000}};
  for (const auto& [name, shots] : modes) {
    RunConfig cfg;
    cfg.shots = shots;
    for (std::size_t s = 0; s < 20; ++s) {
      const auto trace = run_optimization(q, cfg, start_seed(cfg.seed, s));
      finals[name].push_back(exact_ev.cost(trace.final_theta) + q.offset());
    }
  }
  const Interval e_10k = paired_bootstrap(finals["exact"], finals["10000"], 1);
  const Interval k10_k1 = paired_bootstrap(finals["10000"], finals["1000"], 2);
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  // The ordering holds unless the bootstrap interval places the difference
  // strictly below zero.
  const bool ok = e_10k.hi >= 0.0 && k10_k1.hi >= 0.0;
  return {ok, fmt("mean final cost exact %.3f, 10000 %.3f, 1000 %.3f; 95%% CI of (10000 - exact) [%.3f, %.3f], "
                  "(1000 - 10000) [%.3f, %.3f]",
                  mean(finals["exact"]), mean(finals["10000"]), mean(finals["1000"]), e_10k.lo, e_10k.hi, k10_k1.lo,
                  k10_k1.hi)};
}

Outcome shot_starvation() {
  const RouteSet rs = random_route_set(12, 8, 3, 512);
  QuboProblem q = build_qubo(rs);
  if (q.size() != 512) return {false, fmt("n_c = %zu", q.size())};
  q.set_bounds(compute_bounds(q, 0));
  std::map<std::uint64_t, ExperimentResult> runs;
  for (std::uint64_t shots : {100u, 10000u}) {
    RunConfig cfg;
    cfg.shots = shots;
    runs.emplace(shots, run_experiment(q, cfg));
  }
  const ExperimentResult& starved = runs.at(100);
  std::size_t min_fallback = std::numeric_limits<std::size_t>::max(), iterations = 0;
  for (const auto& t : starved.traces) {
    for (std::size_t f : t.fallback_counts) {
      min_fallback = std::min(min_fallback, f);
      ++iterations;
    }
  }
  const double best_100 = *starved.best()->solution.normalized_cost;
  const double best_10k = *runs.at(10000).best()->solution.normalized_cost;
  const bool ok = starved.qubits == 10 && min_fallback > 0 && best_10k < best_100;
  return {ok, fmt("n_q %d, bounds %s; 100 shots: fewest fallbacks in any of %zu iterations = %zu, best C_norm %.4g; "
                  "10000 shots: best C_norm %.4g",
                  starved.qubits, q.bounds()->method.c_str(), iterations, min_fallback, best_100, best_10k)};
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != cli::kExitOk) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return files;
}

Outcome determinism() {
  // Same commands, same paths, twice; the bundle must not change by a byte.
  const fs::path d = fs::temp_directory_path() / "qvrp_acceptance_determinism";
  std::vector<std::map<std::string, std::string>> snapshots;
  for (int run = 0; run < 2; ++run) {
    fs::remove_all(d);
    fs::create_directories(d);
    const std::string rs = (d / "routes.json").string(), q = (d / "qubo.txt").string();
    const int codes[] = {
        run_cli({"--seed", "2", "generate", "--random", "3", "--max-routes", "11", "-o", rs}),
        run_cli({"qubo", rs, "-o", q}),
        run_cli({"--seed", "2", "solve", rs, "-o", (d / "report").string()}),
        run_cli({"brute", q, "-o", (d / "brute.json").string()}),
        run_cli({"--seed", "2", "baseline", q, "-o", (d / "baseline.csv").string()}),
        run_cli({"plot", (d / "report").string()}),
    };
    for (int c : codes) {
      if (c != cli::kExitOk) return {false, fmt("a command exited with %d", c)};
    }
    snapshots.push_back(directory_bytes(d));
  }
  fs::remove_all(d);
  const auto& a = snapshots[0];
  const auto& b = snapshots[1];
  std::string differing;
  for (const auto& [name, bytes] : a) {
    if (!b.count(name) || b.at(name) != bytes) differing += " " + name;
  }
  const bool ok = a.size() == b.size() && differing.empty() && a.size() >= 12;
  return {ok, fmt("%zu files per run, differing:%s", a.size(), differing.empty() ? " none" : differing.c_str())};
}

template <class F>
double median_ms(int reps, F&& f) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    t.push_back(seconds_since(t0) * 1000.0);
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

Outcome performance() {
  const RouteSet rs16 = random_route_set(6, 16, 2, 16);
  const QuboProblem q16 = build_qubo(rs16);
  const CostEvaluator full(q16, Encoding::kFull, 4);
  Rng rng(10);
  const auto theta16 = random_theta(rng, full.parameter_count());
  volatile double sink = full.cost(theta16);
  const double full_ms = median_ms(7, [&] { sink = full.cost(theta16); });

  const RouteSet rs512 = random_route_set(12, 8, 3, 512);
  const QuboProblem q512 = build_qubo(rs512);
  const CostEvaluator minimal(q512, Encoding::kMinimal, 4);
  const auto theta512 = random_theta(rng, minimal.parameter_count());
  const double grad_ms = median_ms(5, [&] {
    Rng r(1);
    sink = minimal.gradient(theta512, GradientMode::kChainRule, r).at.cost;
  });
  (void)sink;
  const bool ok = full.ansatz().qubits == 16 && minimal.ansatz().qubits == 10 &&
                  minimal.parameter_count() == 40 && full_ms < 50.0 && grad_ms < 2000.0;
  return {ok, fmt("16-qubit full-encoding evaluation %.2f ms (< 50), n_c = 512 cost + chain-rule gradient %.2f ms "
                  "(< 2000)",
                  full_ms, grad_ms)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"QUBO equivalence", qubo_equivalence},
      {"qubit counts", qubit_counts},
      {"partition toy optimum", partition_toy},
      {"chain-rule gradient", gradient_check},
      {"estimator consistency", estimator_consistency},
      {"11-route reproduction", eleven_route_reproduction},
      {"shot-noise ordering", shot_noise_ordering},
      {"shot starvation", shot_starvation},
      {"determinism", determinism},
      {"performance", performance},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2d %-24s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
