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

#include "qvrp_cli/commands.h"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "qvrp/encodings.h"
#include "qvrp/io.h"
#include "qvrp/optimize.h"
#include "qvrp/qubo.h"
#include "qvrp/rng.h"
#include "qvrp/vrptw.h"
#include "qvrp_cli/plot.h"
#include "qvrp_cli/report.h"

#ifndef QVRP_VERSION
#define QVRP_VERSION "unknown"
#endif

namespace qvrp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string format = "json";
};

// Command summary printed to stdout as a JSON object or key,value rows.
void print_summary(std::ostream& out, const ordered_json& doc, const std::string& format) {
  if (format == "json") {
    out << doc.dump(2) << "\n";
    return;
  }
  out << "key,value\n";
  for (const auto& [key, value] : doc.items()) {
    std::string cell = value.is_string() ? value.get<std::string>() : value.dump();
    if (cell.find(',') != std::string::npos) cell = "\"" + cell + "\"";
    out << key << "," << cell << "\n";
  }
}

bool looks_like_json(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

struct Problem {
  QuboProblem qubo;
  std::optional<RouteSet> routes;
};

// Route-set JSON is compiled with the default penalty; QUBO text is read as is.
Problem load_problem(const std::string& path, std::optional<double> penalty, std::optional<int> vehicles) {
  const std::string text = read_file(path);
  if (looks_like_json(text)) {
    RouteSet rs = route_set_from_json(text, path);
    if (!vehicles) vehicles = rs.vehicle_count;
    QuboProblem q = build_qubo(rs, penalty, vehicles);
    return {std::move(q), std::move(rs)};
  }
  if (penalty || vehicles) throw std::invalid_argument("--penalty and --vehicles need a route-set input");
  try {
    return {read_qubo(text), std::nullopt};
  } catch (const QuboError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

ordered_json bounds_json(const CostBounds& b) {
  return {{"min", b.min},
          {"max", b.max},
          {"certified", b.certified},
          {"method", b.method},
          {"argmin", b.argmin.str()},
          {"argmax", b.argmax.str()}};
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string instance;
  int random_customers = 0;
  double arc_density = 1.0;
  double window_width = 0.0;
  int max_stops = 0;
  std::size_t max_routes = std::numeric_limits<std::size_t>::max();
  std::optional<int> vehicles;
  std::string out;
  std::string instance_out;
};

int cmd_generate(const GenerateArgs& a, const Globals& g, std::ostream& out) {
  if (a.instance.empty() == (a.random_customers == 0)) {
    throw std::invalid_argument("give either an instance file or --random N");
  }
  std::shared_ptr<const VrptwInstance> instance;
  if (!a.instance.empty()) {
    instance = std::make_shared<const VrptwInstance>(instance_from_json(read_file(a.instance), a.instance));
  } else {
    InstanceSpec spec;
    spec.customers = a.random_customers;
    spec.seed = g.seed;
    spec.arc_density = a.arc_density;
    spec.window_width = a.window_width;
    instance = std::make_shared<const VrptwInstance>(random_instance(spec));
  }
  if (!a.instance_out.empty()) write_file_atomic(a.instance_out, instance_to_json(*instance));

  RouteGenConfig cfg;
  cfg.max_stops = a.max_stops > 0 ? a.max_stops : std::max(instance->customer_count(), 1);
  cfg.max_routes = a.max_routes;
  cfg.seed = g.seed;
  RouteSet routes = generate_routes(instance, cfg);
  routes.vehicle_count = a.vehicles;
  write_file_atomic(a.out, route_set_to_json(routes, g.seed));

  std::vector<int> coverage(static_cast<std::size_t>(instance->customer_count()), 0);
  for (const Route& r : routes.routes()) {
    for (NodeId c : r.coverage) ++coverage[static_cast<std::size_t>(c - 1)];
  }
  std::vector<int> uncovered;
  for (std::size_t i = 0; i < coverage.size(); ++i) {
    if (coverage[i] == 0) uncovered.push_back(static_cast<int>(i + 1));
  }
  ordered_json doc;
  doc["n_c"] = routes.size();
  doc["customers"] = instance->customer_count();
  doc["routes_per_customer"] = coverage;
  doc["uncovered_customers"] = uncovered;
  doc["qubits_minimal"] = qubits_required(routes.size(), Encoding::kMinimal);
  doc["out"] = a.out;
  print_summary(out, doc, g.format);
  return kExitOk;
}

// -------------------------------------------------------------------- qubo

struct QuboArgs {
  std::string input;
  std::optional<double> penalty;
  std::optional<int> vehicles;
  std::string out;
};

int cmd_qubo(const QuboArgs& a, const Globals& g, std::ostream& out) {
  const Problem p = load_problem(a.input, a.penalty, a.vehicles);
  write_file_atomic(a.out, write_qubo(p.qubo));
  ordered_json doc;
  doc["n_c"] = p.qubo.size();
  doc["penalty"] = p.qubo.penalty();
  doc["offset"] = p.qubo.offset();
  doc["qubits_minimal"] = qubits_required(p.qubo.size(), Encoding::kMinimal);
  doc["qubits_full"] = qubits_required(p.qubo.size(), Encoding::kFull);
  doc["out"] = a.out;
  print_summary(out, doc, g.format);
  return kExitOk;
}

// ------------------------------------------------------------------- brute

int cmd_brute(const std::string& input, const std::string& out_path, const Globals& g, std::ostream& out) {
  const Problem p = load_problem(input, std::nullopt, std::nullopt);
  const BruteForceResult bf = brute_force(p.qubo);
  const EvaluatedSolution best = check_feasibility(p.qubo, bf.argmin);
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["n_c"] = p.qubo.size();
  doc["min"] = bf.min;
  doc["argmin"] = bf.argmin.str();
  doc["argmin_feasible"] = best.feasible;
  doc["max"] = bf.max;
  doc["argmax"] = bf.argmax.str();
  if (!out_path.empty()) write_file_atomic(out_path, doc.dump(2) + "\n");
  print_summary(out, doc, g.format);
  return kExitOk;
}

// ---------------------------------------------------------------- baseline

int cmd_baseline(const std::string& input, std::size_t samples, const std::string& out_path, const Globals& g,
                 std::ostream& out) {
  const Problem p = load_problem(input, std::nullopt, std::nullopt);
  const CostBounds bounds = compute_bounds(p.qubo, g.seed);
  const auto values = random_baseline(p.qubo, bounds, samples, g.seed);
  const CdfSeries series{"random_baseline", empirical_cdf(values)};
  write_file_atomic(out_path, cumulative_csv(std::span(&series, 1)));
  double mean = 0.0;
  for (double v : values) mean += v;
  ordered_json doc;
  doc["samples"] = samples;
  doc["mean_c_norm"] = values.empty() ? 0.0 : mean / static_cast<double>(values.size());
  doc["bounds"] = bounds_json(bounds);
  doc["out"] = out_path;
  print_summary(out, doc, g.format);
  return kExitOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string input;
  std::string out_dir;
  std::string encoding = "minimal";
  std::optional<std::uint64_t> shots;
  std::size_t starts = 20;
  std::size_t samples = 10;
  std::size_t iterations = 500;
  int layers = 4;
  double lr = 0.01;
  std::optional<std::string> gradient;
  bool no_crn = false;
  std::optional<double> plateau_tolerance;
  std::size_t plateau_window = 50;
  std::optional<double> penalty;
  std::optional<int> vehicles;
  std::size_t baseline_samples = 10000;
  std::size_t anneal_sweeps = AnnealSchedule{}.sweeps;
  std::size_t anneal_restarts = AnnealSchedule{}.restarts;
};

inline constexpr std::size_t kBruteSeriesCap = 20;

ordered_json fallback_summary(const ExperimentResult& r) {
  std::size_t total = 0, with_fallback = 0;
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  for (const auto& t : r.traces) {
    for (std::size_t f : t.fallback_counts) {
      ++total;
      with_fallback += f > 0;
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  std::vector<std::size_t> final_counts;
  for (const auto& s : r.final_stats) final_counts.push_back(s.fallback_count());
  return {{"iterations", total},
          {"iterations_with_fallback", with_fallback},
          {"min_per_iteration", total ? lo : 0},
          {"max_per_iteration", hi},
          {"final_state", final_counts}};
}

int cmd_solve(const SolveArgs& a, const Globals& g, std::ostream& out) {
  Problem p = load_problem(a.input, a.penalty, a.vehicles);
  QuboProblem& q = p.qubo;

  RunConfig cfg;
  cfg.encoding = parse_encoding(a.encoding);
  cfg.layers = a.layers;
  cfg.n_starts = a.starts;
  cfg.samples_per_start = a.samples;
  cfg.shots = a.shots;
  cfg.max_iterations = a.iterations;
  cfg.seed = g.seed;
  if (a.gradient) cfg.gradient_mode = parse_gradient_mode(*a.gradient);
  cfg.adam.lr = a.lr;
  cfg.common_random_numbers = !a.no_crn;
  cfg.plateau_tolerance = a.plateau_tolerance;
  cfg.plateau_window = a.plateau_window;
  cfg.threads = g.threads;

  AnnealSchedule schedule;
  schedule.sweeps = a.anneal_sweeps;
  schedule.restarts = a.anneal_restarts;
  q.set_bounds(compute_bounds(q, g.seed, kBruteForceCap, schedule));
  const CostBounds bounds = *q.bounds();

  const ExperimentResult result = run_experiment(q, cfg);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_file_atomic(dir / "experiment.json", experiment_to_json(result));
  write_file_atomic(dir / "convergence.csv", convergence_csv(result, q.offset()));
  write_file_atomic(dir / "solutions.csv", solutions_csv(result));
  if (!result.final_stats.empty()) write_file_atomic(dir / "register_stats.txt", register_stats_report(result));

  std::vector<CdfSeries> series;
  const bool normalizable = bounds.max > bounds.min;
  if (normalizable) {
    std::vector<double> sampled;
    for (const auto& s : result.solutions) sampled.push_back(*s.solution.normalized_cost);
    series.push_back({"experiment", empirical_cdf(std::move(sampled))});
    if (bounds.certified && q.size() <= kBruteSeriesCap) {
      series.push_back({"brute_force", empirical_cdf(all_normalized_costs(q, bounds))});
    }
    if (a.baseline_samples > 0) {
      series.push_back({"random_baseline", empirical_cdf(random_baseline(q, bounds, a.baseline_samples, g.seed))});
    }
  }
  write_file_atomic(dir / "cumulative.csv", cumulative_csv(series));

  const SampledSolution* best = result.best();
  ordered_json best_json = nullptr;
  if (best) {
    best_json = {{"start_id", best->start},
                 {"sample_id", best->sample},
                 {"bits", best->solution.bits.str()},
                 {"cost", best->solution.cost},
                 {"c_norm", best->solution.normalized_cost ? ordered_json(*best->solution.normalized_cost)
                                                           : ordered_json(nullptr)},
                 {"feasible", best->solution.feasible}};
  }

  ordered_json meta;
  meta["schema_version"] = kReportSchemaVersion;
  meta["tool"] = {{"name", "qvrp"}, {"version", QVRP_VERSION}};
  meta["input"] = a.input;
  meta["rng"] = {{"name", Rng::kName}, {"version", Rng::kVersion}};
  meta["seed"] = g.seed;
  meta["n_c"] = q.size();
  meta["penalty"] = q.penalty();
  meta["offset"] = q.offset();
  meta["vehicles"] = q.vehicle_count() ? ordered_json(*q.vehicle_count()) : ordered_json(nullptr);
  meta["encoding"] = to_string(cfg.encoding);
  meta["n_q"] = result.qubits;
  meta["layers"] = cfg.layers;
  meta["shots"] = cfg.shots ? ordered_json(*cfg.shots) : ordered_json("exact");
  meta["starts"] = cfg.n_starts;
  meta["samples_per_start"] = cfg.samples_per_start;
  meta["max_iterations"] = cfg.max_iterations;
  meta["gradient_mode"] = to_string(cfg.resolved_gradient_mode());
  meta["common_random_numbers"] = cfg.common_random_numbers;
  meta["adam"] = {{"lr", cfg.adam.lr}, {"beta1", cfg.adam.beta1}, {"beta2", cfg.adam.beta2}, {"eps", cfg.adam.eps}};
  meta["bounds"] = bounds_json(bounds);
  if (!bounds.certified) meta["bounds"]["anneal"] = {{"sweeps", schedule.sweeps}, {"restarts", schedule.restarts}};
  meta["fallback"] = fallback_summary(result);
  meta["cumulative_sources"] = [&] {
    ordered_json names = ordered_json::array();
    for (const auto& s : series) names.push_back(s.source);
    return names;
  }();
  meta["baseline_samples"] = a.baseline_samples;
  meta["solutions"] = result.solutions.size();
  meta["feasible_solutions"] = result.feasible_count();
  meta["best"] = best_json;
  write_file_atomic(dir / "metadata.json", meta.dump(2) + "\n");

  ordered_json doc;
  doc["n_c"] = q.size();
  doc["encoding"] = to_string(cfg.encoding);
  doc["n_q"] = result.qubits;
  doc["bounds_method"] = bounds.method;
  doc["solutions"] = result.solutions.size();
  doc["feasible_solutions"] = result.feasible_count();
  doc["best"] = best_json;
  doc["out"] = a.out_dir;
  print_summary(out, doc, g.format);
  return result.feasible_count() > 0 ? kExitOk : kExitInfeasible;
}

// -------------------------------------------------------------------- plot

int cmd_plot(const std::string& report_dir, std::string out_dir, const Globals& g, std::ostream& out) {
  const fs::path dir(report_dir);
  if (out_dir.empty()) out_dir = report_dir;
  const CsvTable convergence = read_csv(dir / "convergence.csv");
  const CsvTable cumulative = read_csv(dir / "cumulative.csv");
  const CsvTable solutions = read_csv(dir / "solutions.csv");
  fs::create_directories(out_dir);
  const fs::path odir(out_dir);
  write_file_atomic(odir / "convergence.svg", convergence_svg(convergence));
  write_file_atomic(odir / "cumulative.svg", cumulative_svg(cumulative));
  write_file_atomic(odir / "solutions.svg", solutions_svg(solutions));
  ordered_json doc;
  doc["written"] = {(odir / "convergence.svg").string(), (odir / "cumulative.svg").string(),
                    (odir / "solutions.svg").string()};
  print_summary(out, doc, g.format);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Route-based VRPTW solved with a variational statevector simulator", "qvrp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", QVRP_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for independent starts, 0 = all cores")
      ->capture_default_str();
  app.add_option("--format", g.format, "Summary format on stdout")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Enumerate feasible routes of an instance");
  generate->add_option("instance", gen.instance, "Instance JSON file");
  generate->add_option("--random", gen.random_customers, "Use a random instance with N customers")
      ->check(CLI::PositiveNumber);
  generate->add_option("--arc-density", gen.arc_density, "Customer arc probability for --random")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--window-width", gen.window_width, "Customer window width for --random, 0 = unbounded");
  generate->add_option("--max-stops", gen.max_stops, "Customers per route, 0 = no limit");
  generate->add_option("--max-routes", gen.max_routes, "Route count cap")->check(CLI::PositiveNumber);
  generate->add_option("--vehicles", gen.vehicles, "Fleet size recorded with the route set");
  generate->add_option("--instance-out", gen.instance_out, "Also write the instance JSON");
  generate->add_option("-o,--out", gen.out, "Route-set JSON output")->required();

  QuboArgs qa;
  auto* qubo = app.add_subcommand("qubo", "Compile a route set into a QUBO text file");
  qubo->add_option("routes", qa.input, "Route-set JSON file")->required();
  qubo->add_option("--penalty", qa.penalty, "Penalty weight, default sum of |route cost|");
  qubo->add_option("--vehicles", qa.vehicles, "Add the fixed fleet-size term");
  qubo->add_option("-o,--out", qa.out, "QUBO output")->required();

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Run the variational experiment and write a report bundle");
  solve->add_option("input", sa.input, "Route-set JSON or QUBO text file")->required();
  solve->add_option("-o,--out", sa.out_dir, "Report directory")->required();
  solve->add_option("--encoding", sa.encoding)->check(CLI::IsMember({"minimal", "full"}))->capture_default_str();
  solve->add_option("--shots", sa.shots, "Shots per circuit evaluation, default exact probabilities")
      ->check(CLI::PositiveNumber);
  solve->add_option("--starts", sa.starts)->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--samples", sa.samples, "Solutions sampled per start")->capture_default_str();
  solve->add_option("--iters", sa.iterations)->capture_default_str();
  solve->add_option("--layers", sa.layers)->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--lr", sa.lr, "ADAM learning rate")->capture_default_str();
  solve->add_option("--gradient", sa.gradient, "chain_rule or naive_shift")
      ->check(CLI::IsMember({"chain_rule", "naive_shift"}));
  solve->add_flag("--no-crn", sa.no_crn, "Independent shot seeds for the two shifted evaluations");
  solve->add_option("--plateau-tol", sa.plateau_tolerance, "Stop when the cost change stays below this");
  solve->add_option("--plateau-window", sa.plateau_window)->capture_default_str();
  solve->add_option("--penalty", sa.penalty);
  solve->add_option("--vehicles", sa.vehicles);
  solve->add_option("--baseline-samples", sa.baseline_samples, "Random bitstrings in cumulative.csv")
      ->capture_default_str();
  solve->add_option("--anneal-sweeps", sa.anneal_sweeps, "Bounds search above the brute-force cap")
      ->capture_default_str();
  solve->add_option("--anneal-restarts", sa.anneal_restarts)->capture_default_str();

  std::string baseline_input, baseline_out;
  std::size_t baseline_samples = 10000;
  auto* baseline = app.add_subcommand("baseline", "CDF of uniformly random solutions");
  baseline->add_option("input", baseline_input, "Route-set JSON or QUBO text file")->required();
  baseline->add_option("--samples", baseline_samples)->capture_default_str();
  baseline->add_option("-o,--out", baseline_out, "CSV output")->required();

  std::string plot_dir, plot_out;
  auto* plot = app.add_subcommand("plot", "Render SVG charts from a report bundle");
  plot->add_option("report", plot_dir, "Report directory")->required();
  plot->add_option("-o,--out", plot_out, "SVG directory, default the report directory");

  std::string brute_input, brute_out;
  auto* brute = app.add_subcommand("brute", "Exhaustive minimum and maximum of a QUBO");
  brute->add_option("input", brute_input, "Route-set JSON or QUBO text file")->required();
  brute->add_option("-o,--out", brute_out, "Also write the result as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, g, out);
    if (qubo->parsed()) return cmd_qubo(qa, g, out);
    if (solve->parsed()) return cmd_solve(sa, g, out);
    if (baseline->parsed()) return cmd_baseline(baseline_input, baseline_samples, baseline_out, g, out);
    if (plot->parsed()) return cmd_plot(plot_dir, plot_out, g, out);
    if (brute->parsed()) return cmd_brute(brute_input, brute_out, g, out);
  } catch (const std::exception& e) {
    err << "qvrp: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace qvrp::cli
