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

#include "qvrp_cli/report.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qvrp/encodings.h"
#include "qvrp/io.h"
#include "qvrp/rng.h"

namespace qvrp::cli {
namespace {

constexpr std::uint64_t kBaselineStream = 4;

std::string schema_line() { return "# schema_version " + std::to_string(kReportSchemaVersion) + "\n"; }

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

std::string cumulative_csv(std::span<const CdfSeries> series) {
  std::string s = schema_line() + "source,c_norm,cdf\n";
  for (const auto& ser : series) {
    for (const auto& p : ser.points) s += ser.source + "," + format_number(p.value) + "," + format_number(p.cdf) + "\n";
  }
  return s;
}

std::string convergence_csv(const ExperimentResult& result, double offset) {
  std::string s = schema_line() + "iteration,start_id,cost,c_norm,fallback_count\n";
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    const auto& t = result.traces[i];
    for (std::size_t it = 0; it < t.iterations(); ++it) {
      s += std::to_string(it) + "," + std::to_string(i) + "," + format_number(t.costs[it] + offset) + ",";
      if (it < t.normalized_costs.size()) s += format_number(t.normalized_costs[it]);
      s += "," + std::to_string(t.fallback_counts[it]) + "\n";
    }
  }
  return s;
}

std::string solutions_csv(const ExperimentResult& result) {
  std::string s = schema_line() + "start_id,sample_id,bits,cost,c_norm,feasible\n";
  for (const auto& row : result.solutions) {
    const auto& sol = row.solution;
    s += std::to_string(row.start) + "," + std::to_string(row.sample) + "," + sol.bits.str() + "," +
         format_number(sol.cost) + ",";
    if (sol.normalized_cost) s += format_number(*sol.normalized_cost);
    s += sol.feasible ? ",1\n" : ",0\n";
  }
  return s;
}

std::string register_stats_report(const ExperimentResult& result) {
  std::string s;
  for (std::size_t i = 0; i < result.final_stats.size(); ++i) {
    s += "# start " + std::to_string(i) + "\n" + write_register_stats(result.final_stats[i]);
  }
  return s;
}

std::vector<double> random_baseline(const QuboProblem& qubo, const CostBounds& bounds, std::size_t samples,
                                    std::uint64_t seed) {
  Rng rng(derive_seed(seed, kBaselineStream));
  std::vector<double> out;
  out.reserve(samples);
  Bitstring x(qubo.size());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = static_cast<std::uint8_t>(rng.next() >> 63);
    out.push_back(normalize_cost(evaluate(qubo, x, true), bounds.min, bounds.max));
  }
  return out;
}

std::vector<double> all_normalized_costs(const QuboProblem& qubo, const CostBounds& bounds) {
  std::vector<double> out;
  out.reserve(std::size_t{1} << qubo.size());
  enumerate_costs(qubo, [&](std::uint64_t, double c) { out.push_back(normalize_cost(c, bounds.min, bounds.max)); });
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError(path + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path) {
  CsvTable t;
  t.path = path.string();
  std::ifstream in(path);
  if (!in) throw ParseError(t.path + ": cannot open file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_row(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError(t.path + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                       " fields, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.rows.empty()) throw ParseError(t.path + ": no data rows");
  return t;
}

}  // namespace qvrp::cli
