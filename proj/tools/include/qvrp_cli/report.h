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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qvrp/optimize.h"
#include "qvrp/qubo.h"

namespace qvrp::cli {

inline constexpr int kReportSchemaVersion = 1;

/// Shortest text that parses back to the same double.
std::string format_number(double v);

struct CdfPoint {
  double value = 0.0;
  double cdf = 0.0;
};

/// Empirical CDF as one step per distinct value: P(X <= value).
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);

struct CdfSeries {
  std::string source;
  std::vector<CdfPoint> points;
};

/// Rows `source,c_norm,cdf` after a `# schema_version` comment line.
std::string cumulative_csv(std::span<const CdfSeries> series);

/// Rows `iteration,start_id,cost,c_norm,fallback_count`. Costs include the
/// QUBO offset so that c_norm follows from cost and the bounds.
std::string convergence_csv(const ExperimentResult& result, double offset);

/// Rows `start_id,sample_id,bits,cost,c_norm,feasible`.
std::string solutions_csv(const ExperimentResult& result);

/// Per-start register statistics, separated by `# start <i>` lines.
std::string register_stats_report(const ExperimentResult& result);

/// Normalized costs of uniformly random bitstrings.
std::vector<double> random_baseline(const QuboProblem& qubo, const CostBounds& bounds, std::size_t samples,
                                    std::uint64_t seed);

/// Normalized cost of every bitstring; needs a certified range.
std::vector<double> all_normalized_costs(const QuboProblem& qubo, const CostBounds& bounds);

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// Reads a CSV written by this tool; `#` lines are skipped. Throws
/// qvrp::ParseError naming the file when it is missing, empty or ragged.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace qvrp::cli
