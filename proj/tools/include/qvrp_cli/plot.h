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

#include <string>

#include "qvrp_cli/report.h"

namespace qvrp::cli {

/// Best-so-far C_norm per iteration, one polyline per start.
std::string convergence_svg(const CsvTable& convergence);

/// Step plot of every CDF series in cumulative.csv.
std::string cumulative_svg(const CsvTable& cumulative);

/// Scatter of sampled C_norm against start id, feasible samples filled.
std::string solutions_svg(const CsvTable& solutions);

}  // namespace qvrp::cli
