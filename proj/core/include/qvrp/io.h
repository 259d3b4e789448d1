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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "qvrp/vrptw.h"

namespace qvrp {

/// Malformed or unreadable input file. Messages carry the file name and, for
/// syntax errors, the line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kFileSchemaVersion = 1;

/// Instance document:
///   {"schema_version": 1, "name": ...,
///    "nodes": [{"id", "open", "close" (number or "inf")}],
///    "arcs": [{"from", "to", "cost", "time"}]}
std::string instance_to_json(const VrptwInstance& instance);
VrptwInstance instance_from_json(const std::string& text, const std::string& source = "<instance>");

/// Route-set document: the embedded instance, its name, the generation seed
/// and the routes as node-id sequences. Loading re-validates every route.
std::string route_set_to_json(const RouteSet& routes, std::optional<std::uint64_t> seed = std::nullopt);
RouteSet route_set_from_json(const std::string& text, const std::string& source = "<route set>");

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace qvrp
