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

#include "qvrp/io.h"

#include <fstream>
#include <memory>
#include <sstream>
#include <system_error>
#include <vector>

#include "json.hpp"

namespace qvrp {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

void check_schema(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source + ": expected a JSON object");
  const auto it = doc.find("schema_version");
  if (it == doc.end() || !it->is_number_integer() || it->get<int>() != kFileSchemaVersion) {
    throw ParseError(source + ": missing or unsupported schema_version");
  }
}

ordered_json instance_document(const VrptwInstance& instance) {
  ordered_json doc;
  doc["schema_version"] = kFileSchemaVersion;
  doc["name"] = instance.name();
  ordered_json nodes = ordered_json::array();
  for (const Node& n : instance.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"open", n.window_open},
                     {"close", n.window_close == kUnbounded ? ordered_json("inf") : ordered_json(n.window_close)}});
  }
  ordered_json arcs = ordered_json::array();
  for (const Arc& a : instance.arcs()) {
    arcs.push_back({{"from", a.from}, {"to", a.to}, {"cost", a.cost}, {"time", a.travel_time}});
  }
  doc["nodes"] = std::move(nodes);
  doc["arcs"] = std::move(arcs);
  return doc;
}

VrptwInstance instance_from_document(const json& doc, const std::string& source) {
  check_schema(doc, source);
  try {
    std::vector<Node> nodes;
    for (const auto& n : doc.at("nodes")) {
      Node node;
      node.id = n.at("id").get<int>();
      node.window_open = n.at("open").get<double>();
      const auto& close = n.at("close");
      if (close.is_string()) {
        if (close.get<std::string>() != "inf") throw ParseError(source + ": close must be a number or \"inf\"");
        node.window_close = kUnbounded;
      } else {
        node.window_close = close.get<double>();
      }
      nodes.push_back(node);
    }
    std::vector<Arc> arcs;
    for (const auto& a : doc.at("arcs")) {
      arcs.push_back({a.at("from").get<int>(), a.at("to").get<int>(), a.at("cost").get<double>(),
                      a.at("time").get<double>()});
    }
    return VrptwInstance(doc.value("name", std::string("unnamed")), std::move(nodes), std::move(arcs));
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const InstanceError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

}  // namespace

std::string instance_to_json(const VrptwInstance& instance) { return instance_document(instance).dump(2) + "\n"; }

VrptwInstance instance_from_json(const std::string& text, const std::string& source) {
  return instance_from_document(parse_json(text, source), source);
}

std::string route_set_to_json(const RouteSet& routes, std::optional<std::uint64_t> seed) {
  ordered_json doc;
  doc["schema_version"] = kFileSchemaVersion;
  doc["instance_name"] = routes.instance().name();
  doc["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  doc["vehicles"] = routes.vehicle_count ? ordered_json(*routes.vehicle_count) : ordered_json(nullptr);
  ordered_json list = ordered_json::array();
  for (const Route& r : routes.routes()) list.push_back(r.sequence);
  doc["routes"] = std::move(list);
  doc["instance"] = instance_document(routes.instance());
  return doc.dump(2) + "\n";
}

RouteSet route_set_from_json(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  check_schema(doc, source);
  try {
    auto instance = std::make_shared<const VrptwInstance>(instance_from_document(doc.at("instance"), source));
    if (doc.contains("instance_name") && doc.at("instance_name").get<std::string>() != instance->name()) {
      throw ParseError(source + ": instance_name does not match the embedded instance");
    }
    std::vector<Route> routes;
    for (const auto& seq : doc.at("routes")) {
      Route r;
      r.sequence = seq.get<std::vector<NodeId>>();
      routes.push_back(std::move(r));
    }
    RouteSet set(std::move(instance), std::move(routes));
    if (doc.contains("vehicles") && !doc.at("vehicles").is_null()) set.vehicle_count = doc.at("vehicles").get<int>();
    return set;
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const RouteError& e) {
    throw ParseError(source + ": invalid route: " + e.what());
  } catch (const InstanceError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace qvrp
