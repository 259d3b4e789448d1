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

#include "qvrp/vrptw.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "qvrp/rng.h"

namespace qvrp {

VrptwInstance::VrptwInstance(std::string name, std::vector<Node> nodes, std::vector<Arc> arcs)
    : name_(std::move(name)), nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
  if (nodes_.empty()) throw InstanceError("instance has no depot");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.id != static_cast<NodeId>(i)) {
      throw InstanceError("node ids must be contiguous from 0; found " + std::to_string(n.id) +
                          " at position " + std::to_string(i));
    }
    if (!(n.window_open >= 0.0) || !(n.window_close >= n.window_open)) {
      throw InstanceError("node " + std::to_string(n.id) + " has an invalid time window");
    }
  }
  if (nodes_[kDepot].window_open != 0.0 || nodes_[kDepot].window_close != kUnbounded) {
    throw InstanceError("depot window must be [0, inf)");
  }

  const std::size_t n = nodes_.size();
  arc_index_.assign(n * n, -1);
  outgoing_.assign(n, {});
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    const Arc& arc = arcs_[a];
    if (!has_node(arc.from) || !has_node(arc.to)) {
      throw InstanceError("arc (" + std::to_string(arc.from) + ", " + std::to_string(arc.to) +
                          ") references a missing node");
    }
    if (arc.from == arc.to && arc.from != kDepot) {
      throw InstanceError("self-loop on customer " + std::to_string(arc.from));
    }
    if (!(arc.travel_time >= 0.0) || !std::isfinite(arc.cost)) {
      throw InstanceError("arc (" + std::to_string(arc.from) + ", " + std::to_string(arc.to) +
                          ") has invalid cost or travel time");
    }
    auto& slot = arc_index_[static_cast<std::size_t>(arc.from) * n + static_cast<std::size_t>(arc.to)];
    if (slot >= 0) {
      throw InstanceError("duplicate arc (" + std::to_string(arc.from) + ", " +
                          std::to_string(arc.to) + ")");
    }
    slot = static_cast<std::ptrdiff_t>(a);
    outgoing_[static_cast<std::size_t>(arc.from)].push_back(a);
  }
  for (auto& out : outgoing_) {
    std::sort(out.begin(), out.end(), [this](std::size_t l, std::size_t r) {
      const Arc& a = arcs_[l];
      const Arc& b = arcs_[r];
      return a.cost != b.cost ? a.cost < b.cost : a.to < b.to;
    });
  }
}

const Arc* VrptwInstance::find_arc(NodeId from, NodeId to) const noexcept {
  if (!has_node(from) || !has_node(to)) return nullptr;
  const auto idx = arc_index_[static_cast<std::size_t>(from) * nodes_.size() + static_cast<std::size_t>(to)];
  return idx < 0 ? nullptr : &arcs_[static_cast<std::size_t>(idx)];
}

std::span<const std::size_t> VrptwInstance::outgoing(NodeId from) const noexcept {
  if (!has_node(from)) return {};
  return outgoing_[static_cast<std::size_t>(from)];
}

bool Route::covers(NodeId id) const noexcept {
  return std::binary_search(coverage.begin(), coverage.end(), id);
}

std::string RouteViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kMissingArc:
      os << "missing arc leaving position " << position;
      break;
    case Kind::kWindowViolation:
      os << "arrival " << arrival << " at position " << position << " exceeds window close "
         << window_close;
      break;
    case Kind::kBadEndpoints:
      os << "route must start and end at the depot";
      break;
    case Kind::kDuplicateNode:
      os << "customer repeated at position " << position;
      break;
  }
  return os.str();
}

RouteError::RouteError(RouteViolation violation)
    : std::runtime_error(violation.describe()), violation_(violation) {}

std::variant<Route, RouteViolation> validate_route(const VrptwInstance& instance,
                                                   std::span<const NodeId> sequence) {
  using Kind = RouteViolation::Kind;
  if (sequence.size() < 2 || sequence.front() != kDepot || sequence.back() != kDepot) {
    return RouteViolation{Kind::kBadEndpoints};
  }

  Route route;
  route.sequence.assign(sequence.begin(), sequence.end());
  route.arrival_times.reserve(sequence.size());
  route.arrival_times.push_back(0.0);

  std::vector<bool> seen(instance.nodes().size(), false);
  double time = 0.0;
  for (std::size_t p = 0; p + 1 < sequence.size(); ++p) {
    const NodeId next = sequence[p + 1];
    const Arc* arc = instance.find_arc(sequence[p], next);
    if (arc == nullptr) return RouteViolation{Kind::kMissingArc, p};
    if (next != kDepot) {
      if (seen[static_cast<std::size_t>(next)]) return RouteViolation{Kind::kDuplicateNode, p + 1};
      seen[static_cast<std::size_t>(next)] = true;
      route.coverage.push_back(next);
    }
    const Node& node = instance.node(next);
    time = std::max(node.window_open, time + arc->travel_time);
    if (time > node.window_close) {
      return RouteViolation{Kind::kWindowViolation, p + 1, time, node.window_close};
    }
    route.cost += arc->cost;
    route.arrival_times.push_back(time);
  }
  std::sort(route.coverage.begin(), route.coverage.end());
  return route;
}

Route require_route(const VrptwInstance& instance, std::span<const NodeId> sequence) {
  auto result = validate_route(instance, sequence);
  if (auto* v = std::get_if<RouteViolation>(&result)) throw RouteError(*v);
  return std::get<Route>(std::move(result));
}

double route_cost(const VrptwInstance& instance, std::span<const NodeId> sequence) {
  double cost = 0.0;
  for (std::size_t p = 0; p + 1 < sequence.size(); ++p) {
    const Arc* arc = instance.find_arc(sequence[p], sequence[p + 1]);
    if (arc == nullptr) {
      throw RouteError(RouteViolation{RouteViolation::Kind::kMissingArc, p});
    }
    cost += arc->cost;
  }
  return cost;
}

std::uint64_t max_routes(int customers) {
  if (customers < 0) throw std::invalid_argument("customer count must be non-negative");
  std::uint64_t total = 0;
  std::uint64_t term = 1;
  for (int i = 1; i <= customers; ++i) {
    // term = N! / (N - i)!
    if (__builtin_mul_overflow(term, static_cast<std::uint64_t>(customers - i + 1), &term) ||
        __builtin_add_overflow(total, term, &total)) {
      throw OverflowError("route count for " + std::to_string(customers) +
                          " customers exceeds 64 bits");
    }
  }
  return total;
}

RouteSet::RouteSet(std::shared_ptr<const VrptwInstance> instance, std::vector<Route> routes)
    : instance_(std::move(instance)), routes_(std::move(routes)) {
  if (!instance_) throw InstanceError("route set without instance");
  for (std::size_t r = 0; r < routes_.size(); ++r) {
    Route checked = require_route(*instance_, routes_[r].sequence);
    if (checked.coverage.empty()) {
      throw InstanceError("route " + std::to_string(r) + " visits no customer");
    }
    routes_[r] = std::move(checked);
  }
}

namespace {

class RouteEnumerator {
 public:
  RouteEnumerator(const VrptwInstance& instance, const RouteGenConfig& config)
      : instance_(instance), config_(config), visited_(instance.nodes().size(), false) {}

  std::vector<Route> run() {
    path_.push_back(kDepot);
    times_.push_back(0.0);
    extend(kDepot, 0.0, 0.0);
    return std::move(out_);
  }

 private:
  bool full() const noexcept { return out_.size() >= config_.max_routes; }

  void extend(NodeId at, double time, double cost) {
    for (std::size_t a : instance_.outgoing(at)) {
      if (full()) return;
      const Arc& arc = instance_.arcs()[a];
      if (arc.to == kDepot || visited_[static_cast<std::size_t>(arc.to)]) continue;
      const Node& node = instance_.node(arc.to);
      const double arrival = std::max(node.window_open, time + arc.travel_time);
      if (arrival > node.window_close) continue;

      visited_[static_cast<std::size_t>(arc.to)] = true;
      path_.push_back(arc.to);
      times_.push_back(arrival);
      coverage_.push_back(arc.to);
      const double reached = cost + arc.cost;

      if (const Arc* home = instance_.find_arc(arc.to, kDepot)) emit(*home, arrival, reached);
      if (static_cast<int>(coverage_.size()) < config_.max_stops) extend(arc.to, arrival, reached);

      coverage_.pop_back();
      times_.pop_back();
      path_.pop_back();
      visited_[static_cast<std::size_t>(arc.to)] = false;
    }
  }

  void emit(const Arc& home, double time, double cost) {
    if (full()) return;
    Route r;
    r.sequence = path_;
    r.sequence.push_back(kDepot);
    r.arrival_times = times_;
    r.arrival_times.push_back(time + home.travel_time);
    r.cost = cost + home.cost;
    r.coverage = coverage_;
    std::sort(r.coverage.begin(), r.coverage.end());
    out_.push_back(std::move(r));
  }

  const VrptwInstance& instance_;
  const RouteGenConfig& config_;
  std::vector<bool> visited_;
  std::vector<NodeId> path_;
  std::vector<double> times_;
  std::vector<NodeId> coverage_;
  std::vector<Route> out_;
};

}  // namespace

RouteSet generate_routes(std::shared_ptr<const VrptwInstance> instance, const RouteGenConfig& config) {
  if (!instance) throw InstanceError("route generation without instance");
  if (config.max_stops < 1) throw std::invalid_argument("max_stops must be at least 1");
  std::vector<Route> routes;
  if (config.max_routes > 0) routes = RouteEnumerator(*instance, config).run();
  if (routes.empty()) {
    throw NoFeasibleRoutes("no feasible route found for instance '" + instance->name() + "'");
  }
  return RouteSet(std::move(instance), std::move(routes));
}

VrptwInstance random_instance(const InstanceSpec& spec) {
  if (spec.customers < 1) throw std::invalid_argument("instance needs at least one customer");
  Rng rng(spec.seed);
  const auto n = static_cast<std::size_t>(spec.customers) + 1;
  std::vector<double> x(n), y(n);
  x[0] = y[0] = spec.area / 2;
  for (std::size_t i = 1; i < n; ++i) {
    x[i] = rng.uniform(0.0, spec.area);
    y[i] = rng.uniform(0.0, spec.area);
  }

  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i].id = static_cast<NodeId>(i);
  if (spec.window_width > 0.0) {
    for (std::size_t i = 1; i < n; ++i) {
      nodes[i].window_open = rng.uniform(0.0, spec.horizon);
      nodes[i].window_close = nodes[i].window_open + spec.window_width;
    }
  }

  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool depot_arc = i == 0 || j == 0;
      if (!depot_arc && rng.uniform() >= spec.arc_density) continue;
      const double dist = std::hypot(x[i] - x[j], y[i] - y[j]);
      const double noise = 1.0 + spec.cost_noise * rng.uniform(-1.0, 1.0);
      arcs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), dist * noise, dist});
    }
  }
  return VrptwInstance("random-n" + std::to_string(spec.customers) + "-s" + std::to_string(spec.seed),
                       std::move(nodes), std::move(arcs));
}

VrptwInstance complete_instance(int customers, std::string name) {
  if (customers < 0) throw std::invalid_argument("customer count must be non-negative");
  const auto n = static_cast<std::size_t>(customers) + 1;
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i].id = static_cast<NodeId>(i);
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) arcs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0, 1.0});
    }
  }
  return VrptwInstance(std::move(name), std::move(nodes), std::move(arcs));
}

}  // namespace qvrp
