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
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qvrp {

using NodeId = int;

inline constexpr NodeId kDepot = 0;

/// Close time of the depot window. Never replaced by a large finite number.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Node {
  NodeId id = 0;
  double window_open = 0.0;
  double window_close = kUnbounded;
};

struct Arc {
  NodeId from = 0;
  NodeId to = 0;
  double cost = 0.0;
  double travel_time = 0.0;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Network of nodes with time windows and directed arcs.
///
/// Node 0 is the depot, nodes 1..N are customers. Arcs are unique per ordered
/// pair; the only self-loop allowed is the depot loop (0, 0).
class VrptwInstance {
 public:
  VrptwInstance() = default;
  /// Throws InstanceError if any invariant is broken.
  VrptwInstance(std::string name, std::vector<Node> nodes, std::vector<Arc> arcs);

  const std::string& name() const noexcept { return name_; }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Arc> arcs() const noexcept { return arcs_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }

  /// Number of customers N (depot excluded).
  int customer_count() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  bool has_node(NodeId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
  }

  /// Arc for (from, to) or nullptr.
  const Arc* find_arc(NodeId from, NodeId to) const noexcept;

  /// Arcs leaving `from`, in ascending (cost, destination id) order.
  std::span<const std::size_t> outgoing(NodeId from) const noexcept;

 private:
  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::ptrdiff_t> arc_index_;  // dense (N+1)^2, -1 = absent
  std::vector<std::vector<std::size_t>> outgoing_;
};

struct Route {
  std::vector<NodeId> sequence;
  double cost = 0.0;
  /// Visited customers in ascending order.
  std::vector<NodeId> coverage;
  std::vector<double> arrival_times;

  bool covers(NodeId id) const noexcept;
};

struct RouteViolation {
  enum class Kind { kMissingArc, kWindowViolation, kBadEndpoints, kDuplicateNode };
  Kind kind = Kind::kBadEndpoints;
  /// Position in the sequence where the violation was detected.
  std::size_t position = 0;
  double arrival = 0.0;
  double window_close = 0.0;

  std::string describe() const;
};

class RouteError : public std::runtime_error {
 public:
  explicit RouteError(RouteViolation violation);
  const RouteViolation& violation() const noexcept { return violation_; }

 private:
  RouteViolation violation_;
};

/// Checks a node sequence against the instance.
///
/// Arrival times follow T_1 = 0 at the depot and
/// T_{p+1} = max(open_{p+1}, T_p + travel_time(p, p+1)); early vehicles wait.
/// Service times are not modeled.
std::variant<Route, RouteViolation> validate_route(const VrptwInstance& instance,
                                                   std::span<const NodeId> sequence);

/// Like validate_route but throws RouteError.
Route require_route(const VrptwInstance& instance, std::span<const NodeId> sequence);

/// Sum of arc costs along the sequence. Throws RouteError (kMissingArc).
double route_cost(const VrptwInstance& instance, std::span<const NodeId> sequence);

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Number of elementary routes on a complete graph with N customers:
/// sum_{i=1..N} N!/(N-i)!. Throws OverflowError past 64 bits (N >= 21).
std::uint64_t max_routes(int customers);

/// A set of validated candidate routes over one instance.
class RouteSet {
 public:
  /// Throws RouteError for invalid routes and InstanceError for a route with
  /// empty coverage.
  RouteSet(std::shared_ptr<const VrptwInstance> instance, std::vector<Route> routes);

  const VrptwInstance& instance() const noexcept { return *instance_; }
  std::shared_ptr<const VrptwInstance> instance_ptr() const noexcept { return instance_; }
  std::span<const Route> routes() const noexcept { return routes_; }
  const Route& route(std::size_t r) const { return routes_.at(r); }
  std::size_t size() const noexcept { return routes_.size(); }
  bool empty() const noexcept { return routes_.empty(); }

  /// Optional fixed fleet size V, carried for the QUBO builder.
  std::optional<int> vehicle_count;

 private:
  std::shared_ptr<const VrptwInstance> instance_;
  std::vector<Route> routes_;
};

struct RouteGenConfig {
  int max_stops = 1;
  std::size_t max_routes = std::numeric_limits<std::size_t>::max();
  /// Recorded with the route set. The enumeration order is fixed by arc
  /// costs, so the seed does not change which routes are emitted.
  std::uint64_t seed = 0;
};

class NoFeasibleRoutes : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Depth-first enumeration of feasible routes from the depot.
///
/// Children are expanded in ascending arc-cost order (ties by destination id);
/// a route is emitted every time the depot can be reached from a customer.
/// Partial routes that break a window or exceed max_stops are pruned.
RouteSet generate_routes(std::shared_ptr<const VrptwInstance> instance, const RouteGenConfig& config);

/// Parameters for synthesizing stand-in instances.
struct InstanceSpec {
  int customers = 3;
  std::uint64_t seed = 0;
  /// Probability that a customer-to-customer arc exists. Depot arcs always exist.
  double arc_density = 1.0;
  /// Side of the square customers are scattered in; travel time = distance.
  double area = 100.0;
  /// Width of each customer window; <= 0 means unbounded windows.
  double window_width = 0.0;
  /// Latest window opening time.
  double horizon = 200.0;
  /// Relative spread of arc cost around travel time.
  double cost_noise = 0.1;
};

/// Random instance with points in a square, Euclidean travel times and
/// perturbed costs. Deterministic per spec.seed.
VrptwInstance random_instance(const InstanceSpec& spec);

/// Complete graph, unit costs and times, all windows unbounded.
VrptwInstance complete_instance(int customers, std::string name = "complete");

}  // namespace qvrp
