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

#include <gtest/gtest.h>

#include <memory>

#include "test_util.h"

using namespace qvrp;

namespace {

VrptwInstance one_customer(double open, double close, double t01, double t10 = 2.0) {
  return VrptwInstance("one", {{0}, {1, open, close}}, {{0, 1, 3.0, t01}, {1, 0, 4.0, t10}});
}

RouteViolation violation_of(const VrptwInstance& inst, std::vector<NodeId> seq) {
  auto result = validate_route(inst, seq);
  EXPECT_TRUE(std::holds_alternative<RouteViolation>(result));
  return std::get<RouteViolation>(result);
}

}  // namespace

TEST(ValidateRoute, depot_loop) {
  VrptwInstance inst("loop", {{0}}, {{0, 0, 0.0, 0.0}});
  const Route r = require_route(inst, std::vector<NodeId>{0, 0});
  EXPECT_EQ(r.cost, 0.0);
  EXPECT_TRUE(r.coverage.empty());
}

TEST(ValidateRoute, early_arrival_waits_for_window) {
  const auto inst = one_customer(5.0, 6.0, 2.0);
  const Route r = require_route(inst, std::vector<NodeId>{0, 1, 0});
  ASSERT_EQ(r.arrival_times.size(), 3u);
  EXPECT_EQ(r.arrival_times[0], 0.0);
  EXPECT_EQ(r.arrival_times[1], 5.0);
  EXPECT_EQ(r.arrival_times[2], 7.0);
  EXPECT_EQ(r.coverage, std::vector<NodeId>{1});
  EXPECT_EQ(r.cost, 7.0);
}

TEST(ValidateRoute, late_arrival_is_a_window_violation) {
  const auto inst = one_customer(0.0, 4.0, 6.0);
  const auto v = violation_of(inst, {0, 1, 0});
  EXPECT_EQ(v.kind, RouteViolation::Kind::kWindowViolation);
  EXPECT_EQ(v.position, 1u);
  EXPECT_EQ(v.arrival, 6.0);
  EXPECT_EQ(v.window_close, 4.0);

  // Same instance, shorter travel time fits.
  EXPECT_TRUE(std::holds_alternative<Route>(validate_route(one_customer(0.0, 4.0, 2.0), std::vector<NodeId>{0, 1, 0})));
}

TEST(ValidateRoute, error_kinds) {
  auto inst = complete_instance(3);
  EXPECT_EQ(violation_of(inst, {1, 2, 0}).kind, RouteViolation::Kind::kBadEndpoints);
  EXPECT_EQ(violation_of(inst, {0, 1, 2}).kind, RouteViolation::Kind::kBadEndpoints);
  EXPECT_EQ(violation_of(inst, {}).kind, RouteViolation::Kind::kBadEndpoints);
  EXPECT_EQ(violation_of(inst, {0, 1, 2, 1, 0}).kind, RouteViolation::Kind::kDuplicateNode);
  EXPECT_EQ(violation_of(inst, {0, 0}).kind, RouteViolation::Kind::kMissingArc);

  const auto missing = violation_of(one_customer(0, 10, 1), {0, 1, 1, 0});
  EXPECT_EQ(missing.kind, RouteViolation::Kind::kMissingArc);
  EXPECT_EQ(missing.position, 1u);
  EXPECT_THROW(require_route(inst, std::vector<NodeId>{0, 1, 1, 0}), RouteError);
}

TEST(VrptwInstance, rejects_broken_invariants) {
  EXPECT_THROW(VrptwInstance("x", {{0}, {2}}, {}), InstanceError);
  EXPECT_THROW(VrptwInstance("x", {{0}, {1, 5.0, 4.0}}, {}), InstanceError);
  EXPECT_THROW(VrptwInstance("x", {{0}, {1}}, {{0, 2, 1, 1}}), InstanceError);
  EXPECT_THROW(VrptwInstance("x", {{0}, {1}}, {{1, 1, 1, 1}}), InstanceError);
  EXPECT_THROW(VrptwInstance("x", {{0}, {1}}, {{0, 1, 1, 1}, {0, 1, 2, 2}}), InstanceError);
  EXPECT_THROW(VrptwInstance("x", {{0, 0.0, 10.0}}, {}), InstanceError);
}

TEST(RouteCost, sums_arc_costs) {
  VrptwInstance inst("costs", {{0}, {1}, {2}},
                     {{0, 0, 0, 0}, {0, 1, 3, 1}, {1, 0, 4, 1}, {1, 2, 1, 1}, {2, 0, 1, 1}});
  EXPECT_EQ(route_cost(inst, std::vector<NodeId>{0, 0}), 0.0);
  EXPECT_EQ(route_cost(inst, std::vector<NodeId>{0, 1, 0}), 7.0);

  VrptwInstance unit("unit", {{0}, {1}, {2}}, {{0, 1, 1, 1}, {1, 2, 1, 1}, {2, 0, 1, 1}});
  EXPECT_EQ(route_cost(unit, std::vector<NodeId>{0, 1, 2, 0}), 3.0);
  EXPECT_THROW(route_cost(unit, std::vector<NodeId>{0, 2, 0}), RouteError);
}

TEST(RouteCost, additive_under_concatenation_at_depot) {
  const auto inst = random_instance({.customers = 5, .seed = 9});
  const std::vector<NodeId> a{0, 1, 3, 0}, b{0, 2, 5, 4, 0}, ab{0, 1, 3, 0, 2, 5, 4, 0};
  EXPECT_NEAR(route_cost(inst, ab), route_cost(inst, a) + route_cost(inst, b), 1e-12);
  const Route r = require_route(inst, ab);
  EXPECT_NEAR(r.cost, route_cost(inst, ab), 1e-12);
}

TEST(MaxRoutes, small_values) {
  EXPECT_EQ(max_routes(0), 0u);
  EXPECT_EQ(max_routes(1), 1u);
  EXPECT_EQ(max_routes(2), 4u);
  EXPECT_EQ(max_routes(3), 15u);
}

TEST(MaxRoutes, matches_permutation_count) {
  for (int n = 1; n <= 7; ++n) EXPECT_EQ(max_routes(n), oracle::count_elementary_routes(n)) << n;
}

TEST(MaxRoutes, overflow_is_reported) {
  EXPECT_NO_THROW(max_routes(20));
  EXPECT_THROW(max_routes(21), OverflowError);
}

TEST(GenerateRoutes, single_customer) {
  auto inst = std::make_shared<const VrptwInstance>(one_customer(0.0, 10.0, 2.0));
  const RouteSet rs = generate_routes(inst, {.max_stops = 1});
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs.route(0).sequence, (std::vector<NodeId>{0, 1, 0}));
}

TEST(GenerateRoutes, complete_three_customers_gives_all_routes) {
  auto inst = std::make_shared<const VrptwInstance>(complete_instance(3));
  const RouteSet rs = generate_routes(inst, {.max_stops = 3});
  EXPECT_EQ(rs.size(), 15u);
  EXPECT_EQ(rs.route(0).sequence, (std::vector<NodeId>{0, 1, 0}));
  EXPECT_EQ(rs.route(1).sequence, (std::vector<NodeId>{0, 1, 2, 0}));
  EXPECT_EQ(rs.route(2).sequence, (std::vector<NodeId>{0, 1, 2, 3, 0}));
}

TEST(GenerateRoutes, cap_yields_prefix) {
  auto inst = std::make_shared<const VrptwInstance>(complete_instance(3));
  const RouteSet all = generate_routes(inst, {.max_stops = 3});
  const RouteSet capped = generate_routes(inst, {.max_stops = 3, .max_routes = 4});
  ASSERT_EQ(capped.size(), 4u);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(capped.route(r).sequence, all.route(r).sequence);
}

TEST(GenerateRoutes, max_stops_limits_length) {
  auto inst = std::make_shared<const VrptwInstance>(complete_instance(4));
  const RouteSet rs = generate_routes(inst, {.max_stops = 2});
  EXPECT_EQ(rs.size(), 4u + 12u);
  for (const Route& r : rs.routes()) EXPECT_LE(r.coverage.size(), 2u);
}

TEST(GenerateRoutes, complete_graphs_match_max_routes) {
  for (int n = 1; n <= 6; ++n) {
    auto inst = std::make_shared<const VrptwInstance>(random_instance({.customers = n, .seed = 100u + n}));
    EXPECT_EQ(generate_routes(inst, {.max_stops = n}).size(), max_routes(n)) << n;
  }
}

TEST(GenerateRoutes, routes_revalidate_and_are_deterministic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = std::make_shared<const VrptwInstance>(random_instance(
        {.customers = 7, .seed = seed, .arc_density = 0.6, .window_width = 60.0, .horizon = 150.0}));
    RouteSet a = generate_routes(inst, {.max_stops = 3, .max_routes = 200});
    RouteSet b = generate_routes(inst, {.max_stops = 3, .max_routes = 200});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
      EXPECT_EQ(a.route(r).sequence, b.route(r).sequence);
      EXPECT_EQ(a.route(r).cost, b.route(r).cost);
      const Route again = require_route(*inst, a.route(r).sequence);
      EXPECT_EQ(again.arrival_times, a.route(r).arrival_times);
      EXPECT_EQ(again.cost, a.route(r).cost);
      EXPECT_EQ(again.coverage, a.route(r).coverage);
    }
  }
}

TEST(GenerateRoutes, no_feasible_route) {
  // Customer window closes before it can be reached.
  auto inst = std::make_shared<const VrptwInstance>(one_customer(0.0, 1.0, 5.0));
  EXPECT_THROW(generate_routes(inst, {.max_stops = 1}), NoFeasibleRoutes);
  EXPECT_THROW(generate_routes(inst, {.max_stops = 0}), std::invalid_argument);
}

TEST(RouteSet, rejects_empty_coverage) {
  auto inst = std::make_shared<const VrptwInstance>(VrptwInstance("loop", {{0}, {1}}, {{0, 0, 0, 0}, {0, 1, 1, 1}, {1, 0, 1, 1}}));
  Route loop;
  loop.sequence = {0, 0};
  EXPECT_THROW(RouteSet(inst, {loop}), InstanceError);
}
