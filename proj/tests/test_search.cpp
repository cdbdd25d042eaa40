// Copyright 2026 The Triplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "triplan/search.hpp"

#include <gtest/gtest.h>

#include "triplan/enumeration.hpp"
#include "testutil.hpp"

namespace triplan {
namespace {

struct Scene {
  MapDocument map;
  Triangulation tri;
  AdjacencyGraph graph;
};

Scene load_scene(const std::string& name) {
  Scene s;
  s.map = testutil::load_fixture(name);
  s.tri = triangulate_map(s.map);
  s.graph = adjacency(s.tri);
  return s;
}

PlannerConfig no_prune_config() {
  PlannerConfig c;
  c.prune_eps = 0.0;
  return c;
}

TEST(Search, SameTriangleSingleQSolve) {
  const Scene s = load_scene("square.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};

  Eigen::VectorXd x0(3), xf(3);
  x0 << 1.0, 1.0, 0.0;
  xf << 2.5, 1.2, 0.0;
  // Same triangle holds both endpoints.
  ASSERT_EQ(locate(s.tri, {1.0, 1.0}), locate(s.tri, {2.5, 1.2}));

  const PlanResult res = plan(ctx, BoundaryState::all(x0),
                              BoundaryState::all(xf), no_prune_config());
  ASSERT_TRUE(res.found);
  EXPECT_EQ(res.sequence.size(), 1u);
  EXPECT_EQ(res.stats.completions, 1);
  EXPECT_GE(res.value, std::hypot(1.5, 0.2) - 1e-3);
}

TEST(Search, TwoTriangleCorridorTrace) {
  const Scene s = load_scene("square.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};

  // Start and goal in the two different triangles of the split square.
  const Point2 c0 = s.tri.triangle(0).centroid();
  const Point2 c1 = s.tri.triangle(1).centroid();
  Eigen::VectorXd x0(3), xf(3);
  const double heading =
      std::atan2(c1.y - c0.y, c1.x - c0.x);
  x0 << c0.x, c0.y, heading;
  xf << c1.x, c1.y, heading;

  const PlanResult res = plan(ctx, BoundaryState::all(x0),
                              BoundaryState::all(xf), no_prune_config());
  ASSERT_TRUE(res.found);
  ASSERT_EQ(res.sequence.size(), 2u);
  EXPECT_EQ(res.sequence.front(), 0);
  EXPECT_EQ(res.sequence.back(), 1);
  // One pop plus one completion.
  EXPECT_EQ(res.stats.nodes_expanded, 2);
  EXPECT_EQ(res.stats.completions, 1);
}

TEST(Search, MatchesExhaustiveEnumeration) {
  const Scene s = load_scene("oracle1.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};

  const BoundaryState x0 =
      BoundaryState::all((Eigen::VectorXd(3) << 2.0, 2.5, 0.4).finished());
  const BoundaryState xf =
      BoundaryState::all((Eigen::VectorXd(3) << 18.0, 17.0, 0.6).finished());

  const PlanResult res = plan(ctx, x0, xf, no_prune_config());
  ASSERT_TRUE(res.found);

  const EnumerationResult oracle = enumerate_optimal(
      s.tri, s.graph, car, obj, x0, xf, s.tri.free_count(),
      no_prune_config().transcription);
  ASSERT_TRUE(oracle.found);
  EXPECT_NEAR(res.value, oracle.value, 1e-4 * (1.0 + oracle.value));
  EXPECT_EQ(res.stats.lemma_violations, 0);
}

TEST(Search, ChildrenSkipVisitedTriangles) {
  const Scene s = load_scene("oracle3.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};

  const BoundaryState x0 =
      BoundaryState::all((Eigen::VectorXd(3) << 2.0, 2.0, 0.0).finished());
  const BoundaryState xf =
      BoundaryState::all(
          (Eigen::VectorXd(3) << 2.0, 14.0, M_PI / 2).finished());
  const PlanResult res = plan(ctx, x0, xf, no_prune_config());
  ASSERT_TRUE(res.found);
  // Pairwise-distinct sequences everywhere in the trace.
  for (const TraceEvent& e : res.trace) {
    std::set<int> seen(e.sequence.begin(), e.sequence.end());
    EXPECT_EQ(seen.size(), e.sequence.size());
  }
}

TEST(Search, PruneRejectsDominatedAdmitsOthers) {
  const Scene s = load_scene("oracle1.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};

  const BoundaryState x0 =
      BoundaryState::all((Eigen::VectorXd(3) << 2.0, 2.5, 0.4).finished());
  const BoundaryState xf =
      BoundaryState::all((Eigen::VectorXd(3) << 18.0, 17.0, 0.6).finished());

  PlannerConfig pruned;
  pruned.prune_eps = 10.0;  // aggressive: many rejections expected
  const PlanResult res = plan(ctx, x0, xf, pruned);
  ASSERT_TRUE(res.found);
  EXPECT_GT(res.stats.nodes_pruned, 0);

  PlannerConfig off = no_prune_config();
  const PlanResult res_off = plan(ctx, x0, xf, off);
  EXPECT_EQ(res_off.stats.nodes_pruned, 0);
  // Pruning is a relaxation; with it off the value is the reference.
  EXPECT_GE(res.value, res_off.value - 1e-6 * (1.0 + res_off.value));
}

TEST(Search, GoalInObstacleRaisesInputError) {
  const Scene s = load_scene("oracle1.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};
  const BoundaryState x0 =
      BoundaryState::all((Eigen::VectorXd(3) << 2.0, 2.5, 0.0).finished());
  const BoundaryState xf =
      BoundaryState::all((Eigen::VectorXd(3) << 10.0, 9.0, 0.0).finished());
  EXPECT_THROW(plan(ctx, x0, xf, no_prune_config()), InputError);
}

TEST(Search, NoPathWhenGoalUnreachable) {
  // Slit map where the passage is blocked by the obstacle touching the top:
  // close off by putting the goal inside the fenced side... oracle2 keeps a
  // gap below the slit, so instead make the goal region disconnected with a
  // dedicated map: use oracle2 and a goal above the slit barrier is still
  // reachable; craft unreachability via a full-height wall.
  Polygon domain;
  domain.vertices = {{0, 0}, {20, 0}, {20, 10}, {0, 10}};
  Polygon wall;
  wall.is_hole = true;
  wall.vertices = {{9.0, -0.0}, {11.0, 0.0}, {11.0, 10.0}, {9.0, 10.0}};
  const Triangulation tri = triangulate(domain, {wall});
  const AdjacencyGraph graph = adjacency(tri);
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{tri, graph, car, obj};
  const BoundaryState x0 =
      BoundaryState::all((Eigen::VectorXd(3) << 2.0, 5.0, 0.0).finished());
  const BoundaryState xf =
      BoundaryState::all((Eigen::VectorXd(3) << 18.0, 5.0, 0.0).finished());
  const PlanResult res = plan(ctx, x0, xf, no_prune_config());
  EXPECT_FALSE(res.found);
}

TEST(Search, ParallelMatchesSequentialValue) {
  const Scene s = load_scene("oracle1.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};

  const BoundaryState x0 =
      BoundaryState::all((Eigen::VectorXd(3) << 2.0, 2.5, 0.4).finished());
  const BoundaryState xf =
      BoundaryState::all((Eigen::VectorXd(3) << 18.0, 17.0, 0.6).finished());

  const PlanResult seq = plan(ctx, x0, xf, no_prune_config());
  PlannerConfig par = no_prune_config();
  par.workers = 4;
  const PlanResult both = parallel_plan(ctx, x0, xf, par);
  ASSERT_TRUE(seq.found);
  ASSERT_TRUE(both.found);
  EXPECT_NEAR(seq.value, both.value, 1e-6 * (1.0 + seq.value));

  PlannerConfig one = no_prune_config();
  one.workers = 1;
  const PlanResult same = parallel_plan(ctx, x0, xf, one);
  EXPECT_EQ(same.value, seq.value);
  EXPECT_EQ(same.sequence, seq.sequence);
}

// With pruning off, some prefix of the final sequence sits in the open list
// at every iteration until the plan's own completion (reconstructed from the
// trace).
TEST(Search, OpenListAlwaysHoldsAPrefixOfTheAnswer) {
  const Scene s = load_scene("oracle4.geojson");
  CarModel car;
  const Objective obj = Objective::distance(car);
  const PlanContext ctx{s.tri, s.graph, car, obj};
  const BoundaryState x0 =
      BoundaryState::all((Eigen::VectorXd(3) << 2.0, 2.0, 0.3).finished());
  const BoundaryState xf =
      BoundaryState::all((Eigen::VectorXd(3) << 20.0, 12.0, 0.3).finished());
  const PlanResult res = plan(ctx, x0, xf, no_prune_config());
  ASSERT_TRUE(res.found);

  auto is_prefix = [&](const std::vector<int>& p) {
    if (p.size() > res.sequence.size()) return false;
    return std::equal(p.begin(), p.end(), res.sequence.begin());
  };

  std::set<std::vector<int>> open;
  bool done_seen = false;
  for (const TraceEvent& e : res.trace) {
    if (e.kind == TraceEvent::Kind::Admit) {
      open.insert(e.sequence);
    } else if (e.kind == TraceEvent::Kind::Expand) {
      open.erase(e.sequence);
      // Before the answer's completion, a prefix must remain available
      // (either in the open list or just popped for expansion).
      bool any_prefix = is_prefix(e.sequence);
      for (const auto& seq : open) {
        any_prefix = any_prefix || is_prefix(seq);
      }
      if (!done_seen) EXPECT_TRUE(any_prefix);
    } else if (e.kind == TraceEvent::Kind::Incumbent &&
               e.sequence == res.sequence) {
      done_seen = true;
    }
  }
  EXPECT_TRUE(done_seen);
}

}  // namespace
}  // namespace triplan
