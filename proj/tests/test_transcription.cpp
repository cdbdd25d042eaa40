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

#include "triplan/transcription.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace triplan {
namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
  Polygon p;
  p.vertices = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return p;
}

// Long axis-aligned corridor subdivided along the top/bottom edges.
Triangulation corridor_map(double length, double height, int panels) {
  Polygon domain;
  for (int i = 0; i <= panels; ++i) {
    domain.vertices.push_back({length * i / panels, 0.0});
  }
  for (int i = panels; i >= 0; --i) {
    domain.vertices.push_back({length * i / panels, height});
  }
  return triangulate(domain, {});
}

// Triangle corridor through the whole free space, left to right.
std::vector<int> corridor_sequence(const Triangulation& t, const Point2& from,
                                   const Point2& to) {
  // Greedy walk over adjacency toward the target centroid.
  const AdjacencyGraph g = adjacency(t);
  int cur = locate(t, from);
  const int goal = locate(t, to);
  std::vector<int> seq{cur};
  std::set<int> seen{cur};
  while (cur != goal) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [nbr, edge] : g.neighbors[cur]) {
      if (seen.count(nbr)) continue;
      const double d = (t.triangle(nbr).centroid() - to).norm();
      if (d < best_d) {
        best_d = d;
        best = nbr;
      }
    }
    if (best < 0) break;
    cur = best;
    seq.push_back(cur);
    seen.insert(cur);
  }
  return seq;
}

TranscriptionConfig default_config() {
  TranscriptionConfig cfg;
  cfg.degree = 3;
  return cfg;
}

TEST(Transcription, SingleTriangleFreeTimeObjectiveHitsFloor) {
  const Triangulation t = corridor_map(10.0, 10.0, 1);
  CarModel car;
  const Objective obj = Objective::time(car);
  const SequenceGeometry geo = make_sequence_geometry(t, {0});
  const Point2 c = geo.triangles[0].tri.centroid();
  Eigen::VectorXd x0(3);
  x0 << c.x, c.y, 0.0;
  const RefinementResult res =
      solve_v(car, obj, geo, BoundaryState::all(x0), default_config());
  ASSERT_EQ(res.status, NlpStatus::Optimal);
  // Free endpoint and J = 1: stop immediately, down to the duration floor.
  EXPECT_LT(res.value, 5e-3);
  EXPECT_GE(res.value, 0.0);
}

TEST(Transcription, StraightCorridorDistanceMatchesLength) {
  const Triangulation t = corridor_map(30.0, 4.0, 6);
  CarModel car;
  const Objective obj = Objective::distance(car);
  const Point2 from{1.0, 2.0};
  const Point2 to{29.0, 2.0};
  const std::vector<int> seq = corridor_sequence(t, from, to);
  const SequenceGeometry geo = make_sequence_geometry(t, seq);

  Eigen::VectorXd x0(3), xf(3);
  x0 << from.x, from.y, 0.0;
  xf << to.x, to.y, 0.0;
  const RefinementResult res =
      solve_q(car, obj, geo, BoundaryState::all(x0), BoundaryState::all(xf),
              default_config());
  ASSERT_EQ(res.status, NlpStatus::Optimal);
  EXPECT_NEAR(res.value, 28.0, 0.01 * 28.0);
  EXPECT_LT(res.membership_violation, 1e-6);
  EXPECT_LT(res.spline.max_continuity_gap(), 1e-6);
}

TEST(Transcription, ConstraintCountTwoSegmentCar) {
  const Triangulation t = corridor_map(10.0, 10.0, 1);
  ASSERT_EQ(t.triangles.size(), 2u);
  CarModel car;
  const Objective obj = Objective::time(car);
  const SequenceGeometry geo = make_sequence_geometry(t, {0, 1});
  const Point2 c = geo.triangles[0].tri.centroid();
  Eigen::VectorXd x0(3);
  x0 << c.x, c.y, 0.0;
  TrajectoryNlp problem(car, obj, geo, BoundaryState::all(x0),
                        EndpointMode::Free, std::nullopt, default_config());
  // Hand count for d = 3, car (nx = 3), 2 segments, full start pin:
  //   init 3 + collocation 2*3*3 + membership 2*4 + continuity 3 = 32.
  EXPECT_EQ(problem.num_constraints(), 32);
  // Variables: 2 * ((d+1)*nx + d*nu + 1) = 2 * (12 + 3 + 1) = 32.
  EXPECT_EQ(problem.num_vars(), 32);
}

TEST(Transcription, NonAdjacentSequenceRejected) {
  const Triangulation t = corridor_map(30.0, 4.0, 6);
  std::vector<int> bad{0, static_cast<int>(t.triangles.size()) - 1};
  EXPECT_THROW(make_sequence_geometry(t, bad), StructuralError);
}

TEST(Transcription, FixedEndpointOutsideLastTriangleRejected) {
  const Triangulation t = corridor_map(10.0, 10.0, 1);
  CarModel car;
  const Objective obj = Objective::time(car);
  const SequenceGeometry geo = make_sequence_geometry(t, {0});
  const Point2 c = geo.triangles[0].tri.centroid();
  Eigen::VectorXd x0(3), xf(3);
  x0 << c.x, c.y, 0.0;
  xf << 1e3, 1e3, 0.0;
  EXPECT_THROW(solve_q(car, obj, geo, BoundaryState::all(x0),
                       BoundaryState::all(xf), default_config()),
               InputError);
}

TEST(Transcription, DerivativesMatchFiniteDifferencesCar) {
  const Triangulation t = corridor_map(30.0, 4.0, 4);
  CarModel car;
  const Objective obj = Objective::distance(car);
  const std::vector<int> seq = corridor_sequence(t, {1, 2}, {29, 2});
  const SequenceGeometry geo = make_sequence_geometry(t, seq);
  Eigen::VectorXd x0(3);
  x0 << 1.0, 2.0, 0.0;
  TrajectoryNlp problem(car, obj, geo, BoundaryState::all(x0),
                        EndpointMode::Free, std::nullopt, default_config());
  Eigen::VectorXd w = problem.initial_guess();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (int i = 0; i < w.size(); ++i) w(i) += jitter(rng);
  EXPECT_LE(check_derivatives(problem, w), 1e-5);
}

TEST(Transcription, DerivativesMatchFiniteDifferencesVessel) {
  const Triangulation t = corridor_map(200.0, 60.0, 3);
  VesselModel vessel;
  const Objective obj = Objective::energy(vessel);
  const std::vector<int> seq = corridor_sequence(t, {20, 30}, {180, 30});
  const SequenceGeometry geo = make_sequence_geometry(
      t, std::vector<int>(seq.begin(), seq.begin() + 3));
  Eigen::VectorXd x0(7);
  x0 << 20.0, 30.0, 1.0, 0.0, 1.0, 0.0, 0.0;
  TrajectoryNlp problem(vessel, obj, geo, BoundaryState::all(x0),
                        EndpointMode::Free, std::nullopt, default_config());
  Eigen::VectorXd w = problem.initial_guess();
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (int i = 0; i < w.size(); ++i) w(i) += jitter(rng) * (1.0 + w(i));
  EXPECT_LE(check_derivatives(problem, w), 1e-5);
}

TEST(Transcription, QEqualsVAtFreeEndpoint) {
  const Triangulation t = corridor_map(30.0, 4.0, 6);
  CarModel car;
  const Objective obj = Objective::distance(car);
  const std::vector<int> seq = corridor_sequence(t, {1, 2}, {29, 2});
  const SequenceGeometry geo = make_sequence_geometry(t, seq);
  Eigen::VectorXd x0(3);
  x0 << 1.0, 2.0, 0.0;
  const BoundaryState start = BoundaryState::all(x0);
  const RefinementResult v = solve_v(car, obj, geo, start, default_config());
  ASSERT_EQ(v.status, NlpStatus::Optimal);
  const RefinementResult q =
      solve_q(car, obj, geo, start, BoundaryState::all(v.endpoint),
              default_config(), &v.spline);
  ASSERT_EQ(q.status, NlpStatus::Optimal);
  EXPECT_NEAR(q.value, v.value, 1e-4 * (1.0 + std::abs(v.value)));
  EXPECT_GE(q.value, v.value - 1e-6 * (1.0 + std::abs(v.value)));
}

TEST(Transcription, WarmMatchesColdOnBenignExtension) {
  const Triangulation t = corridor_map(30.0, 4.0, 6);
  CarModel car;
  const Objective obj = Objective::distance(car);
  const std::vector<int> seq = corridor_sequence(t, {1, 2}, {29, 2});
  ASSERT_GE(seq.size(), 3u);
  Eigen::VectorXd x0(3);
  x0 << 1.0, 2.0, 0.0;
  const BoundaryState start = BoundaryState::all(x0);

  const std::vector<int> parent_seq(seq.begin(), seq.end() - 1);
  const SequenceGeometry parent_geo = make_sequence_geometry(t, parent_seq);
  const SequenceGeometry child_geo = make_sequence_geometry(t, seq);

  const RefinementResult parent =
      solve_v(car, obj, parent_geo, start, default_config());
  ASSERT_EQ(parent.status, NlpStatus::Optimal);

  const RefinementResult cold =
      solve_v(car, obj, child_geo, start, default_config());
  const RefinementResult warm =
      solve_v(car, obj, child_geo, start, default_config(), &parent.spline);
  ASSERT_EQ(cold.status, NlpStatus::Optimal);
  ASSERT_EQ(warm.status, NlpStatus::Optimal);
  EXPECT_NEAR(warm.value, cold.value, 1e-5 * (1.0 + std::abs(cold.value)));
}

TEST(Transcription, MonotoneValueUnderExtension) {
  const Triangulation t = corridor_map(30.0, 4.0, 6);
  CarModel car;
  const Objective obj = Objective::distance(car);
  const std::vector<int> seq = corridor_sequence(t, {1, 2}, {29, 2});
  Eigen::VectorXd x0(3);
  x0 << 1.0, 2.0, 0.0;
  const BoundaryState start = BoundaryState::all(x0);

  double prev = -1.0;
  const RefinementResult* parent = nullptr;
  RefinementResult results[2];
  int slot = 0;
  for (size_t len = 1; len <= seq.size(); ++len) {
    const SequenceGeometry geo = make_sequence_geometry(
        t, std::vector<int>(seq.begin(), seq.begin() + len));
    results[slot] = solve_v(car, obj, geo, start, default_config(),
                            parent ? &parent->spline : nullptr);
    ASSERT_EQ(results[slot].status, NlpStatus::Optimal) << "len=" << len;
    const double v = results[slot].value;
    EXPECT_GE(v, prev - 1e-6 * (1.0 + std::abs(v))) << "len=" << len;
    prev = v;
    parent = &results[slot];
    slot = 1 - slot;
  }
}

TEST(Transcription, SampleLayoutAndEndpoints) {
  const Triangulation t = corridor_map(30.0, 4.0, 6);
  CarModel car;
  const Objective obj = Objective::distance(car);
  const std::vector<int> seq = corridor_sequence(t, {1, 2}, {29, 2});
  const SequenceGeometry geo = make_sequence_geometry(t, seq);
  Eigen::VectorXd x0(3), xf(3);
  x0 << 1.0, 2.0, 0.0;
  xf << 29.0, 2.0, 0.0;
  const RefinementResult res =
      solve_q(car, obj, geo, BoundaryState::all(x0), BoundaryState::all(xf),
              default_config());
  ASSERT_EQ(res.status, NlpStatus::Optimal);

  const auto samples = sample(res.spline, 9);
  const size_t segs = res.spline.segments.size();
  EXPECT_EQ(samples.size(), segs * 8 + 1);
  for (size_t i = 1; i < samples.size(); ++i) {
    EXPECT_GT(samples[i].t, samples[i - 1].t);
  }
  EXPECT_NEAR(samples.front().state(0), 1.0, 1e-5);
  EXPECT_NEAR(samples.front().state(1), 2.0, 1e-5);
  EXPECT_NEAR(samples.back().state(0), 29.0, 1e-5);
  EXPECT_NEAR(samples.back().state(1), 2.0, 1e-5);

  // n = 2 returns segment boundaries only.
  const auto coarse = sample(res.spline, 2);
  EXPECT_EQ(coarse.size(), segs + 1);
}

TEST(Transcription, CollocationConvergenceUnderDegree) {
  // Gentle dogleg: quarter-turn corridor forces a curved path.
  Polygon domain;
  domain.vertices = {{0, 0}, {12, 0}, {12, 12}, {8, 12},
                     {8, 4},  {0, 4}};
  const Triangulation t = triangulate(domain, {});
  CarModel car;
  const Objective obj = Objective::distance(car);
  const std::vector<int> seq = corridor_sequence(t, {1, 2}, {10, 11});
  const SequenceGeometry geo = make_sequence_geometry(t, seq);
  Eigen::VectorXd x0(3), xf(3);
  x0 << 1.0, 2.0, 0.0;
  xf << 10.0, 11.0, M_PI / 2.0;

  TranscriptionConfig c3 = default_config();
  TranscriptionConfig c6 = default_config();
  c6.degree = 6;
  const RefinementResult r3 = solve_q(car, obj, geo, BoundaryState::all(x0),
                                      BoundaryState::all(xf), c3);
  const RefinementResult r6 = solve_q(car, obj, geo, BoundaryState::all(x0),
                                      BoundaryState::all(xf), c6);
  ASSERT_EQ(r3.status, NlpStatus::Optimal);
  ASSERT_EQ(r6.status, NlpStatus::Optimal);
  EXPECT_NEAR(r3.value, r6.value, 0.005 * r6.value);
}

TEST(Transcription, VesselUnitNormHeldAtNodes) {
  const Triangulation t = corridor_map(200.0, 60.0, 3);
  VesselModel vessel;
  const Objective obj = Objective::time(vessel);
  const std::vector<int> seq = corridor_sequence(t, {20, 30}, {180, 30});
  const SequenceGeometry geo = make_sequence_geometry(t, seq);
  Eigen::VectorXd x0(7);
  x0 << 20.0, 30.0, 1.0, 0.0, 0.5, 0.0, 0.0;
  const RefinementResult res =
      solve_v(vessel, obj, geo, BoundaryState::all(x0), default_config());
  ASSERT_EQ(res.status, NlpStatus::Optimal);
  // Exactly unit at the interpolation nodes.
  const CollocationBasis basis = CollocationBasis::radau(3);
  double t_start = 0.0;
  for (const auto& seg : res.spline.segments) {
    for (int k = 0; k <= 3; ++k) {
      const Eigen::VectorXd x =
          res.spline.state(t_start + basis.state_points(k) * seg.duration);
      EXPECT_NEAR(std::hypot(x(2), x(3)), 1.0, 1e-9);
    }
    t_start += seg.duration;
  }
  // Between nodes the interpolant wiggles at discretization error only.
  for (const auto& s : sample(res.spline, 16)) {
    const double norm = std::hypot(s.state(2), s.state(3));
    EXPECT_NEAR(norm, 1.0, 5e-2);
  }
  // Endpoint norm within the post-hoc tolerance.
  EXPECT_NEAR(std::hypot(res.endpoint(2), res.endpoint(3)), 1.0, 1e-6);
}

}  // namespace
}  // namespace triplan
