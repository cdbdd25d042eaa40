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

#include "triplan/enumeration.hpp"

#include <set>

namespace triplan {

namespace {

void dfs(const Triangulation& t, const AdjacencyGraph& graph,
         const DynamicsModel& model, const Objective& objective,
         const BoundaryState& x0, const BoundaryState& xf, int goal_tri,
         int max_len, const TranscriptionConfig& config,
         std::vector<int>& sequence, std::set<int>& visited,
         EnumerationResult& best) {
  const int last = sequence.back();
  if (last == goal_tri) {
    ++best.complete_sequences;
    const SequenceGeometry geo = make_sequence_geometry(t, sequence);
    const RefinementResult res =
        solve_q(model, objective, geo, x0, xf, config);
    if (res.optimal()) {
      ++best.solved;
      if (!best.found || res.value < best.value) {
        best.found = true;
        best.value = res.value;
        best.sequence = sequence;
      }
    }
    return;  // sequences end at their first goal-triangle visit
  }
  if (static_cast<int>(sequence.size()) >= max_len) return;
  for (const auto& [nbr, edge] : graph.neighbors[last]) {
    if (visited.count(nbr)) continue;
    visited.insert(nbr);
    sequence.push_back(nbr);
    dfs(t, graph, model, objective, x0, xf, goal_tri, max_len, config,
        sequence, visited, best);
    sequence.pop_back();
    visited.erase(nbr);
  }
}

}  // namespace

EnumerationResult enumerate_optimal(const Triangulation& triangulation,
                                    const AdjacencyGraph& graph,
                                    const DynamicsModel& model,
                                    const Objective& objective,
                                    const BoundaryState& x0,
                                    const BoundaryState& xf, int max_len,
                                    const TranscriptionConfig& config) {
  EnumerationResult best;
  const int start_tri = locate(triangulation, x0.position_point());
  const int goal_tri = locate(triangulation, xf.position_point());
  std::vector<int> sequence{start_tri};
  std::set<int> visited{start_tri};
  dfs(triangulation, graph, model, objective, x0, xf, goal_tri, max_len,
      config, sequence, visited, best);
  return best;
}

}  // namespace triplan
