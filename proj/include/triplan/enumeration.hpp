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

#ifndef TRIPLAN_ENUMERATION_HPP_
#define TRIPLAN_ENUMERATION_HPP_

#include <vector>

#include "triplan/cdt.hpp"
#include "triplan/transcription.hpp"

namespace triplan {

/// Ground truth for small maps: every simple adjacent triangle sequence from
/// the start triangle to the goal triangle is refined with a fixed endpoint.
struct EnumerationResult {
  bool found = false;
  std::vector<int> sequence;
  double value = 0.0;
  int complete_sequences = 0;  // sequences reaching the goal triangle
  int solved = 0;              // successful refinements among them
};

EnumerationResult enumerate_optimal(const Triangulation& triangulation,
                                    const AdjacencyGraph& graph,
                                    const DynamicsModel& model,
                                    const Objective& objective,
                                    const BoundaryState& x0,
                                    const BoundaryState& xf, int max_len,
                                    const TranscriptionConfig& config);

}  // namespace triplan

#endif  // TRIPLAN_ENUMERATION_HPP_
