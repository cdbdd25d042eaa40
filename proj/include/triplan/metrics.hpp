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

#ifndef TRIPLAN_METRICS_HPP_
#define TRIPLAN_METRICS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "triplan/dynamics.hpp"
#include "triplan/transcription.hpp"

namespace triplan {

/// Aggregate trajectory measures, computed from one dense sampling of the
/// spline.
struct TrajectoryMetrics {
  double time_s = 0.0;
  double distance_m = 0.0;
  double energy_kj = 0.0;
  double max_abs_curvature = 0.0;
  // Curvature profile; entries without a defined curvature (speed below
  // 1e-9 m/s) are absent.
  std::vector<std::pair<double, std::optional<double>>> curvature;
};

TrajectoryMetrics compute_metrics(const TrajectorySpline& spline,
                                  const DynamicsModel& model,
                                  int samples_per_segment = 64);

/// Writes `t,x,y,psi_or_zr,zi,u,v,r,u1,u2` rows with 9 significant digits;
/// absent components stay empty.
void write_trajectory_csv(const std::string& path,
                          const TrajectorySpline& spline,
                          const DynamicsModel& model,
                          int samples_per_segment = 32);

std::string trajectory_csv_text(const TrajectorySpline& spline,
                                const DynamicsModel& model,
                                int samples_per_segment = 32);

}  // namespace triplan

#endif  // TRIPLAN_METRICS_HPP_
