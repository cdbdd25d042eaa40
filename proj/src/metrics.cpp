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

#include "triplan/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace triplan {

namespace {

// Composite Simpson over an even number of uniform intervals.
double simpson(const std::vector<double>& values, double step) {
  double acc = values.front() + values.back();
  for (size_t i = 1; i + 1 < values.size(); ++i) {
    acc += values[i] * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  return acc * step / 3.0;
}

std::string format_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

TrajectoryMetrics compute_metrics(const TrajectorySpline& spline,
                                  const DynamicsModel& model,
                                  int samples_per_segment) {
  if (samples_per_segment % 2 != 0) ++samples_per_segment;
  TrajectoryMetrics out;
  out.time_s = spline.total_time();

  const bool vessel_like = model.state_dim() >= 7;
  double t_start = spline.t0;
  for (const auto& seg : spline.segments) {
    std::vector<double> speed(samples_per_segment + 1);
    std::vector<double> power(samples_per_segment + 1, 0.0);
    for (int j = 0; j <= samples_per_segment; ++j) {
      const double t =
          t_start + seg.duration * j / double(samples_per_segment);
      const Eigen::VectorXd d1 = spline.state_derivative(t, 1);
      const Eigen::VectorXd d2 = spline.state_derivative(t, 2);
      const double v = std::hypot(d1(0), d1(1));
      speed[j] = v;

      std::optional<double> kappa;
      if (v > 1e-9) {
        kappa = (d1(0) * d2(1) - d1(1) * d2(0)) / (v * v * v);
        out.max_abs_curvature = std::max(out.max_abs_curvature,
                                         std::abs(*kappa));
      }
      out.curvature.push_back({t, kappa});

      if (vessel_like) {
        const Eigen::VectorXd x = spline.state(t);
        const Eigen::VectorXd u = spline.control(t);
        Eigen::Vector3d p;
        Eigen::Matrix3Xd dpx, dpu;
        if (model.power_terms(x, u, p, dpx, dpu)) {
          power[j] = p.cwiseAbs().sum();
        }
      }
    }
    const double h = seg.duration / samples_per_segment;
    out.distance_m += simpson(speed, h);
    if (vessel_like) out.energy_kj += simpson(power, h) / 1000.0;
    t_start += seg.duration;
  }
  return out;
}

std::string trajectory_csv_text(const TrajectorySpline& spline,
                                const DynamicsModel& model,
                                int samples_per_segment) {
  std::ostringstream os;
  os << "t,x,y,psi_or_zr,zi,u,v,r,u1,u2\n";
  const bool car = model.state_dim() == 3;
  for (const auto& s : sample(spline, samples_per_segment + 1)) {
    os << format_cell(s.t) << ',' << format_cell(s.state(0)) << ','
       << format_cell(s.state(1)) << ',';
    if (car) {
      // psi, -, -, -, r(control), -, -
      os << format_cell(s.state(2)) << ",,,,";
      os << format_cell(s.control(0)) << ",,";
    } else {
      os << format_cell(s.state(2)) << ',' << format_cell(s.state(3)) << ','
         << format_cell(s.state(4)) << ',' << format_cell(s.state(5)) << ','
         << format_cell(s.state(6)) << ',' << format_cell(s.control(0))
         << ',' << format_cell(s.control(1));
    }
    os << '\n';
  }
  return os.str();
}

void write_trajectory_csv(const std::string& path,
                          const TrajectorySpline& spline,
                          const DynamicsModel& model,
                          int samples_per_segment) {
  std::ofstream out(path);
  out << trajectory_csv_text(spline, model, samples_per_segment);
}

}  // namespace triplan
