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

#include "triplan/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "triplan/dynamics.hpp"
#include "triplan/map_io.hpp"
#include "triplan/metrics.hpp"
#include "triplan/search.hpp"
#include "triplan/svg_render.hpp"

namespace triplan {

namespace {

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    size_t used = 0;
    const double v = std::stod(token, &used);
    out.push_back(v);
  }
  return out;
}

BoundaryState parse_state(const DynamicsModel& model, const std::string& text,
                          const char* what) {
  std::vector<double> values;
  try {
    values = parse_numbers(text);
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": cannot parse '" + text + "'");
  }
  const int nx = model.state_dim();
  if (static_cast<int>(values.size()) == 2) {
    return BoundaryState::position(model, {values[0], values[1]});
  }
  if (static_cast<int>(values.size()) == nx) {
    Eigen::VectorXd x(nx);
    for (int i = 0; i < nx; ++i) x(i) = values[i];
    if (nx == 7) {
      const double zn = std::hypot(x(2), x(3));
      if (zn < 1e-9) {
        throw InputError(std::string(what) +
                         ": orientation (zr, zi) must be nonzero");
      }
      x(2) /= zn;
      x(3) /= zn;
    }
    return BoundaryState::all(x);
  }
  throw InputError(std::string(what) + ": expected 'x,y' or " +
                   std::to_string(nx) + " state components, got " +
                   std::to_string(values.size()));
}

const char* event_name(TraceEvent::Kind kind) {
  switch (kind) {
    case TraceEvent::Kind::Expand:
      return "expand";
    case TraceEvent::Kind::Admit:
      return "admit";
    case TraceEvent::Kind::Prune:
      return "prune";
    case TraceEvent::Kind::DeadEnd:
      return "dead_end";
    case TraceEvent::Kind::Incumbent:
      return "incumbent";
    case TraceEvent::Kind::Terminate:
      return "terminate";
  }
  return "?";
}

void write_trace(const std::string& path,
                 const std::vector<TraceEvent>& trace) {
  std::ofstream out(path);
  for (const TraceEvent& e : trace) {
    nlohmann::json line;
    line["event"] = event_name(e.kind);
    line["sequence"] = e.sequence;
    line["value"] = e.value;
    line["qbar"] = e.qbar;
    out << line.dump() << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Optimal trajectories through triangulated polygonal maps"};
  app.name("triplan");

  std::string map_path, model_name, objective_name, start_text, goal_text,
      out_dir;
  int degree = 3;
  double epsilon = 1e-6;
  double time_cap = 1200.0;
  int workers = 1;
  double prune_eps = 0.0;
  bool want_svg = false;
  bool want_trace = false;

  app.add_option("--map", map_path, "Map file (GeoJSON FeatureCollection)")
      ->required();
  app.add_option("--model", model_name, "Vehicle model: car | vessel")
      ->required()
      ->check(CLI::IsMember({"car", "vessel"}));
  app.add_option("--objective", objective_name,
                 "Objective: time | distance | energy")
      ->required()
      ->check(CLI::IsMember({"time", "distance", "energy"}));
  app.add_option("--start", start_text, "Start state 'x,y[,...]'")
      ->required();
  app.add_option("--goal", goal_text, "Goal state 'x,y[,...]'")->required();
  app.add_option("--degree", degree, "Collocation degree")
      ->capture_default_str();
  app.add_option("--epsilon", epsilon, "Integrand smoothing")
      ->capture_default_str();
  app.add_option("--time-cap", time_cap,
                 "Terminal time bound in seconds (energy objective)")
      ->capture_default_str();
  app.add_option("--workers", workers, "Parallel search workers")
      ->capture_default_str();
  app.add_option("--prune-eps", prune_eps,
                 "Endpoint-dominance pruning threshold (0 = off)")
      ->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_flag("--svg", want_svg, "Write plan.svg");
  app.add_flag("--trace", want_trace, "Write search_trace.jsonl");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp") {
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const MapDocument map = load_map(map_path);
    std::vector<std::string> warnings;
    const Triangulation tri = triangulate_map(map, &warnings);
    for (const std::string& w : warnings) {
      std::cerr << "warning: " << w << "\n";
    }
    const AdjacencyGraph graph = adjacency(tri);

    std::unique_ptr<DynamicsModel> model;
    if (model_name == "car") {
      model = std::make_unique<CarModel>();
    } else {
      model = std::make_unique<VesselModel>();
    }

    Objective objective;
    if (objective_name == "time") {
      objective = Objective::time(*model);
    } else if (objective_name == "distance") {
      objective = Objective::distance(*model, epsilon);
    } else {
      objective = Objective::energy(*model, epsilon, time_cap);
    }

    const BoundaryState x0 = parse_state(*model, start_text, "--start");
    const BoundaryState xf = parse_state(*model, goal_text, "--goal");

    PlannerConfig config;
    config.transcription.degree = degree;
    config.workers = workers;
    config.prune_eps = prune_eps;

    const PlanContext ctx{tri, graph, *model, objective};
    const PlanResult result = (workers > 1)
                                  ? parallel_plan(ctx, x0, xf, config)
                                  : plan(ctx, x0, xf, config);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path out(out_dir);
    if (want_trace) {
      write_trace((out / "search_trace.jsonl").string(), result.trace);
    }

    if (!result.found) {
      if (want_svg) {
        write_svg((out / "plan.svg").string(), map, tri, nullptr,
                  want_trace ? &result.trace : nullptr);
      }
      std::cerr << "no feasible path found\n";
      return 2;
    }

    write_trajectory_csv((out / "trajectory.csv").string(), result.spline,
                         *model);
    const TrajectoryMetrics metrics = compute_metrics(result.spline, *model);
    nlohmann::json mj;
    mj["time_s"] = metrics.time_s;
    mj["distance_m"] = metrics.distance_m;
    mj["energy_kJ"] = metrics.energy_kj;
    mj["max_abs_curvature"] = metrics.max_abs_curvature;
    mj["nodes_expanded"] = result.stats.nodes_expanded;
    mj["nodes_pruned"] = result.stats.nodes_pruned;
    mj["solver_calls"] = result.stats.solver_calls;
    mj["wall_time_s"] = result.stats.wall_time_s;
    std::ofstream(out / "metrics.json") << mj.dump(2) << "\n";

    if (want_svg) {
      write_svg((out / "plan.svg").string(), map, tri, &result.spline,
                want_trace ? &result.trace : nullptr);
    }

    std::cout << "objective value " << result.value << " ("
              << objective_name << "), sequence length "
              << result.sequence.size() << ", " << result.stats.solver_calls
              << " refinements in " << result.stats.wall_time_s << " s\n";
    return 0;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const StructuralError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace triplan
