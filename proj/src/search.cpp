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

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace triplan {

Eigen::MatrixXd default_prune_weight(int state_dim) {
  Eigen::MatrixXd w =
      Eigen::MatrixXd::Identity(state_dim, state_dim) * 1e-6;
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;
  return w;
}

namespace {

struct Node {
  std::vector<int> sequence;
  double v = 0.0;
  double qbar = 0.0;
  Eigen::VectorXd endpoint;
  TrajectorySpline spline;
  int parent = -1;
};

// Open-list key implementing the (qbar, length, lexicographic ids) order.
using OpenKey = std::tuple<double, size_t, std::vector<int>>;

class SearchEngine {
 public:
  SearchEngine(const PlanContext& ctx, const BoundaryState& x0,
               const BoundaryState& xf, const PlannerConfig& config)
      : ctx_(ctx),
        x0_(x0),
        xf_(xf),
        config_(config),
        goal_pos_(xf.position_point()),
        weight_(config.prune_weight.size()
                    ? config.prune_weight
                    : default_prune_weight(ctx.model.state_dim())) {}

  PlanResult run() {
    const auto t_start = std::chrono::steady_clock::now();

    const int start_tri = locate(ctx_.triangulation, x0_.position_point());
    goal_tri_ = locate(ctx_.triangulation, goal_pos_);

    // Root sequence [T0]; its refinement seeds the open list, and when the
    // goal shares the triangle it immediately forms an incumbent.
    Node root;
    root.sequence = {start_tri};
    const SequenceGeometry root_geo =
        make_sequence_geometry(ctx_.triangulation, root.sequence);
    const RefinementResult root_v = solve_v(
        ctx_.model, ctx_.objective, root_geo, x0_, config_.transcription);
    ++stats_.solver_calls;
    if (root_v.optimal()) {
      root.v = root_v.value;
      root.endpoint = root_v.endpoint;
      root.spline = root_v.spline;
      root.qbar =
          root.v + ctx_.objective.heuristic(ctx_.model, root.endpoint,
                                            goal_pos_);
      admit(root);
    } else {
      ++stats_.dead_ends;
    }
    if (goal_tri_ == start_tri) {
      complete(root.sequence, -1,
               root_v.optimal() ? &root_v.spline : nullptr);
    }

    if (config_.workers <= 1) {
      worker_loop();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(config_.workers);
      for (int i = 0; i < config_.workers; ++i) {
        pool.emplace_back([this] { worker_loop(); });
      }
      for (std::thread& th : pool) th.join();
    }

    PlanResult out;
    out.stats = stats_;
    out.trace = std::move(trace_);
    if (incumbent_ >= 0) {
      out.found = true;
      out.sequence = nodes_[incumbent_].sequence;
      out.value = incumbent_value_;
      out.spline = nodes_[incumbent_].spline;
    }
    for (const auto& [key, id] : open_) {
      out.remnants.push_back({nodes_[id].sequence, nodes_[id].v,
                              nodes_[id].qbar, nodes_[id].endpoint});
    }
    out.stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return out;
  }

 private:
  void trace(TraceEvent::Kind kind, const std::vector<int>& seq, double value,
             double qbar) {
    trace_.push_back({kind, seq, value, qbar});
  }

  // Inserts an already-solved node unless an admitted node dominates it.
  // Caller holds the lock (or runs single-threaded).
  void admit(Node node) {
    // Dominance test against admitted nodes ending in the same triangle; at
    // prune_eps == 0 only an exactly matching endpoint rejects.
    const auto it = by_last_.find(node.sequence.back());
    if (it != by_last_.end()) {
      for (const int other : it->second) {
        const Node& o = nodes_[other];
        if (o.v > node.v) continue;
        const Eigen::VectorXd d = o.endpoint - node.endpoint;
        if (d.dot(weight_ * d) <= config_.prune_eps) {
          ++stats_.nodes_pruned;
          trace(TraceEvent::Kind::Prune, node.sequence, node.v, node.qbar);
          return;
        }
      }
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(node));
    by_last_[nodes_[id].sequence.back()].push_back(id);
    open_.emplace(OpenKey{nodes_[id].qbar, nodes_[id].sequence.size(),
                          nodes_[id].sequence},
                  id);
    ++stats_.nodes_admitted;
    trace(TraceEvent::Kind::Admit, nodes_[id].sequence, nodes_[id].v,
          nodes_[id].qbar);
  }

  // Fixed-endpoint refinement of a complete sequence; updates the incumbent.
  // Called without the lock; re-locks to apply results.
  void complete(const std::vector<int>& sequence, int parent,
                const TrajectorySpline* warm) {
    const SequenceGeometry geo =
        make_sequence_geometry(ctx_.triangulation, sequence);
    const RefinementResult res = solve_q(ctx_.model, ctx_.objective, geo, x0_,
                                         xf_, config_.transcription, warm);
    std::lock_guard<std::mutex> lk(mu_);
    ++stats_.completions;
    ++stats_.nodes_expanded;
    ++stats_.solver_calls;
    if (!res.optimal()) {
      ++stats_.dead_ends;
      trace(TraceEvent::Kind::DeadEnd, sequence, 0.0, 0.0);
      return;
    }
    if (config_.audit_lower_bounds) {
      // Every ancestor's lower bound must hold for this completion.
      for (int anc = parent; anc >= 0; anc = nodes_[anc].parent) {
        if (nodes_[anc].qbar >
            res.value + 1e-6 * (1.0 + std::abs(res.value))) {
          ++stats_.lemma_violations;
        }
      }
    }
    if (incumbent_ < 0 || res.value < incumbent_value_) {
      Node node;
      node.sequence = sequence;
      node.v = res.value;
      node.qbar = res.value;
      node.endpoint = res.endpoint;
      node.spline = res.spline;
      node.parent = parent;
      const int id = static_cast<int>(nodes_.size());
      nodes_.push_back(std::move(node));
      incumbent_ = id;
      incumbent_value_ = res.value;
      trace(TraceEvent::Kind::Incumbent, sequence, res.value, res.value);
      cv_.notify_all();
    }
  }

  bool next_work(int* node_id) {
    std::unique_lock<std::mutex> lk(mu_);
    for (;;) {
      if (done_) return false;
      if (open_.empty()) {
        if (in_flight_ == 0) {
          done_ = true;
          trace(TraceEvent::Kind::Terminate, {}, incumbent_value_, 0.0);
          cv_.notify_all();
          return false;
        }
        cv_.wait(lk);
        continue;
      }
      const auto it = open_.begin();
      const int id = it->second;
      if (incumbent_ >= 0 && nodes_[id].qbar >= incumbent_value_) {
        if (in_flight_ == 0) {
          done_ = true;
          trace(TraceEvent::Kind::Terminate, nodes_[id].sequence,
                incumbent_value_, nodes_[id].qbar);
          cv_.notify_all();
          return false;
        }
        cv_.wait(lk);  // in-flight work may still lower the bound picture
        continue;
      }
      open_.erase(it);
      ++in_flight_;
      ++stats_.nodes_expanded;
      trace(TraceEvent::Kind::Expand, nodes_[id].sequence, nodes_[id].v,
            nodes_[id].qbar);
      *node_id = id;
      return true;
    }
  }

  void worker_loop() {
    int id = -1;
    while (next_work(&id)) {
      expand(id);
      std::lock_guard<std::mutex> lk(mu_);
      --in_flight_;
      cv_.notify_all();
    }
  }

  void expand(int node_id) {
    std::vector<int> parent_seq;
    {
      std::lock_guard<std::mutex> lk(mu_);
      parent_seq = nodes_[node_id].sequence;
    }
    const int last = parent_seq.back();
    for (const auto& [nbr, edge] : ctx_.graph.neighbors[last]) {
      if (std::find(parent_seq.begin(), parent_seq.end(), nbr) !=
          parent_seq.end()) {
        continue;  // each triangle is visited at most once
      }
      std::vector<int> child_seq = parent_seq;
      child_seq.push_back(nbr);
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (dead_.count(child_seq)) {
          ++stats_.dead_cache_hits;
          continue;
        }
        if (done_) return;
      }
      if (nbr == goal_tri_) {
        complete(child_seq, node_id, &nodes_[node_id].spline);
        continue;
      }
      const SequenceGeometry geo =
          make_sequence_geometry(ctx_.triangulation, child_seq);
      const RefinementResult res =
          solve_v(ctx_.model, ctx_.objective, geo, x0_,
                  config_.transcription, &nodes_[node_id].spline);
      std::lock_guard<std::mutex> lk(mu_);
      ++stats_.solver_calls;
      if (!res.optimal()) {
        dead_.insert(child_seq);
        ++stats_.dead_ends;
        trace(TraceEvent::Kind::DeadEnd, child_seq, 0.0, 0.0);
        continue;
      }
      Node child;
      child.sequence = std::move(child_seq);
      child.v = res.value;
      child.endpoint = res.endpoint;
      child.spline = res.spline;
      child.parent = node_id;
      child.qbar = res.value + ctx_.objective.heuristic(
                                   ctx_.model, res.endpoint, goal_pos_);
      admit(std::move(child));
      cv_.notify_all();
    }
  }

  const PlanContext& ctx_;
  const BoundaryState& x0_;
  const BoundaryState& xf_;
  const PlannerConfig& config_;
  Point2 goal_pos_;
  Eigen::MatrixXd weight_;
  int goal_tri_ = -1;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Node> nodes_;
  std::map<OpenKey, int> open_;
  std::map<int, std::vector<int>> by_last_;
  std::set<std::vector<int>> dead_;
  int incumbent_ = -1;
  double incumbent_value_ = 0.0;
  int in_flight_ = 0;
  bool done_ = false;
  SearchStats stats_;
  std::vector<TraceEvent> trace_;
};

}  // namespace

PlanResult plan(const PlanContext& ctx, const BoundaryState& x0,
                const BoundaryState& xf, const PlannerConfig& config) {
  PlannerConfig sequential = config;
  sequential.workers = 1;
  SearchEngine engine(ctx, x0, xf, sequential);
  return engine.run();
}

PlanResult parallel_plan(const PlanContext& ctx, const BoundaryState& x0,
                         const BoundaryState& xf,
                         const PlannerConfig& config) {
  if (config.workers <= 1) return plan(ctx, x0, xf, config);
  SearchEngine engine(ctx, x0, xf, config);
  return engine.run();
}

}  // namespace triplan
