// Copyright 2026 The mapfront Authors. All Rights Reserved.
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
// =============================================================================

#include "mapfront/nested.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "mapfront/errors.hpp"
#include "mapfront/random.hpp"
#include "mapfront/serialization.hpp"

namespace mapfront {

std::pair<std::size_t, std::size_t> pair_closest(const std::vector<TaskNode>& nodes) {
  require(nodes.size() >= 2, ErrorKind::TooFewNodes, "pairing needs at least two nodes");
  std::pair<std::size_t, std::size_t> best{0, 1};
  double gap = std::abs(nodes[0].loss - nodes[1].loss);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double d = std::abs(nodes[i].loss - nodes[j].loss);
      if (d < gap) {
        gap = d;
        best = {i, j};
      }
    }
  }
  return best;
}

Coeffs select_from_front(const ParetoFront& front, const PreferenceVector& pref) {
  require(!front.empty(), ErrorKind::EmptyFront, "cannot select from an empty front");
  const Eigen::Index m = front.points.front().f.size();
  require(pref.size() == m, ErrorKind::LengthMismatch,
          "preference length differs from the objective count");
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (static_cast<std::size_t>(k) < front.directions.size() &&
        front.directions[k] == Direction::Minimize) {
      sign[k] = -1.0;
    }
  }
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    const double v = (pref.weights().array() * sign.array() * front.points[i].f.array()).sum();
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return front.points[best].c;
}

MergeOracle::MergeOracle(ParameterOracle& base, ParameterVector pretrained,
                         const ParameterVector& a, const ParameterVector& b,
                         std::vector<std::size_t> tasks)
    : base_(base),
      pretrained_(std::move(pretrained)),
      vectors_(compute_task_vectors(pretrained_, {a, b})),
      tasks_(std::move(tasks)) {
  require(!tasks_.empty(), ErrorKind::Validation, "a merge needs at least one task");
  for (auto t : tasks_) {
    require(t < base_.task_count(), ErrorKind::Validation, "task index out of range");
  }
}

std::vector<MetricRange> MergeOracle::ranges() const {
  const auto all = base_.ranges();
  std::vector<MetricRange> out;
  out.reserve(tasks_.size());
  for (auto t : tasks_) out.push_back(all[t]);
  return out;
}

ParameterVector MergeOracle::merged(const Coeffs& c) const {
  return merge_model(pretrained_, vectors_, c);
}

Eigen::VectorXd MergeOracle::do_evaluate(const Coeffs& c) {
  return base_.evaluate(merged(c), tasks_);
}

std::uint64_t nested_pair_seed(std::uint64_t seed, std::size_t round, std::size_t pair) {
  return derive_seed(derive_seed(derive_seed(seed, "nested"), round), pair);
}

namespace {

// Member weights of one node, renormalized; equal when they sum to zero.
Eigen::VectorXd member_weights(const std::vector<std::size_t>& tasks,
                               const PreferenceVector& pref) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(tasks.size()));
  for (std::size_t i = 0; i < tasks.size(); ++i) w[i] = pref[tasks[i]];
  const double total = w.sum();
  if (total > 0.0) return w / total;
  return Eigen::VectorXd::Constant(w.size(), 1.0 / static_cast<double>(w.size()));
}

double preference_mass(const std::vector<std::size_t>& tasks, const PreferenceVector& pref) {
  double s = 0.0;
  for (auto t : tasks) s += pref[t];
  return s;
}

double node_loss(const TaskNode& node, const PreferenceVector& pref, Direction dir,
                 ParameterOracle& oracle) {
  const Eigen::VectorXd m = oracle.evaluate(node.params, node.task_ids);
  const Eigen::VectorXd w = member_weights(node.task_ids, pref);
  const double signed_sum = w.dot(m);
  return dir == Direction::Maximize ? -signed_sum : signed_sum;
}

}  // namespace

Eigen::MatrixXd pair_objective_weights(const std::vector<std::size_t>& left,
                                       const std::vector<std::size_t>& right,
                                       const PreferenceVector& pref) {
  if (left.size() == 1 && right.size() == 1) return {};
  const auto nl = static_cast<Eigen::Index>(left.size());
  const auto nr = static_cast<Eigen::Index>(right.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, nl + nr);
  w.row(0).head(nl) = member_weights(left, pref).transpose();
  w.row(1).tail(nr) = member_weights(right, pref).transpose();
  return w;
}

NestedResult nested_merge(const ParameterVector& pretrained, std::vector<TaskNode> nodes,
                          const PreferenceVector& pref, const NestedConfig& config,
                          ParameterOracle& oracle) {
  require(nodes.size() >= 2, ErrorKind::TooFewNodes, "nested merging needs at least two nodes");
  require(static_cast<std::size_t>(pref.size()) == oracle.task_count(), ErrorKind::LengthMismatch,
          "preference length differs from the task count");
  std::vector<bool> seen(oracle.task_count(), false);
  for (auto& node : nodes) {
    require(!node.task_ids.empty(), ErrorKind::Validation, "node without tasks");
    require(node.params.size() == pretrained.size(), ErrorKind::LengthMismatch,
            "node parameters differ in length from the pre-trained vector");
    std::sort(node.task_ids.begin(), node.task_ids.end());
    for (auto t : node.task_ids) {
      require(t < seen.size(), ErrorKind::Validation, "task index out of range");
      require(!seen[t], ErrorKind::Validation, "task ids overlap across nodes");
      seen[t] = true;
    }
  }

  NestedResult result;
  const std::size_t start = oracle.task_evaluations();
  for (std::size_t round = 0; nodes.size() > 1; ++round) {
    RoundSummary summary;
    summary.round = round;

    std::size_t before = oracle.task_evaluations();
    for (auto& node : nodes) node.loss = node_loss(node, pref, config.direction, oracle);
    summary.probe_evaluations = oracle.task_evaluations() - before;

    std::vector<TaskNode> pool = std::move(nodes);
    std::vector<TaskNode> next;
    std::optional<TaskNode> carry;
    if (pool.size() % 2 == 1) {
      std::vector<std::size_t> order(pool.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return pool[a].loss < pool[b].loss; });
      const std::size_t median = order[order.size() / 2];
      carry = std::move(pool[median]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(median));
    }

    for (std::size_t pair = 0; !pool.empty(); ++pair) {
      const auto [i, j] = pair_closest(pool);
      TaskNode left = std::move(pool[i]);
      TaskNode right = std::move(pool[j]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));

      std::vector<std::size_t> tasks = left.task_ids;
      tasks.insert(tasks.end(), right.task_ids.begin(), right.task_ids.end());
      MergeOracle merge(oracle, pretrained, left.params, right.params, tasks);

      MapConfig map;
      map.samples = config.per_pair_budget;
      map.box = config.box;
      map.directions = {config.direction, config.direction};
      map.objective_weights = pair_objective_weights(left.task_ids, right.task_ids, pref);
      map.moop = config.moop;
      map.fit = config.fit;
      map.seed = nested_pair_seed(config.seed, round, pair);
      map.reevaluate_front = false;

      before = oracle.task_evaluations();
      MapResult run = run_map(map, merge);
      const std::size_t spent = oracle.task_evaluations() - before;

      const double pl = preference_mass(left.task_ids, pref);
      const double pr = preference_mass(right.task_ids, pref);
      Eigen::Vector2d pair_pref =
          pl + pr > 0.0 ? Eigen::Vector2d(pl / (pl + pr), pr / (pl + pr)) : Eigen::Vector2d(0.5, 0.5);
      const Coeffs chosen = select_from_front(run.front_predicted, PreferenceVector(pair_pref));

      TaskNode merged;
      merged.task_ids = tasks;
      std::sort(merged.task_ids.begin(), merged.task_ids.end());
      merged.params = merge.merged(chosen);
      merged.loss = pair_pref[0] * left.loss + pair_pref[1] * right.loss;

      MergeStep step;
      step.round = round;
      step.left_tasks = left.task_ids;
      step.right_tasks = right.task_ids;
      step.left_loss = left.loss;
      step.right_loss = right.loss;
      step.pair_preference = pair_pref;
      step.chosen = chosen;
      step.front = std::move(run.front_predicted);
      step.map_evaluations = spent;
      result.steps.push_back(std::move(step));

      summary.map_evaluations += spent;
      next.push_back(std::move(merged));
    }
    if (carry) {
      summary.carried.push_back(carry->task_ids);
      next.push_back(std::move(*carry));
    }
    result.map_evaluations += summary.map_evaluations;
    result.probe_evaluations += summary.probe_evaluations;
    result.rounds.push_back(std::move(summary));
    nodes = std::move(next);
  }

  result.final_params = std::move(nodes.front().params);
  result.final_tasks = std::move(nodes.front().task_ids);
  result.eval_count = oracle.task_evaluations() - start;
  return result;
}

nlohmann::json merge_tree_to_json(const NestedResult& result) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : result.steps) {
    steps.push_back({{"round", s.round},
                     {"left", s.left_tasks},
                     {"right", s.right_tasks},
                     {"left_loss", s.left_loss},
                     {"right_loss", s.right_loss},
                     {"pair_preference", {s.pair_preference[0], s.pair_preference[1]}},
                     {"c_star", vector_to_json(s.chosen)},
                     {"front_size", s.front.size()},
                     {"map_evaluations", s.map_evaluations}});
  }
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : result.rounds) {
    rounds.push_back({{"round", r.round},
                      {"map_evaluations", r.map_evaluations},
                      {"probe_evaluations", r.probe_evaluations},
                      {"carried", r.carried}});
  }
  return {{"final_tasks", result.final_tasks},
          {"map_evaluations", result.map_evaluations},
          {"probe_evaluations", result.probe_evaluations},
          {"eval_count", result.eval_count},
          {"steps", std::move(steps)},
          {"rounds", std::move(rounds)}};
}

}  // namespace mapfront
