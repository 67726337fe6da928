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

#ifndef MAPFRONT_NESTED_HPP
#define MAPFRONT_NESTED_HPP

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mapfront/core_model.hpp"
#include "mapfront/eval_oracle.hpp"
#include "mapfront/map_pipeline.hpp"
#include "mapfront/metrics.hpp"
#include "mapfront/moop.hpp"

namespace mapfront {

struct TaskNode {
  std::vector<std::size_t> task_ids;  // sorted original task indices
  double loss = 0.0;
  ParameterVector params;
};

// Pair (i, j), i < j, minimizing |loss_i - loss_j|; the lexicographically
// smallest pair wins ties.
std::pair<std::size_t, std::size_t> pair_closest(const std::vector<TaskNode>& nodes);

// Front point maximizing sum_k pref_k * s_k * f_k, with s_k = +1 for a
// maximized objective and -1 for a minimized one. Lowest index wins ties.
Coeffs select_from_front(const ParetoFront& front, const PreferenceVector& pref);

// Two-dimensional view of a pair merge: c = (c_a, c_b) maps to
// pre + c_a (theta_a - pre) + c_b (theta_b - pre), measured on `tasks`.
class MergeOracle final : public Oracle {
 public:
  MergeOracle(ParameterOracle& base, ParameterVector pretrained, const ParameterVector& a,
              const ParameterVector& b, std::vector<std::size_t> tasks);

  Eigen::Index dimension() const override { return 2; }
  std::size_t task_count() const override { return tasks_.size(); }
  std::vector<MetricRange> ranges() const override;
  ParameterVector merged(const Coeffs& c) const;

 protected:
  Eigen::VectorXd do_evaluate(const Coeffs& c) override;

 private:
  ParameterOracle& base_;
  ParameterVector pretrained_;
  TaskMatrix vectors_;
  std::vector<std::size_t> tasks_;
};

struct NestedConfig {
  std::size_t per_pair_budget = 20;  // T samples per pair MAP
  Box box;                           // 2-D; empty means [0,1]^2
  Direction direction = Direction::Maximize;
  Nsga3Params moop;
  FitOptions fit;
  std::uint64_t seed = 0;
};

struct MergeStep {
  std::size_t round = 0;
  std::vector<std::size_t> left_tasks;
  std::vector<std::size_t> right_tasks;
  double left_loss = 0.0;
  double right_loss = 0.0;
  Eigen::Vector2d pair_preference;
  Coeffs chosen;
  ParetoFront front;
  std::size_t map_evaluations = 0;
};

struct RoundSummary {
  std::size_t round = 0;
  std::size_t map_evaluations = 0;
  std::size_t probe_evaluations = 0;
  std::vector<std::vector<std::size_t>> carried;  // nodes passed through unmerged
};

struct NestedResult {
  ParameterVector final_params;
  std::vector<std::size_t> final_tasks;
  // Task evaluations spent inside pair MAP runs (T per member task per pair).
  std::size_t map_evaluations = 0;
  // Task evaluations spent measuring node losses for pairing.
  std::size_t probe_evaluations = 0;
  std::size_t eval_count = 0;
  std::vector<MergeStep> steps;
  std::vector<RoundSummary> rounds;
};

// Seed of the pair MAP run for pair `pair` of round `round`.
std::uint64_t nested_pair_seed(std::uint64_t seed, std::size_t round, std::size_t pair);

// Objective aggregation for a pair MAP over `tasks` (left members first):
// row 0 weights the left node's tasks, row 1 the right node's, each by the
// renormalized preferences of its members. Empty for two singleton nodes.
Eigen::MatrixXd pair_objective_weights(const std::vector<std::size_t>& left,
                                       const std::vector<std::size_t>& right,
                                       const PreferenceVector& pref);

// Repeated pair, 2-task MAP, select, merge until one node remains. Node
// losses are re-measured on the oracle at the start of every round.
NestedResult nested_merge(const ParameterVector& pretrained, std::vector<TaskNode> nodes,
                          const PreferenceVector& pref, const NestedConfig& config,
                          ParameterOracle& oracle);

nlohmann::json merge_tree_to_json(const NestedResult& result);

}  // namespace mapfront

#endif  // MAPFRONT_NESTED_HPP
