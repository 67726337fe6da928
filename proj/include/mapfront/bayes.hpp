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

#ifndef MAPFRONT_BAYES_HPP
#define MAPFRONT_BAYES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "mapfront/eval_oracle.hpp"
#include "mapfront/map_pipeline.hpp"
#include "mapfront/moop.hpp"
#include "mapfront/random.hpp"
#include "mapfront/surrogate.hpp"

namespace mapfront {

// Exploration mass spread evenly over the bins: every bin keeps at least
// kExplorationMass / bin_count of the probability.
inline constexpr double kExplorationMass = 0.01;

// Bin scores at or below this fraction of the mean squared metric are
// treated as zero.
inline constexpr double kExactFitTolerance = 1e-20;

struct BinPosterior {
  std::size_t dimension = 0;
  std::size_t bins_per_axis = 0;
  Eigen::VectorXd scores;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  std::vector<std::size_t> counts;
  Eigen::VectorXd probabilities;

  std::size_t bin_count() const { return static_cast<std::size_t>(scores.size()); }
  double floor() const;
};

std::size_t default_bins_per_axis(std::size_t dimension);
std::size_t angular_bin_count(std::size_t dimension, std::size_t k);

// N-1 hyperspherical angles, phi_i = atan2(|c_{i+1..}|, c_i).
std::vector<double> hyperspherical_angles(const Coeffs& c);

// Mixed-radix index of the binned angles, first angle most significant.
std::size_t angular_bin_index(const Coeffs& c, std::size_t k);

// (1 - kExplorationMass) * normalized max(score, 0) + kExplorationMass / K.
// All-nonpositive scores give the uniform distribution.
Eigen::VectorXd bin_probabilities(const Eigen::VectorXd& scores);

// Fills probabilities from scores.
BinPosterior make_posterior(std::size_t dimension, std::size_t k, Eigen::VectorXd scores);

struct BootstrapStats {
  double mean = 0.0;
  double std = 0.0;
};

// Mean of `losses` and the population standard deviation of Q resampled
// means, each dropping ceil(alpha * count) entries (at most count - 1).
BootstrapStats bootstrap_statistics(const std::vector<double>& losses, std::size_t q,
                                    double alpha, std::uint64_t seed);

// Per-record loss: squared surrogate error summed over tasks.
double surrogate_loss(const EvaluationRecord& record, const std::vector<SurrogateModel>& models);

// Scores mean + std / 2 per occupied bin; empty bins take the largest
// occupied score. Records at the origin are not binned.
BinPosterior bootstrap_bin_scores(const RecordStore& records,
                                  const std::vector<SurrogateModel>& surrogates, std::size_t k,
                                  std::size_t q, double alpha, Rng& rng);

struct BinDraw {
  Coeffs c;
  std::size_t bin = 0;
};

// Bins drawn from post.probabilities; inside a bin the angles are uniform
// over the wedge and the radius uniform over the segment inside the box.
std::vector<BinDraw> posterior_draws(const BinPosterior& post, std::size_t n, const Box& box,
                                     Rng& rng);
std::vector<Coeffs> posterior_sample(const BinPosterior& post, std::size_t n, const Box& box,
                                     Rng& rng);

struct BasmConfig {
  std::size_t iterations = 1;            // J adaptive rounds
  std::size_t initial = 0;               // n0; 0 means N(N+3)/2 + 1
  std::vector<std::size_t> per_round{3}; // n_j; a single entry applies to every round
  std::size_t bins_per_axis = 0;         // 0: default_bins_per_axis(N)
  std::size_t bootstrap = 30;
  double alpha = 0.2;
  std::uint64_t seed = 0;
  Box box;
  std::vector<MetricRange> links;
  std::vector<Direction> directions;
  Nsga3Params moop;
  FitOptions fit;
  bool reevaluate_front = true;
  std::size_t threads = 1;
  // Ignore the bootstrap and treat every bin as equally promising.
  bool force_equal_scores = false;
};

struct RoundDiagnostics {
  std::size_t round = 0;
  BinPosterior posterior;
  std::vector<BinDraw> draws;
  std::vector<double> r_squared;
};

struct BayesResult {
  MapResult map;
  std::vector<RoundDiagnostics> rounds;
  std::vector<std::string> warnings;
};

// The MAP config that run_bayesian_map uses for its initial round and its
// final search; with iterations == 0 the run equals run_map on it.
MapConfig basm_map_config(const BasmConfig& config);

BayesResult run_bayesian_map(const BasmConfig& config, Oracle& oracle);

nlohmann::json bayes_diagnostics_to_json(const BayesResult& result);

}  // namespace mapfront

#endif  // MAPFRONT_BAYES_HPP
