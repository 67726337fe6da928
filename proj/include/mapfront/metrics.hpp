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

#ifndef MAPFRONT_METRICS_HPP
#define MAPFRONT_METRICS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mapfront/eval_oracle.hpp"
#include "mapfront/moop.hpp"

namespace mapfront {

// Non-negative task weights summing to one.
class PreferenceVector {
 public:
  // Normalizes `weights`; they must be non-negative with a positive sum.
  explicit PreferenceVector(Eigen::VectorXd weights);

  const Eigen::VectorXd& weights() const { return weights_; }
  double operator[](Eigen::Index i) const { return weights_[i]; }
  Eigen::Index size() const { return weights_.size(); }

 private:
  Eigen::VectorXd weights_;
};

// Fraction of the K*K*N per-task comparisons where a sampled member of `a`
// is strictly better than a sampled member of `b`, both re-evaluated on the
// oracle. K members are drawn from each front: without replacement when the
// front has at least K points, with replacement otherwise.
double win_rate(const ParetoFront& a, const ParetoFront& b, Oracle& oracle, std::size_t k,
                std::uint64_t seed);

// The comparison count itself, on already evaluated metric vectors.
double win_rate_of_values(const std::vector<Eigen::VectorXd>& a,
                          const std::vector<Eigen::VectorXd>& b,
                          const std::vector<Direction>& directions);

enum class DistanceMode { Raw, Normalized };

// (1/K) (sum_i d_i^p)^(1/p), d_i the distance from front point i to the
// nearest reference point. Normalized mode first maps every objective
// affinely onto [0,1] using the extremes of both sets together.
double generational_distance(const ParetoFront& front, const ParetoFront& reference,
                             double p = 2.0, DistanceMode mode = DistanceMode::Raw);
double inverted_generational_distance(const ParetoFront& front, const ParetoFront& reference,
                                      double p = 2.0, DistanceMode mode = DistanceMode::Raw);

struct WeightedChoice {
  std::size_t index = 0;
  Coeffs c;
  double value = 0.0;
};

// Front member maximizing sum_n pref_n * m_n on re-evaluated metrics; the
// lowest index wins ties.
WeightedChoice preference_weighted_best(const ParetoFront& front, const PreferenceVector& pref,
                                        Oracle& oracle);

struct ComparisonReport {
  double win_rate = 0.0;
  double gd = 0.0;
  double igd = 0.0;
  double gd_plus_igd = 0.0;
  std::size_t k = 0;
  double p = 2.0;
  std::uint64_t seed = 0;
  bool normalized = true;
};

ComparisonReport compare_fronts(const ParetoFront& a, const ParetoFront& b, Oracle& oracle,
                                std::size_t k, std::uint64_t seed, double p = 2.0,
                                DistanceMode mode = DistanceMode::Normalized);

}  // namespace mapfront

#endif  // MAPFRONT_METRICS_HPP
