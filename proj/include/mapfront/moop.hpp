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

#ifndef MAPFRONT_MOOP_HPP
#define MAPFRONT_MOOP_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mapfront/core_model.hpp"
#include "mapfront/eval_oracle.hpp"
#include "mapfront/surrogate.hpp"

namespace mapfront {

enum class Direction { Minimize, Maximize };

std::string to_string(Direction d);
Direction parse_direction(const std::string& s);

// Axis-aligned decision box, lower < upper per coordinate.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box unit(Eigen::Index n);
  static Box uniform(Eigen::Index n, double lo, double hi);
  Eigen::Index dimension() const { return lower.size(); }
  bool contains(const Coeffs& c) const;
  void validate() const;
};

struct FrontPoint {
  Coeffs c;
  Eigen::VectorXd f;
};

enum class Provenance { Amortized, Grid, Moead, Ingested, RandomSearch };

std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& s);

struct ParetoFront {
  std::vector<FrontPoint> points;
  Provenance provenance = Provenance::Amortized;
  std::vector<Direction> directions;
  std::string spec_digest;
  // Objective evaluations spent producing the front.
  std::size_t evaluations = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Surrogate objectives over a box. With a non-empty `weights` matrix
// (objectives x surrogates) each objective is a weighted sum of surrogate
// predictions; otherwise objective n is surrogate n.
struct ObjectiveSpec {
  std::vector<SurrogateModel> surrogates;
  std::vector<Direction> directions;
  Box box;
  Eigen::MatrixXd weights;

  std::size_t objective_count() const;
  Eigen::Index dimension() const { return box.dimension(); }
  Eigen::VectorXd evaluate(const Coeffs& c) const;
  void validate() const;
};

// Objective values flipped so that smaller is better in every coordinate.
Eigen::VectorXd to_minimization(const Eigen::VectorXd& f, const std::vector<Direction>& directions);

bool dominates(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               const std::vector<Direction>& directions);

// Members not dominated by any other member, in input order. Exact duplicate
// decision vectors are collapsed to their first occurrence.
ParetoFront non_dominated_filter(const std::vector<FrontPoint>& points,
                                 const std::vector<Direction>& directions,
                                 Provenance provenance = Provenance::Amortized);

// Indices of successive non-domination layers (fast non-dominated sort).
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<Eigen::VectorXd>& f);

// Das-Dennis simplex-lattice directions: all vectors with entries in
// {0, 1/p, ..., 1} summing to 1.
std::vector<Eigen::VectorXd> das_dennis(std::size_t n_objectives, std::size_t partitions);
std::size_t default_partitions(std::size_t n_objectives);

struct Nsga3Params {
  std::size_t population = 0;  // 0: smallest multiple of 4 >= max(#references, 20)
  std::size_t generations = 200;
  std::size_t partitions = 0;  // 0: default_partitions(#objectives)
  std::uint64_t seed = 0;
  double crossover_eta = 30.0;
  double crossover_rate = 1.0;
  double mutation_eta = 20.0;
  double mutation_rate = -1.0;  // < 0: 1 / #variables
};

ParetoFront nsga3_front(const ObjectiveSpec& spec, const Nsga3Params& params);

struct MoeadParams {
  std::size_t population = 100;
  std::size_t generations = 200;
  std::size_t neighborhood = 15;
  std::uint64_t seed = 0;
  double crossover_eta = 20.0;
  double mutation_eta = 20.0;
  double mutation_rate = -1.0;
};

// MOEA/D with Tchebycheff decomposition; returns its external
// non-dominated archive. Spends population * (generations + 1) evaluations.
ParetoFront moead_front(const ObjectiveSpec& spec, const MoeadParams& params);

// Full lattice with points_per_dim values per coordinate, evaluated on the
// oracle (points_per_dim^N calls).
ParetoFront grid_search_front(Oracle& oracle, const Box& box, std::size_t points_per_dim,
                              const std::vector<Direction>& directions);

// Uniform random points in the box, evaluated on the oracle.
ParetoFront random_search_front(Oracle& oracle, const Box& box, std::size_t n_points,
                                const std::vector<Direction>& directions, std::uint64_t seed);

}  // namespace mapfront

#endif  // MAPFRONT_MOOP_HPP
