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

#ifndef MAPFRONT_MAP_PIPELINE_HPP
#define MAPFRONT_MAP_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mapfront/eval_oracle.hpp"
#include "mapfront/moop.hpp"
#include "mapfront/random.hpp"
#include "mapfront/surrogate.hpp"

namespace mapfront {

enum class SamplingKind { UniformBox, LatinHypercube, ProvidedList };

std::string to_string(SamplingKind k);
SamplingKind parse_sampling_kind(const std::string& s);

struct MapConfig {
  std::size_t samples = 30;
  SamplingKind sampling = SamplingKind::UniformBox;
  std::vector<Coeffs> provided;
  // Empty members fall back to the oracle: unit box, oracle ranges, and
  // maximization of every objective.
  Box box;
  std::vector<MetricRange> links;
  std::vector<Direction> directions;
  // Optional objectives x tasks aggregation of the fitted surrogates.
  Eigen::MatrixXd objective_weights;
  Nsga3Params moop;
  FitOptions fit;
  std::uint64_t seed = 0;
  bool reevaluate_front = true;
  std::size_t threads = 1;
};

struct MapResult {
  ParetoFront front_predicted;
  // The same decision vectors, with objectives measured on the oracle.
  ParetoFront front_real;
  std::vector<SurrogateModel> surrogates;
  std::vector<FitReport> fit_reports;
  RecordStore records;
  std::size_t sample_evaluations = 0;
  std::size_t reevaluations = 0;
  std::size_t eval_count = 0;
};

// Draws config.samples vectors inside the box (or returns the provided list).
std::vector<Coeffs> sample_coefficients(const MapConfig& config, const Box& box, Rng& rng);

// One surrogate per task, fitted concurrently when threads > 1.
std::pair<std::vector<SurrogateModel>, std::vector<FitReport>> fit_surrogates(
    const RecordStore& store, const std::vector<MetricRange>& links, const FitOptions& opts,
    std::size_t threads = 1);

// Sample, evaluate, fit one surrogate per task, search the surrogate front
// with NSGA-III, and re-evaluate that front on the oracle.
MapResult run_map(const MapConfig& config, Oracle& oracle);

// Fitting and search only, from externally produced records.
MapResult run_map_on_records(const MapConfig& config, const RecordStore& store);

// Fit, search and, when `oracle` is given and config.reevaluate_front is
// set, re-evaluate on an already filled sample buffer.
MapResult map_from_store(const MapConfig& config, RecordStore store, Oracle* oracle);

Box resolve_box(const MapConfig& config, Eigen::Index dimension);

// Objective spec built from fitted surrogates and the resolved config.
ObjectiveSpec make_objective_spec(const MapConfig& config, std::vector<SurrogateModel> surrogates,
                                  const Box& box);

}  // namespace mapfront

#endif  // MAPFRONT_MAP_PIPELINE_HPP
