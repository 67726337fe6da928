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

#ifndef MAPFRONT_SERIALIZATION_HPP
#define MAPFRONT_SERIALIZATION_HPP

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "mapfront/eval_oracle.hpp"
#include "mapfront/metrics.hpp"
#include "mapfront/moop.hpp"
#include "mapfront/surrogate.hpp"

namespace mapfront {

// Reals are written in shortest round-trip form (at most 17 significant
// digits), so every file reloads bit-exactly.

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

// Row-major nested arrays.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json range_to_json(const MetricRange& r);
// Accepts {kind, l, u} or the shorthand "identity", "sigmoid[:l:u]",
// "softplus[:l]" (defaults (0, 1) and 0).
MetricRange range_from_json(const nlohmann::json& j);
MetricRange range_from_text(const std::string& text);

nlohmann::json box_to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);

// {N, link: {kind, l, u}, A_upper_triangle, b, e}
nlohmann::json surrogate_to_json(const SurrogateModel& m);
SurrogateModel surrogate_from_json(const nlohmann::json& j);

nlohmann::json fit_report_to_json(const FitReport& r);

// {provenance, directions, spec_digest, evaluations, points: [{c, f}]}
nlohmann::json front_to_json(const ParetoFront& front);
ParetoFront front_from_json(const nlohmann::json& j);

// {N, tasks: [{A, b, e, link, cubic_gamma, noise_sigma}], noise_seed?}
nlohmann::json landscape_to_json(const SyntheticLandscape& land);
SyntheticLandscape landscape_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(const ObjectiveSpec& spec);
// Hex FNV-1a digest of the canonical (sorted-key) JSON dump.
std::string json_digest(const nlohmann::json& j);
std::string spec_digest(const ObjectiveSpec& spec);

nlohmann::json comparison_to_json(const ComparisonReport& r);

nlohmann::json read_json_file(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace mapfront

#endif  // MAPFRONT_SERIALIZATION_HPP
