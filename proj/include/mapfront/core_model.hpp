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

#ifndef MAPFRONT_CORE_MODEL_HPP
#define MAPFRONT_CORE_MODEL_HPP

#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace mapfront {

// Scaling coefficients c, one weight per task vector.
using Coeffs = Eigen::VectorXd;

// Flattened model parameters (pretrained, fine-tuned or merged).
struct ParameterVector {
  Eigen::VectorXd values;

  ParameterVector() = default;
  explicit ParameterVector(Eigen::VectorXd v) : values(std::move(v)) {}
  ParameterVector(std::initializer_list<double> v);

  Eigen::Index size() const { return values.size(); }
  bool operator==(const ParameterVector& other) const {
    return values.size() == other.values.size() && values == other.values;
  }
};

// Task vectors stored column-wise, d x N.
class TaskMatrix {
 public:
  TaskMatrix() = default;
  explicit TaskMatrix(Eigen::MatrixXd columns);

  Eigen::Index dimension() const { return columns_.rows(); }
  Eigen::Index task_count() const { return columns_.cols(); }
  const Eigen::MatrixXd& columns() const { return columns_; }
  Eigen::VectorXd column(Eigen::Index n) const { return columns_.col(n); }

 private:
  Eigen::MatrixXd columns_;
};

// v_n = finetuned[n] - pretrained.
TaskMatrix compute_task_vectors(const ParameterVector& pretrained,
                                const std::vector<ParameterVector>& finetuned);

// theta_pre + V c.
ParameterVector merge_model(const ParameterVector& pretrained, const TaskMatrix& tasks,
                            const Coeffs& c);

// ||v_n||_1 / ||theta_pre||_1 for every task column.
std::vector<double> norm_ratio(const ParameterVector& pretrained, const TaskMatrix& tasks);

// Parameter vector files. A ".bin" extension selects the binary layout
// (8-byte magic "MAPFPV01", little-endian uint64 length, little-endian
// IEEE-754 doubles); anything else is read/written as JSON, either a bare
// array or {"values": [...]}.
ParameterVector load_parameter_vector(const std::filesystem::path& path);
void save_parameter_vector(const ParameterVector& v, const std::filesystem::path& path);

}  // namespace mapfront

#endif  // MAPFRONT_CORE_MODEL_HPP
