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

#ifndef MAPFRONT_SURROGATE_HPP
#define MAPFRONT_SURROGATE_HPP

#include <cstddef>
#include <utility>

#include <Eigen/Core>

#include "mapfront/core_model.hpp"
#include "mapfront/eval_oracle.hpp"

namespace mapfront {

// Number of quadratic-model coefficients for N tasks: N(N+3)/2 + 1.
constexpr std::size_t design_size(std::size_t n) { return n * (n + 3) / 2 + 1; }

// Predictor row c_1^2..c_N^2, c_i c_j (i<j, lexicographic), c_1..c_N, 1.
Eigen::VectorXd build_design_row(const Coeffs& c);

// One design row per record.
Eigen::MatrixXd build_design_matrix(const RecordStore& store);

// link(1/2 c^T A c + b^T c + e). A is kept exactly symmetric: it can only be
// set from an upper triangle or from regression coefficients.
class SurrogateModel {
 public:
  SurrogateModel() = default;

  static SurrogateModel from_parts(const Eigen::MatrixXd& A, Eigen::VectorXd b, double e,
                                   MetricRange link);
  // `upper` is row-major i <= j, N(N+1)/2 entries.
  static SurrogateModel from_upper_triangle(const std::vector<double>& upper,
                                            Eigen::VectorXd b, double e, MetricRange link);
  // Inverse of coefficients(): diagonal A entries are twice the fitted
  // squared-term coefficients, off-diagonal entries equal the interaction
  // coefficients.
  static SurrogateModel from_coefficients(const Eigen::VectorXd& beta, std::size_t n,
                                          MetricRange link);

  std::size_t task_dimension() const { return static_cast<std::size_t>(b_.size()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  double e() const { return e_; }
  const MetricRange& link() const { return link_; }

  std::vector<double> upper_triangle() const;
  // Coefficients in design-row order.
  Eigen::VectorXd coefficients() const;

  // Pre-link quadratic score.
  double score(const Coeffs& c) const { return quadratic_form(A_, b_, e_, c); }
  double predict(const Coeffs& c) const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double e_ = 0.0;
  MetricRange link_;
};

inline double predict(const SurrogateModel& model, const Coeffs& c) { return model.predict(c); }

struct FitReport {
  double r_squared = 0.0;
  double residual_mse = 0.0;
  bool condition_warning = false;
  bool converged = true;
  std::size_t iterations = 0;
};

struct FitOptions {
  std::size_t max_iterations = 10000;
  std::size_t window = 50;
  double relative_tolerance = 1e-10;
  double clip_epsilon = 1e-6;
  double condition_limit = 1e12;
};

// Ordinary least squares on the quadratic design, identity link.
std::pair<SurrogateModel, FitReport> fit_closed_form(const RecordStore& store, std::size_t task,
                                                     const FitOptions& opts = {});

// MSE fit under a sigmoid/softplus/identity link by gradient descent with
// backtracking line search. The descent direction is preconditioned by the
// (ridge-guarded) normal matrix C^T C, which makes the identity-link case a
// single exact step.
std::pair<SurrogateModel, FitReport> fit_link(const RecordStore& store, std::size_t task,
                                              const MetricRange& link,
                                              const FitOptions& opts = {});

// Dispatches on the link: closed form for unbounded metrics, fit_link otherwise.
std::pair<SurrogateModel, FitReport> fit_surrogate(const RecordStore& store, std::size_t task,
                                                   const MetricRange& link,
                                                   const FitOptions& opts = {});

// 1 - SS_res / SS_tot, defined as 0 when the targets have zero variance.
double r_squared(const SurrogateModel& model, const RecordStore& store, std::size_t task);

// Mean squared error of `model` against `task` targets, (1/K) sum (pred - y)^2,
// as a function of the coefficient vector. Exposed for gradient checks.
class LinkObjective {
 public:
  LinkObjective(Eigen::MatrixXd design, Eigen::VectorXd targets, MetricRange link);

  double value(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;

  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& targets() const { return targets_; }

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd targets_;
  MetricRange link_;
};

}  // namespace mapfront

#endif  // MAPFRONT_SURROGATE_HPP
