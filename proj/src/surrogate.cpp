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

#include "mapfront/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "mapfront/errors.hpp"

namespace mapfront {

Eigen::VectorXd build_design_row(const Coeffs& c) {
  const Eigen::Index n = c.size();
  Eigen::VectorXd row(static_cast<Eigen::Index>(design_size(static_cast<std::size_t>(n))));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) row[k++] = c[i] * c[i];
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) row[k++] = c[i] * c[j];
  for (Eigen::Index i = 0; i < n; ++i) row[k++] = c[i];
  row[k] = 1.0;
  return row;
}

Eigen::MatrixXd build_design_matrix(const RecordStore& store) {
  require(!store.empty(), ErrorKind::EmptyStore, "record store is empty");
  const auto& recs = store.records();
  const auto n = static_cast<std::size_t>(recs.front().c.size());
  Eigen::MatrixXd design(static_cast<Eigen::Index>(recs.size()),
                         static_cast<Eigen::Index>(design_size(n)));
  for (std::size_t k = 0; k < recs.size(); ++k) {
    design.row(static_cast<Eigen::Index>(k)) = build_design_row(recs[k].c).transpose();
  }
  return design;
}

SurrogateModel SurrogateModel::from_parts(const Eigen::MatrixXd& A, Eigen::VectorXd b, double e,
                                          MetricRange link) {
  const Eigen::Index n = b.size();
  require(A.rows() == n && A.cols() == n, ErrorKind::LengthMismatch,
          "surrogate A must be N x N with N = len(b)");
  std::vector<double> upper;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) upper.push_back(A(i, j));
  return from_upper_triangle(upper, std::move(b), e, link);
}

SurrogateModel SurrogateModel::from_upper_triangle(const std::vector<double>& upper,
                                                   Eigen::VectorXd b, double e,
                                                   MetricRange link) {
  const Eigen::Index n = b.size();
  require(upper.size() == static_cast<std::size_t>(n * (n + 1) / 2), ErrorKind::LengthMismatch,
          "upper triangle has the wrong number of entries");
  SurrogateModel m;
  m.A_.resize(n, n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      m.A_(i, j) = upper[k];
      m.A_(j, i) = upper[k];
      ++k;
    }
  }
  m.b_ = std::move(b);
  m.e_ = e;
  m.link_ = link;
  require(m.A_.allFinite() && m.b_.allFinite() && std::isfinite(m.e_), ErrorKind::Validation,
          "surrogate coefficients must be finite");
  return m;
}

SurrogateModel SurrogateModel::from_coefficients(const Eigen::VectorXd& beta, std::size_t n,
                                                 MetricRange link) {
  require(static_cast<std::size_t>(beta.size()) == design_size(n), ErrorKind::LengthMismatch,
          "coefficient vector has the wrong length");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < N; ++i) A(i, i) = 2.0 * beta[k++];
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      A(i, j) = beta[k];
      A(j, i) = beta[k];
      ++k;
    }
  }
  Eigen::VectorXd b = beta.segment(k, N);
  return from_parts(A, std::move(b), beta[k + N], link);
}

std::vector<double> SurrogateModel::upper_triangle() const {
  std::vector<double> upper;
  for (Eigen::Index i = 0; i < A_.rows(); ++i)
    for (Eigen::Index j = i; j < A_.cols(); ++j) upper.push_back(A_(i, j));
  return upper;
}

Eigen::VectorXd SurrogateModel::coefficients() const {
  const Eigen::Index n = b_.size();
  Eigen::VectorXd beta(static_cast<Eigen::Index>(design_size(static_cast<std::size_t>(n))));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) beta[k++] = 0.5 * A_(i, i);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) beta[k++] = A_(i, j);
  for (Eigen::Index i = 0; i < n; ++i) beta[k++] = b_[i];
  beta[k] = e_;
  return beta;
}

double SurrogateModel::predict(const Coeffs& c) const {
  require(c.size() == b_.size(), ErrorKind::LengthMismatch,
          "expected " + std::to_string(b_.size()) + " coefficients, got " +
              std::to_string(c.size()));
  return apply_link(link_, score(c));
}

namespace {

Eigen::VectorXd task_targets(const RecordStore& store, std::size_t task) {
  require(task < store.task_count(), ErrorKind::Validation,
          "task index " + std::to_string(task) + " out of range");
  Eigen::VectorXd y(static_cast<Eigen::Index>(store.size()));
  for (std::size_t k = 0; k < store.size(); ++k) {
    y[static_cast<Eigen::Index>(k)] = store.records()[k].metrics[static_cast<Eigen::Index>(task)];
  }
  return y;
}

void require_enough_samples(const RecordStore& store) {
  require(!store.empty(), ErrorKind::InsufficientSamples, "no records to fit");
  const auto n = static_cast<std::size_t>(store.records().front().c.size());
  require(store.size() >= design_size(n), ErrorKind::InsufficientSamples,
          std::to_string(store.size()) + " records cannot determine " +
              std::to_string(design_size(n)) + " surrogate coefficients");
}

// C^T C, with a ridge term when its eigenvalue condition number is too large.
struct NormalSystem {
  Eigen::LDLT<Eigen::MatrixXd> factor;
  bool ridge = false;
};

NormalSystem factor_normal_matrix(const Eigen::MatrixXd& design, double condition_limit) {
  Eigen::MatrixXd normal = design.transpose() * design;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  const double condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  NormalSystem sys;
  if (!(condition <= condition_limit)) {
    const double lambda = 1e-8 * normal.trace() / static_cast<double>(normal.rows());
    normal.diagonal().array() += lambda;
    sys.ridge = true;
    const double rescued = (lmax + lambda) / (std::max(lmin, 0.0) + lambda);
    require(lambda > 0.0 && std::isfinite(rescued) && rescued < 1e15, ErrorKind::SingularDesign,
            "design matrix is rank-deficient beyond ridge rescue");
  }
  sys.factor.compute(normal);
  require(sys.factor.info() == Eigen::Success && sys.factor.isPositive(),
          ErrorKind::SingularDesign, "normal equations could not be factored");
  return sys;
}

}  // namespace

double r_squared(const SurrogateModel& model, const RecordStore& store, std::size_t task) {
  require(!store.empty(), ErrorKind::EmptyStore, "record store is empty");
  const Eigen::VectorXd y = task_targets(store, task);
  const double mean = y.mean();
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < store.size(); ++k) {
    const double yk = y[static_cast<Eigen::Index>(k)];
    const double r = yk - model.predict(store.records()[k].c);
    ss_res += r * r;
    ss_tot += (yk - mean) * (yk - mean);
  }
  const double scale = 1e-14 * std::max(1.0, std::abs(mean));
  if (ss_tot <= static_cast<double>(store.size()) * scale * scale) return 0.0;
  return 1.0 - ss_res / ss_tot;
}

std::pair<SurrogateModel, FitReport> fit_closed_form(const RecordStore& store, std::size_t task,
                                                     const FitOptions& opts) {
  require_enough_samples(store);
  const Eigen::MatrixXd design = build_design_matrix(store);
  const Eigen::VectorXd y = task_targets(store, task);
  const NormalSystem sys = factor_normal_matrix(design, opts.condition_limit);
  // Same minimizer as (C^T C)^{-1} C^T y; QR avoids squaring the condition
  // number when no ridge is needed.
  const Eigen::VectorXd beta = sys.ridge ? Eigen::VectorXd(sys.factor.solve(design.transpose() * y))
                                         : Eigen::VectorXd(design.colPivHouseholderQr().solve(y));
  require(beta.allFinite(), ErrorKind::SingularDesign, "least-squares solution is not finite");
  const auto n = static_cast<std::size_t>(store.records().front().c.size());
  SurrogateModel model = SurrogateModel::from_coefficients(beta, n, MetricRange::unbounded());
  FitReport report;
  report.condition_warning = sys.ridge;
  report.residual_mse = (design * beta - y).squaredNorm() / static_cast<double>(y.size());
  report.r_squared = r_squared(model, store, task);
  return {std::move(model), report};
}

LinkObjective::LinkObjective(Eigen::MatrixXd design, Eigen::VectorXd targets, MetricRange link)
    : design_(std::move(design)), targets_(std::move(targets)), link_(link) {
  require(design_.rows() == targets_.size() && targets_.size() > 0, ErrorKind::LengthMismatch,
          "design rows and targets differ");
}

double LinkObjective::value(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd q = design_ * beta;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const double r = apply_link(link_, q[k]) - targets_[k];
    sum += r * r;
  }
  return sum / static_cast<double>(q.size());
}

Eigen::VectorXd LinkObjective::gradient(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd q = design_ * beta;
  Eigen::VectorXd w(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    w[k] = (apply_link(link_, q[k]) - targets_[k]) * link_derivative(link_, q[k]);
  }
  return (2.0 / static_cast<double>(q.size())) * (design_.transpose() * w);
}

std::pair<SurrogateModel, FitReport> fit_link(const RecordStore& store, std::size_t task,
                                              const MetricRange& link, const FitOptions& opts) {
  require_enough_samples(store);
  Eigen::VectorXd y = task_targets(store, task);
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    require(link.contains(y[k]), ErrorKind::RangeViolation,
            "record " + std::to_string(k + 1) + " has metric outside the link range");
  }
  const Eigen::MatrixXd design = build_design_matrix(store);
  const NormalSystem sys = factor_normal_matrix(design, opts.condition_limit);
  const LinkObjective objective(design, y, link);
  const double half_k = 0.5 * static_cast<double>(y.size());

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.cols());
  beta[beta.size() - 1] = link_inverse(link, y.mean(), opts.clip_epsilon);
  double f = objective.value(beta);

  std::vector<double> history{f};
  FitReport report;
  report.condition_warning = sys.ridge;
  report.converged = false;
  double step = 1.0;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (f <= 1e-30) {
      report.converged = true;
      break;
    }
    const Eigen::VectorXd g = objective.gradient(beta);
    const Eigen::VectorXd direction = -half_k * sys.factor.solve(g);
    const double slope = g.dot(direction);
    if (!(slope < 0.0)) {
      report.converged = true;
      break;
    }
    double t = std::min(2.0 * step, 1e8);
    bool accepted = false;
    Eigen::VectorXd trial;
    double f_trial = f;
    while (t > 1e-12) {
      trial = beta + t * direction;
      f_trial = objective.value(trial);
      if (f_trial <= f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No decrease along a descent direction: stationary to working precision.
      report.converged = true;
      break;
    }
    beta = std::move(trial);
    f = f_trial;
    step = t;
    history.push_back(f);
    if (history.size() > opts.window) {
      const double old = history[history.size() - 1 - opts.window];
      if (old - f <= opts.relative_tolerance * old) {
        report.converged = true;
        ++it;
        break;
      }
    }
  }
  report.iterations = it;
  const auto n = static_cast<std::size_t>(store.records().front().c.size());
  SurrogateModel model = SurrogateModel::from_coefficients(beta, n, link);
  report.residual_mse = f;
  report.r_squared = r_squared(model, store, task);
  return {std::move(model), report};
}

std::pair<SurrogateModel, FitReport> fit_surrogate(const RecordStore& store, std::size_t task,
                                                   const MetricRange& link,
                                                   const FitOptions& opts) {
  if (link.kind == MetricRange::Kind::Unbounded) return fit_closed_form(store, task, opts);
  return fit_link(store, task, link, opts);
}

}  // namespace mapfront
