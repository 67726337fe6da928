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

#ifndef MAPFRONT_EVAL_ORACLE_HPP
#define MAPFRONT_EVAL_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "mapfront/core_model.hpp"

namespace mapfront {

// Feasible range of a metric; also selects the surrogate link function
// (identity, scaled sigmoid, shifted softplus).
struct MetricRange {
  enum class Kind { Unbounded, Bounded, LowerBounded };

  Kind kind = Kind::Unbounded;
  double lower = 0.0;
  double upper = 0.0;

  static MetricRange unbounded() { return {}; }
  static MetricRange bounded(double l, double u);
  static MetricRange lower_bounded(double l);

  bool contains(double m) const;
  bool operator==(const MetricRange&) const = default;
};

std::string to_string(MetricRange::Kind kind);
MetricRange::Kind parse_range_kind(const std::string& s);

// Maps the quadratic score q onto the metric scale.
double apply_link(const MetricRange& range, double q);
// d link / d q.
double link_derivative(const MetricRange& range, double q);
// Inverse of the link, with targets clipped eps inside the range first.
double link_inverse(const MetricRange& range, double m, double eps = 1e-6);

// 1/2 c^T A c + b^T c + e.
double quadratic_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double e,
                      const Coeffs& c);

struct TaskLandscape {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double e = 0.0;
  MetricRange link;
  double cubic_gamma = 0.0;
  double noise_sigma = 0.0;
};

// Ground-truth metric functions used in place of real model evaluations.
struct SyntheticLandscape {
  std::vector<TaskLandscape> tasks;

  std::size_t task_count() const { return tasks.size(); }
  Eigen::Index dimension() const { return tasks.empty() ? 0 : tasks.front().b.size(); }
  std::vector<MetricRange> ranges() const;
  void validate() const;
};

// Metric vector at c. Noise is a deterministic function of (seed, c).
Eigen::VectorXd eval_synthetic(const SyntheticLandscape& land, const Coeffs& c,
                               std::uint64_t rng_seed);

struct TradeoffOptions {
  MetricRange link = MetricRange::bounded(0.0, 1.0);
  double cubic_gamma = 0.0;
  double noise_sigma = 0.0;
};

// Random landscape where each task prefers its own coefficient large and
// the others small, so tasks genuinely conflict over [0,1]^N. Every task's
// quadratic score is concave with its maximizer near a distinct corner.
SyntheticLandscape make_tradeoff_landscape(std::size_t n_tasks, std::uint64_t seed,
                                           const TradeoffOptions& opts = {});

// Evaluation source with an exact call counter and an optional hard cap.
// One call returns all task metrics for one decision vector.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual std::size_t task_count() const = 0;
  virtual std::vector<MetricRange> ranges() const;

  Eigen::VectorXd evaluate(const Coeffs& c);

  std::size_t eval_count() const { return count_; }
  void set_budget(std::optional<std::size_t> cap) { budget_ = cap; }
  std::optional<std::size_t> budget() const { return budget_; }
  // Throws BudgetExceeded if `calls` more evaluations would pass the cap.
  void ensure_budget(std::size_t calls) const;

 protected:
  virtual Eigen::VectorXd do_evaluate(const Coeffs& c) = 0;

 private:
  std::size_t count_ = 0;
  std::optional<std::size_t> budget_;
};

class SyntheticOracle final : public Oracle {
 public:
  SyntheticOracle(SyntheticLandscape land, std::uint64_t seed);

  Eigen::Index dimension() const override { return land_.dimension(); }
  std::size_t task_count() const override { return land_.task_count(); }
  std::vector<MetricRange> ranges() const override { return land_.ranges(); }
  const SyntheticLandscape& landscape() const { return land_; }
  std::uint64_t seed() const { return seed_; }

 protected:
  Eigen::VectorXd do_evaluate(const Coeffs& c) override;

 private:
  SyntheticLandscape land_;
  std::uint64_t seed_;
};

struct EvaluationRecord {
  enum class Source { Synthetic, Ingested };

  Coeffs c;
  Eigen::VectorXd metrics;
  Source source = Source::Synthetic;
};

// The sample buffer. Exact-duplicate decision vectors are stored once.
class RecordStore {
 public:
  RecordStore() = default;
  explicit RecordStore(std::size_t n_tasks, std::vector<MetricRange> ranges = {});

  // Returns false when a record with the same c already exists.
  bool add(EvaluationRecord record);
  // Evaluates c on the oracle, charges the evaluation and stores the result.
  const Eigen::VectorXd& evaluate_and_add(Oracle& oracle, const Coeffs& c);

  const std::vector<EvaluationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t task_count() const { return n_tasks_; }
  const std::vector<MetricRange>& ranges() const { return ranges_; }
  void set_ranges(std::vector<MetricRange> ranges);
  const EvaluationRecord* find(const Coeffs& c) const;

  std::size_t eval_count() const { return eval_count_; }

 private:
  std::size_t n_tasks_ = 0;
  std::vector<MetricRange> ranges_;
  std::vector<EvaluationRecord> records_;
  std::size_t eval_count_ = 0;
};

// CSV (header c_1..c_N,m_1..m_N) or, for a ".json" extension, an object
// {"metadata": {"N", "ranges", "description"}, "records": [{"c", "m"}]}.
// Ranges from the file metadata are used when `ranges` is empty.
RecordStore load_records(const std::filesystem::path& path,
                         const std::vector<MetricRange>& ranges = {});
void save_records(const RecordStore& store, const std::filesystem::path& path,
                  const std::string& description = {});

// Answers only for decision vectors present in a record store.
class RecordOracle final : public Oracle {
 public:
  explicit RecordOracle(const RecordStore& store) : store_(store) {}

  Eigen::Index dimension() const override;
  std::size_t task_count() const override { return store_.task_count(); }
  std::vector<MetricRange> ranges() const override { return store_.ranges(); }

 protected:
  Eigen::VectorXd do_evaluate(const Coeffs& c) override;

 private:
  const RecordStore& store_;
};

// Metric source over full parameter vectors, counted per task evaluated.
class ParameterOracle {
 public:
  virtual ~ParameterOracle() = default;

  virtual std::size_t task_count() const = 0;
  virtual std::vector<MetricRange> ranges() const = 0;

  Eigen::VectorXd evaluate(const ParameterVector& theta, const std::vector<std::size_t>& tasks);
  std::size_t task_evaluations() const { return count_; }

 protected:
  virtual Eigen::VectorXd do_evaluate(const ParameterVector& theta,
                                      const std::vector<std::size_t>& tasks) = 0;

 private:
  std::size_t count_ = 0;
};

// Synthetic landscape lifted to parameter space: theta is projected onto the
// task-vector span (least squares) and the landscape is read at that c.
class SyntheticParameterOracle final : public ParameterOracle {
 public:
  SyntheticParameterOracle(SyntheticLandscape land, ParameterVector pretrained, TaskMatrix tasks,
                           std::uint64_t seed);

  std::size_t task_count() const override { return land_.task_count(); }
  std::vector<MetricRange> ranges() const override { return land_.ranges(); }
  Coeffs coefficients_of(const ParameterVector& theta) const;

 protected:
  Eigen::VectorXd do_evaluate(const ParameterVector& theta,
                              const std::vector<std::size_t>& tasks) override;

 private:
  SyntheticLandscape land_;
  ParameterVector pretrained_;
  TaskMatrix tasks_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> projection_;
  std::uint64_t seed_;
};

}  // namespace mapfront

#endif  // MAPFRONT_EVAL_ORACLE_HPP
