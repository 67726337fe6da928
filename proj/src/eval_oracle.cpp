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

#include "mapfront/eval_oracle.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/QR>
#include <json.hpp>

#include "mapfront/errors.hpp"
#include "mapfront/random.hpp"
#include "mapfront/serialization.hpp"

namespace mapfront {

MetricRange MetricRange::bounded(double l, double u) {
  require(std::isfinite(l) && std::isfinite(u) && l < u, ErrorKind::Validation,
          "bounded metric range needs finite l < u");
  return {Kind::Bounded, l, u};
}

MetricRange MetricRange::lower_bounded(double l) {
  require(std::isfinite(l), ErrorKind::Validation, "lower bound must be finite");
  return {Kind::LowerBounded, l, 0.0};
}

bool MetricRange::contains(double m) const {
  if (!std::isfinite(m)) return false;
  switch (kind) {
    case Kind::Unbounded:
      return true;
    case Kind::Bounded:
      return m >= lower && m <= upper;
    case Kind::LowerBounded:
      return m >= lower;
  }
  return false;
}

std::string to_string(MetricRange::Kind kind) {
  switch (kind) {
    case MetricRange::Kind::Unbounded:
      return "unbounded";
    case MetricRange::Kind::Bounded:
      return "bounded";
    case MetricRange::Kind::LowerBounded:
      return "lower_bounded";
  }
  return "unbounded";
}

MetricRange::Kind parse_range_kind(const std::string& s) {
  if (s == "unbounded" || s == "identity") return MetricRange::Kind::Unbounded;
  if (s == "bounded" || s == "sigmoid") return MetricRange::Kind::Bounded;
  if (s == "lower_bounded" || s == "softplus") return MetricRange::Kind::LowerBounded;
  fail(ErrorKind::Validation, "unknown metric range kind '" + s + "'");
}

namespace {

double sigmoid(double q) {
  if (q >= 0.0) return 1.0 / (1.0 + std::exp(-q));
  const double z = std::exp(q);
  return z / (1.0 + z);
}

double softplus(double q) {
  return q > 0.0 ? q + std::log1p(std::exp(-q)) : std::log1p(std::exp(q));
}

}  // namespace

double apply_link(const MetricRange& range, double q) {
  switch (range.kind) {
    case MetricRange::Kind::Unbounded:
      return q;
    case MetricRange::Kind::Bounded: {
      double m = (range.upper - range.lower) * sigmoid(q) + range.lower;
      // sigmoid saturates to exactly 0 or 1 in double precision; keep the
      // output strictly inside the open interval.
      if (m >= range.upper) m = std::nextafter(range.upper, range.lower);
      if (m <= range.lower) m = std::nextafter(range.lower, range.upper);
      return m;
    }
    case MetricRange::Kind::LowerBounded: {
      double m = softplus(q) + range.lower;
      if (m <= range.lower) m = std::nextafter(range.lower, std::numeric_limits<double>::infinity());
      return m;
    }
  }
  return q;
}

double link_derivative(const MetricRange& range, double q) {
  switch (range.kind) {
    case MetricRange::Kind::Unbounded:
      return 1.0;
    case MetricRange::Kind::Bounded: {
      const double s = sigmoid(q);
      return (range.upper - range.lower) * s * (1.0 - s);
    }
    case MetricRange::Kind::LowerBounded:
      return sigmoid(q);
  }
  return 1.0;
}

double link_inverse(const MetricRange& range, double m, double eps) {
  switch (range.kind) {
    case MetricRange::Kind::Unbounded:
      return m;
    case MetricRange::Kind::Bounded: {
      const double clipped = std::clamp(m, range.lower + eps, range.upper - eps);
      const double p = (clipped - range.lower) / (range.upper - range.lower);
      return std::log(p / (1.0 - p));
    }
    case MetricRange::Kind::LowerBounded: {
      const double y = std::max(m - range.lower, eps);
      // softplus^{-1}(y) = log(expm1(y)), written to stay finite for large y.
      return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
    }
  }
  return m;
}

double quadratic_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double e,
                      const Coeffs& c) {
  return 0.5 * c.dot(A * c) + b.dot(c) + e;
}

std::vector<MetricRange> SyntheticLandscape::ranges() const {
  std::vector<MetricRange> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(t.link);
  return out;
}

void SyntheticLandscape::validate() const {
  require(!tasks.empty(), ErrorKind::Validation, "landscape has no tasks");
  const Eigen::Index n = tasks.front().b.size();
  require(n >= 1, ErrorKind::Validation, "landscape dimension must be at least 1");
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& task = tasks[t];
    const std::string where = "task " + std::to_string(t + 1) + ": ";
    require(task.b.size() == n && task.A.rows() == n && task.A.cols() == n,
            ErrorKind::Validation, where + "inconsistent A/b dimensions");
    require(task.A.allFinite() && task.b.allFinite() && std::isfinite(task.e),
            ErrorKind::Validation, where + "non-finite coefficients");
    require(task.A == task.A.transpose(), ErrorKind::Validation, where + "A is not symmetric");
    require(std::isfinite(task.cubic_gamma) && task.cubic_gamma >= 0.0, ErrorKind::Validation,
            where + "cubic_gamma must be finite and >= 0");
    require(std::isfinite(task.noise_sigma) && task.noise_sigma >= 0.0, ErrorKind::Validation,
            where + "noise_sigma must be finite and >= 0");
    if (task.link.kind == MetricRange::Kind::Bounded) {
      require(task.link.lower < task.link.upper, ErrorKind::Validation,
              where + "bounded range needs l < u");
    }
  }
}

namespace {

std::uint64_t coefficient_key(std::uint64_t seed, const Coeffs& c) {
  std::uint64_t h = splitmix64(seed);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    // +0.0 and -0.0 are the same point.
    const double x = c[i] == 0.0 ? 0.0 : c[i];
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x));
  }
  return h;
}

}  // namespace

Eigen::VectorXd eval_synthetic(const SyntheticLandscape& land, const Coeffs& c,
                               std::uint64_t rng_seed) {
  require(c.size() == land.dimension(), ErrorKind::LengthMismatch,
          "expected " + std::to_string(land.dimension()) + " coefficients, got " +
              std::to_string(c.size()));
  const double cubic = c.array().cube().sum();
  Rng noise(coefficient_key(rng_seed, c));
  Eigen::VectorXd out(static_cast<Eigen::Index>(land.task_count()));
  for (std::size_t n = 0; n < land.task_count(); ++n) {
    const auto& t = land.tasks[n];
    // One normal draw per task, always taken, so task n's noise does not
    // depend on other tasks' sigmas.
    const double z = noise.normal();
    const double q = quadratic_form(t.A, t.b, t.e, c) + t.cubic_gamma * cubic + t.noise_sigma * z;
    out[static_cast<Eigen::Index>(n)] = apply_link(t.link, q);
  }
  return out;
}

SyntheticLandscape make_tradeoff_landscape(std::size_t n_tasks, std::uint64_t seed,
                                           const TradeoffOptions& opts) {
  require(n_tasks >= 1, ErrorKind::Validation, "need at least one task");
  Rng rng(derive_seed(seed, "landscape"));
  const auto n = static_cast<Eigen::Index>(n_tasks);
  SyntheticLandscape land;
  for (Eigen::Index task = 0; task < n; ++task) {
    Eigen::VectorXd optimum(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      optimum[i] = i == task ? rng.uniform(0.75, 1.0) : rng.uniform(0.0, 0.25);
    }
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) curvature[i] = rng.uniform(2.0, 6.0);
    Eigen::MatrixXd A = -(q * curvature.asDiagonal() * q.transpose());
    A = 0.5 * (A + A.transpose()).eval();

    const double peak_fraction = rng.uniform(0.85, 0.95);
    double peak_metric = peak_fraction;
    if (opts.link.kind == MetricRange::Kind::Bounded) {
      peak_metric = opts.link.lower + (opts.link.upper - opts.link.lower) * peak_fraction;
    } else if (opts.link.kind == MetricRange::Kind::LowerBounded) {
      peak_metric = opts.link.lower + peak_fraction;
    }
    const double peak_score = link_inverse(opts.link, peak_metric);

    TaskLandscape t;
    t.b = -(A * optimum);
    t.e = peak_score + 0.5 * optimum.dot(A * optimum);
    t.A = std::move(A);
    t.link = opts.link;
    t.cubic_gamma = opts.cubic_gamma;
    t.noise_sigma = opts.noise_sigma;
    land.tasks.push_back(std::move(t));
  }
  return land;
}

std::vector<MetricRange> Oracle::ranges() const {
  return std::vector<MetricRange>(task_count());
}

void Oracle::ensure_budget(std::size_t calls) const {
  if (budget_ && count_ + calls > *budget_) {
    fail(ErrorKind::BudgetExceeded, "evaluation budget of " + std::to_string(*budget_) +
                                        " exceeded: " + std::to_string(count_) + " used, " +
                                        std::to_string(calls) + " requested");
  }
}

Eigen::VectorXd Oracle::evaluate(const Coeffs& c) {
  ensure_budget(1);
  require(c.size() == dimension(), ErrorKind::LengthMismatch,
          "expected " + std::to_string(dimension()) + " coefficients, got " +
              std::to_string(c.size()));
  Eigen::VectorXd m = do_evaluate(c);
  ++count_;
  return m;
}

SyntheticOracle::SyntheticOracle(SyntheticLandscape land, std::uint64_t seed)
    : land_(std::move(land)), seed_(seed) {
  land_.validate();
}

Eigen::VectorXd SyntheticOracle::do_evaluate(const Coeffs& c) {
  return eval_synthetic(land_, c, seed_);
}

RecordStore::RecordStore(std::size_t n_tasks, std::vector<MetricRange> ranges)
    : n_tasks_(n_tasks), ranges_(std::move(ranges)) {
  if (ranges_.empty()) ranges_.assign(n_tasks_, MetricRange{});
  require(ranges_.size() == n_tasks_, ErrorKind::LengthMismatch,
          "one metric range per task required");
}

void RecordStore::set_ranges(std::vector<MetricRange> ranges) {
  require(ranges.size() == n_tasks_, ErrorKind::LengthMismatch,
          "one metric range per task required");
  ranges_ = std::move(ranges);
}

const EvaluationRecord* RecordStore::find(const Coeffs& c) const {
  for (const auto& r : records_) {
    if (r.c.size() == c.size() && r.c == c) return &r;
  }
  return nullptr;
}

bool RecordStore::add(EvaluationRecord record) {
  require(static_cast<std::size_t>(record.metrics.size()) == n_tasks_, ErrorKind::LengthMismatch,
          "record has " + std::to_string(record.metrics.size()) + " metrics, expected " +
              std::to_string(n_tasks_));
  if (!records_.empty()) {
    require(record.c.size() == records_.front().c.size(), ErrorKind::LengthMismatch,
            "record decision vector has inconsistent length");
  }
  for (std::size_t n = 0; n < n_tasks_; ++n) {
    const double m = record.metrics[static_cast<Eigen::Index>(n)];
    require(ranges_[n].contains(m), ErrorKind::RangeViolation,
            "metric m_" + std::to_string(n + 1) + " = " + std::to_string(m) +
                " outside its declared range");
  }
  if (find(record.c) != nullptr) return false;
  records_.push_back(std::move(record));
  return true;
}

const Eigen::VectorXd& RecordStore::evaluate_and_add(Oracle& oracle, const Coeffs& c) {
  Eigen::VectorXd m = oracle.evaluate(c);
  ++eval_count_;
  if (const auto* existing = find(c)) return existing->metrics;
  add({c, std::move(m), EvaluationRecord::Source::Synthetic});
  return records_.back().metrics;
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

double parse_double(const std::string& s, std::size_t line, const std::string& file) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || s.empty() || !std::isfinite(v)) {
    fail(ErrorKind::ParseError,
         file + ":" + std::to_string(line) + ": cannot parse '" + s + "' as a real number");
  }
  return v;
}

RecordStore load_records_csv(const std::filesystem::path& path,
                             const std::vector<MetricRange>& ranges) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  const std::string file = path.string();
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv_line(line);
    break;
  }
  require(!header.empty(), ErrorKind::ParseError, file + ": missing header");
  require(header.size() % 2 == 0, ErrorKind::ParseError,
          file + ":" + std::to_string(line_no) + ": header must have 2N columns");
  const std::size_t n = header.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    require(header[i] == "c_" + std::to_string(i + 1) &&
                header[n + i] == "m_" + std::to_string(i + 1),
            ErrorKind::ParseError,
            file + ":" + std::to_string(line_no) + ": expected header c_1..c_N,m_1..m_N");
  }
  RecordStore store(n, ranges);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    require(fields.size() == 2 * n, ErrorKind::ParseError,
            file + ":" + std::to_string(line_no) + ": expected " + std::to_string(2 * n) +
                " fields, got " + std::to_string(fields.size()));
    EvaluationRecord r;
    r.source = EvaluationRecord::Source::Ingested;
    r.c.resize(static_cast<Eigen::Index>(n));
    r.metrics.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      r.c[static_cast<Eigen::Index>(i)] = parse_double(fields[i], line_no, file);
      r.metrics[static_cast<Eigen::Index>(i)] = parse_double(fields[n + i], line_no, file);
    }
    try {
      store.add(std::move(r));
    } catch (const Error& e) {
      fail(e.kind(), file + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

RecordStore load_records_json(const std::filesystem::path& path,
                              std::vector<MetricRange> ranges) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    const auto& meta = j.at("metadata");
    const auto n = meta.at("N").get<std::size_t>();
    if (ranges.empty() && meta.contains("ranges")) {
      for (const auto& r : meta.at("ranges")) ranges.push_back(range_from_json(r));
    }
    RecordStore store(n, ranges);
    std::size_t index = 0;
    for (const auto& rec : j.at("records")) {
      ++index;
      EvaluationRecord r{vector_from_json(rec.at("c")), vector_from_json(rec.at("m")),
                         EvaluationRecord::Source::Ingested};
      require(static_cast<std::size_t>(r.c.size()) == n, ErrorKind::ParseError,
              "record " + std::to_string(index) + ": c has wrong length");
      require(r.c.allFinite() && r.metrics.allFinite(), ErrorKind::ParseError,
              "record " + std::to_string(index) + ": non-finite value");
      try {
        store.add(std::move(r));
      } catch (const Error& e) {
        fail(e.kind(), path.string() + ": record " + std::to_string(index) + ": " + e.what());
      }
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

RecordStore load_records(const std::filesystem::path& path,
                         const std::vector<MetricRange>& ranges) {
  if (path.extension() == ".json") return load_records_json(path, ranges);
  return load_records_csv(path, ranges);
}

void save_records(const RecordStore& store, const std::filesystem::path& path,
                  const std::string& description) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  const std::size_t n = store.task_count();
  if (path.extension() == ".json") {
    nlohmann::json j;
    j["metadata"]["N"] = n;
    j["metadata"]["description"] = description;
    j["metadata"]["ranges"] = nlohmann::json::array();
    for (const auto& r : store.ranges()) j["metadata"]["ranges"].push_back(range_to_json(r));
    j["records"] = nlohmann::json::array();
    for (const auto& r : store.records()) {
      j["records"].push_back(
          {{"c", vector_to_json(r.c)},
           {"m", vector_to_json(r.metrics)}});
    }
    out << j.dump(2) << '\n';
  } else {
    for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << "c_" << i + 1;
    for (std::size_t i = 0; i < n; ++i) out << ",m_" << i + 1;
    out << '\n';
    for (const auto& r : store.records()) {
      for (Eigen::Index i = 0; i < r.c.size(); ++i) out << (i ? "," : "") << format_double(r.c[i]);
      for (Eigen::Index i = 0; i < r.metrics.size(); ++i) out << ',' << format_double(r.metrics[i]);
      out << '\n';
    }
  }
  require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + path.string());
}

Eigen::Index RecordOracle::dimension() const {
  return store_.empty() ? static_cast<Eigen::Index>(store_.task_count())
                        : store_.records().front().c.size();
}

Eigen::VectorXd RecordOracle::do_evaluate(const Coeffs& c) {
  const auto* r = store_.find(c);
  require(r != nullptr, ErrorKind::Validation,
          "no stored evaluation for the requested scaling coefficients");
  return r->metrics;
}

Eigen::VectorXd ParameterOracle::evaluate(const ParameterVector& theta,
                                          const std::vector<std::size_t>& tasks) {
  for (auto t : tasks) {
    require(t < task_count(), ErrorKind::Validation, "task index out of range");
  }
  Eigen::VectorXd m = do_evaluate(theta, tasks);
  count_ += tasks.size();
  return m;
}

SyntheticParameterOracle::SyntheticParameterOracle(SyntheticLandscape land,
                                                   ParameterVector pretrained, TaskMatrix tasks,
                                                   std::uint64_t seed)
    : land_(std::move(land)),
      pretrained_(std::move(pretrained)),
      tasks_(std::move(tasks)),
      seed_(seed) {
  land_.validate();
  require(tasks_.dimension() == pretrained_.size(), ErrorKind::LengthMismatch,
          "task vectors and pretrained parameters differ in length");
  require(tasks_.task_count() == land_.dimension(), ErrorKind::LengthMismatch,
          "landscape dimension must equal the number of task vectors");
  projection_.compute(tasks_.columns());
  require(projection_.rank() == tasks_.task_count(), ErrorKind::Validation,
          "task vectors are linearly dependent");
}

Coeffs SyntheticParameterOracle::coefficients_of(const ParameterVector& theta) const {
  require(theta.size() == pretrained_.size(), ErrorKind::LengthMismatch,
          "parameter vector has the wrong length");
  return projection_.solve(Eigen::VectorXd(theta.values - pretrained_.values));
}

Eigen::VectorXd SyntheticParameterOracle::do_evaluate(const ParameterVector& theta,
                                                      const std::vector<std::size_t>& tasks) {
  const Eigen::VectorXd all = eval_synthetic(land_, coefficients_of(theta), seed_);
  Eigen::VectorXd out(static_cast<Eigen::Index>(tasks.size()));
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = all[static_cast<Eigen::Index>(tasks[i])];
  }
  return out;
}

}  // namespace mapfront
