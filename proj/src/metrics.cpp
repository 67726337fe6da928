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

#include "mapfront/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string_view>

#include "mapfront/errors.hpp"
#include "mapfront/random.hpp"

namespace mapfront {

PreferenceVector::PreferenceVector(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  require(weights_.size() >= 1, ErrorKind::Validation, "preference vector is empty");
  require(weights_.allFinite() && (weights_.array() >= 0.0).all(), ErrorKind::Validation,
          "preference weights must be finite and non-negative");
  const double sum = weights_.sum();
  require(sum > 0.0, ErrorKind::Validation, "preference weights sum to zero");
  weights_ /= sum;
}

namespace {

std::vector<std::size_t> sample_members(std::size_t size, std::size_t k, Rng& rng) {
  std::vector<std::size_t> out;
  if (size >= k) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(size - i));
      std::swap(idx[i], idx[j]);
      out.push_back(idx[i]);
    }
  } else {
    for (std::size_t i = 0; i < k; ++i) out.push_back(static_cast<std::size_t>(rng.below(size)));
  }
  return out;
}

// Draws depend on the front's own decision vectors, so swapping the arguments
// of win_rate compares the same samples.
std::uint64_t front_stream(const ParetoFront& front, std::uint64_t seed) {
  std::uint64_t h = derive_seed(seed, "win_rate");
  for (const auto& p : front.points) {
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(p.c.data()),
                                 sizeof(double) * static_cast<std::size_t>(p.c.size())),
                h);
  }
  return h;
}

std::vector<Direction> directions_of(const ParetoFront& front, std::size_t n_tasks) {
  if (front.directions.size() == n_tasks) return front.directions;
  return std::vector<Direction>(n_tasks, Direction::Maximize);
}

}  // namespace

double win_rate_of_values(const std::vector<Eigen::VectorXd>& a,
                          const std::vector<Eigen::VectorXd>& b,
                          const std::vector<Direction>& directions) {
  require(!a.empty() && !b.empty(), ErrorKind::EmptyFront, "win rate needs nonempty samples");
  const std::size_t n = directions.size();
  std::size_t wins = 0;
  for (const auto& x : a) {
    for (const auto& y : b) {
      require(static_cast<std::size_t>(x.size()) == n && static_cast<std::size_t>(y.size()) == n,
              ErrorKind::LengthMismatch, "metric vectors differ in length");
      for (std::size_t t = 0; t < n; ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        const bool better =
            directions[t] == Direction::Maximize ? x[i] > y[i] : x[i] < y[i];
        if (better) ++wins;
      }
    }
  }
  return static_cast<double>(wins) / static_cast<double>(a.size() * b.size() * n);
}

double win_rate(const ParetoFront& a, const ParetoFront& b, Oracle& oracle, std::size_t k,
                std::uint64_t seed) {
  require(!a.empty() && !b.empty(), ErrorKind::EmptyFront, "win rate needs two nonempty fronts");
  require(k >= 1, ErrorKind::Validation, "win rate needs K >= 1");
  Rng rng_a(front_stream(a, seed));
  Rng rng_b(front_stream(b, seed));
  const auto pick_a = sample_members(a.size(), k, rng_a);
  const auto pick_b = sample_members(b.size(), k, rng_b);
  oracle.ensure_budget(2 * k);
  std::vector<Eigen::VectorXd> va;
  std::vector<Eigen::VectorXd> vb;
  for (auto i : pick_a) va.push_back(oracle.evaluate(a.points[i].c));
  for (auto i : pick_b) vb.push_back(oracle.evaluate(b.points[i].c));
  return win_rate_of_values(va, vb, directions_of(a, oracle.task_count()));
}

namespace {

std::vector<Eigen::VectorXd> objective_set(const ParetoFront& front) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(front.size());
  for (const auto& p : front.points) out.push_back(p.f);
  return out;
}

void normalize_jointly(std::vector<Eigen::VectorXd>& x, std::vector<Eigen::VectorXd>& y) {
  Eigen::VectorXd lo = x.front();
  Eigen::VectorXd hi = x.front();
  for (const auto* set : {&x, &y}) {
    for (const auto& v : *set) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  Eigen::VectorXd span = hi - lo;
  for (Eigen::Index i = 0; i < span.size(); ++i) {
    if (!(span[i] > 0.0)) span[i] = 1.0;
  }
  for (auto* set : {&x, &y}) {
    for (auto& v : *set) v = (v - lo).cwiseQuotient(span);
  }
}

double mean_distance(const std::vector<Eigen::VectorXd>& from, const std::vector<Eigen::VectorXd>& to,
                     double p) {
  double sum = 0.0;
  for (const auto& x : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : to) {
      require(x.size() == y.size(), ErrorKind::LengthMismatch,
              "fronts have different objective dimension");
      best = std::min(best, (x - y).norm());
    }
    sum += std::pow(best, p);
  }
  return std::pow(sum, 1.0 / p) / static_cast<double>(from.size());
}

}  // namespace

double generational_distance(const ParetoFront& front, const ParetoFront& reference, double p,
                             DistanceMode mode) {
  require(!front.empty() && !reference.empty(), ErrorKind::EmptyFront,
          "GD needs two nonempty fronts");
  require(p > 0.0, ErrorKind::Validation, "GD exponent must be positive");
  auto x = objective_set(front);
  auto y = objective_set(reference);
  if (mode == DistanceMode::Normalized) normalize_jointly(x, y);
  return mean_distance(x, y, p);
}

double inverted_generational_distance(const ParetoFront& front, const ParetoFront& reference,
                                      double p, DistanceMode mode) {
  return generational_distance(reference, front, p, mode);
}

WeightedChoice preference_weighted_best(const ParetoFront& front, const PreferenceVector& pref,
                                        Oracle& oracle) {
  require(!front.empty(), ErrorKind::EmptyFront, "front is empty");
  require(static_cast<std::size_t>(pref.size()) == oracle.task_count(), ErrorKind::LengthMismatch,
          "preference length differs from the task count");
  oracle.ensure_budget(front.size());
  WeightedChoice best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    const double v = pref.weights().dot(oracle.evaluate(front.points[i].c));
    if (v > best.value) {
      best = {i, front.points[i].c, v};
    }
  }
  return best;
}

ComparisonReport compare_fronts(const ParetoFront& a, const ParetoFront& b, Oracle& oracle,
                                std::size_t k, std::uint64_t seed, double p, DistanceMode mode) {
  ComparisonReport r;
  r.k = k;
  r.p = p;
  r.seed = seed;
  r.normalized = mode == DistanceMode::Normalized;
  r.win_rate = win_rate(a, b, oracle, k, seed);
  r.gd = generational_distance(a, b, p, mode);
  r.igd = inverted_generational_distance(a, b, p, mode);
  r.gd_plus_igd = r.gd + r.igd;
  return r;
}

}  // namespace mapfront
