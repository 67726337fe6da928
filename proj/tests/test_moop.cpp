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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mapfront/errors.hpp"
#include "mapfront/metrics.hpp"
#include "mapfront/moop.hpp"
#include "mapfront/random.hpp"
#include "reference.hpp"

using namespace mapfront;
using testing_support::error_kind;
using testing_support::FunctionOracle;
using testing_support::objective_values;
using testing_support::to_std;

namespace {

const std::vector<Direction> kMin2{Direction::Minimize, Direction::Minimize};
const std::vector<Direction> kMax2{Direction::Maximize, Direction::Maximize};

std::vector<FrontPoint> points_from(const std::vector<std::vector<double>>& f) {
  std::vector<FrontPoint> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.push_back({Eigen::VectorXd::Constant(1, static_cast<double>(i)),
                   Eigen::Map<const Eigen::VectorXd>(f[i].data(), static_cast<Eigen::Index>(f[i].size()))});
  }
  return out;
}

std::vector<double> first_coordinates(const ParetoFront& f) {
  std::vector<double> out;
  for (const auto& p : f.points) out.push_back(p.c[0]);
  std::sort(out.begin(), out.end());
  return out;
}

SurrogateModel quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double e = 0.0) {
  return SurrogateModel::from_parts(A, b, e, MetricRange::unbounded());
}

// Two concave bowls peaking near opposite corners of the unit square.
ObjectiveSpec conflicting_pair() {
  ObjectiveSpec spec;
  const Eigen::Matrix2d A{{-2.0, 0.3}, {0.3, -1.5}};
  const Eigen::Vector2d m1(0.9, 0.1), m2(0.15, 0.85);
  spec.surrogates = {quadratic(A, -A * m1), quadratic(A, -A * m2)};
  spec.directions = kMax2;
  spec.box = Box::unit(2);
  return spec;
}

bool pairwise_non_dominated(const ParetoFront& f) {
  for (const auto& a : f.points) {
    for (const auto& b : f.points) {
      if (dominates(a.f, b.f, f.directions)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("moop") {

TEST_CASE("dominance examples") {
  CHECK(dominates(Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.2, 0.3), kMin2));
  CHECK_FALSE(dominates(Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.1, 0.2), kMin2));
  CHECK_FALSE(dominates(Eigen::Vector2d(0.1, 0.5), Eigen::Vector2d(0.5, 0.1), kMin2));
  CHECK_FALSE(dominates(Eigen::Vector2d(0.5, 0.1), Eigen::Vector2d(0.1, 0.5), kMin2));
  CHECK(dominates(Eigen::Vector2d(0.2, 0.3), Eigen::Vector2d(0.1, 0.2), kMax2));
  CHECK(error_kind([] { dominates(Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 2, 3), kMin2); }) ==
        ErrorKind::LengthMismatch);
}

TEST_CASE("filter examples") {
  auto f = non_dominated_filter(points_from({{0, 0}, {1, 1}}), kMin2);
  REQUIRE(f.size() == 1);
  CHECK(f.points[0].f == Eigen::Vector2d(0, 0));

  std::vector<FrontPoint> tradeoff;
  for (double c : {0.0, 0.5, 1.0}) tradeoff.push_back({Eigen::VectorXd::Constant(1, c), Eigen::Vector2d(c, 1 - c)});
  CHECK(non_dominated_filter(tradeoff, kMin2).size() == 3);
  CHECK(error_kind([] { non_dominated_filter({}, kMin2); }) == ErrorKind::EmptyInput);
}

TEST_CASE("filter matches the all-pairs oracle on random 3-objective sets") {
  Rng rng(1);
  const std::vector<Direction> dirs{Direction::Minimize, Direction::Maximize, Direction::Minimize};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> f(100, std::vector<double>(3));
    for (auto& row : f) {
      for (auto& x : row) x = std::round(rng.uniform() * 20.0) / 20.0;  // forces ties
    }
    const auto got = non_dominated_filter(points_from(f), dirs);
    const auto want = reference::brute_force_front(f, {false, true, false});
    std::vector<std::size_t> got_idx;
    for (const auto& p : got.points) got_idx.push_back(static_cast<std::size_t>(p.c[0]));
    CHECK(got_idx == want);
  }
}

TEST_CASE("filter is idempotent, order independent and scale invariant") {
  Rng rng(2);
  std::vector<std::vector<double>> f(150, std::vector<double>(2));
  for (auto& row : f) {
    for (auto& x : row) x = rng.uniform();
  }
  const auto once = non_dominated_filter(points_from(f), kMax2);
  const auto twice = non_dominated_filter(once.points, kMax2);
  CHECK(first_coordinates(once) == first_coordinates(twice));

  auto shuffled = points_from(f);
  rng.shuffle(shuffled);
  CHECK(first_coordinates(non_dominated_filter(shuffled, kMax2)) == first_coordinates(once));

  auto scaled = points_from(f);
  for (auto& p : scaled) p.f[1] *= 37.5;
  CHECK(first_coordinates(non_dominated_filter(scaled, kMax2)) == first_coordinates(once));
}

TEST_CASE("filter collapses duplicate decision vectors") {
  std::vector<FrontPoint> pts{{Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1, 0)},
                              {Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1, 0)},
                              {Eigen::Vector2d(0.1, 0.9), Eigen::Vector2d(0, 1)}};
  CHECK(non_dominated_filter(pts, kMax2).size() == 2);
}

TEST_CASE("non-dominated sort layers") {
  const std::vector<Eigen::VectorXd> f{Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0),
                                       Eigen::Vector2d(0, 2), Eigen::Vector2d(3, 3)};
  const auto layers = non_dominated_sort(f);
  REQUIRE(layers.size() == 3);
  CHECK(layers[0] == std::vector<std::size_t>{1});
  std::vector<std::size_t> second = layers[1];
  std::sort(second.begin(), second.end());
  CHECK(second == std::vector<std::size_t>{0, 2, 3});
  CHECK(layers[2] == std::vector<std::size_t>{4});
}

TEST_CASE("Das-Dennis lattice") {
  CHECK(das_dennis(3, 12).size() == 91);
  CHECK(das_dennis(8, 3).size() == 120);
  CHECK(das_dennis(2, 99).size() == 100);
  for (const auto& w : das_dennis(4, 5)) {
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.minCoeff() >= 0.0);
  }
}

TEST_CASE("NSGA-III single objective finds the analytic minimizer") {
  ObjectiveSpec spec;
  const Eigen::Matrix2d A{{3, 0.5}, {0.5, 2}};
  const Eigen::Vector2d target(0.3, 0.6);
  spec.surrogates = {quadratic(A, -A * target)};
  spec.directions = {Direction::Minimize};
  spec.box = Box::unit(2);
  Nsga3Params params;
  params.seed = 4;
  const auto front = nsga3_front(spec, params);
  REQUIRE_FALSE(front.empty());
  double best = 1e9;
  Eigen::VectorXd arg;
  for (const auto& p : front.points) {
    if (p.f[0] < best) {
      best = p.f[0];
      arg = p.c;
    }
  }
  CHECK((arg - target).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("NSGA-III clips the minimizer to the box") {
  ObjectiveSpec spec;
  const Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
  spec.surrogates = {quadratic(A, -A * Eigen::Vector2d(1.4, -0.3))};
  spec.directions = {Direction::Minimize};
  spec.box = Box::unit(2);
  const auto front = nsga3_front(spec, {});
  CHECK((front.points.front().c - Eigen::Vector2d(1.0, 0.0)).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("NSGA-III front of two conflicting quadratics is close to the dense grid front") {
  const ObjectiveSpec spec = conflicting_pair();
  const auto front = nsga3_front(spec, {});
  CHECK(pairwise_non_dominated(front));
  const auto grid = reference::lattice_front_values(
      [&](double x, double y) { return to_std(spec.evaluate(Eigen::Vector2d(x, y))); }, 100);
  ParetoFront ref;
  ref.directions = kMax2;
  for (const auto& v : grid) ref.points.push_back({Eigen::Vector2d::Zero(), Eigen::Vector2d(v[0], v[1])});
  const double gd = generational_distance(front, ref, 2.0, DistanceMode::Normalized);
  const double igd = inverted_generational_distance(front, ref, 2.0, DistanceMode::Normalized);
  CHECK(gd + igd <= 0.05);
}

TEST_CASE("NSGA-III is deterministic and its output survives the filter") {
  const ObjectiveSpec spec = conflicting_pair();
  Nsga3Params params;
  params.seed = 99;
  params.generations = 50;
  const auto a = nsga3_front(spec, params);
  const auto b = nsga3_front(spec, params);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i].c == b.points[i].c);
    CHECK(a.points[i].f == b.points[i].f);
  }
  CHECK(non_dominated_filter(a.points, a.directions).size() == a.size());
  CHECK(a.evaluations == (params.generations + 1) * 100);
  params.seed = 100;
  CHECK(nsga3_front(spec, params).points.front().c != a.points.front().c);
}

TEST_CASE("NSGA-III on three objectives") {
  ObjectiveSpec spec;
  const Eigen::Matrix3d A = -2.0 * Eigen::Matrix3d::Identity();
  for (int t = 0; t < 3; ++t) spec.surrogates.push_back(quadratic(A, -A * Eigen::Vector3d::Unit(t)));
  spec.directions.assign(3, Direction::Maximize);
  spec.box = Box::unit(3);
  Nsga3Params params;
  params.generations = 60;
  const auto front = nsga3_front(spec, params);
  CHECK(front.size() > 20);
  CHECK(pairwise_non_dominated(front));
}

TEST_CASE("MOEA/D agrees with NSGA-III on one objective") {
  ObjectiveSpec spec;
  const Eigen::Matrix2d A{{2, -0.4}, {-0.4, 1}};
  spec.surrogates = {quadratic(A, -A * Eigen::Vector2d(0.7, 0.2))};
  spec.directions = {Direction::Minimize};
  spec.box = Box::unit(2);
  MoeadParams mp;
  mp.population = 30;
  mp.generations = 100;
  const auto m = moead_front(spec, mp);
  const auto n = nsga3_front(spec, {});
  CHECK(std::abs(m.points.front().f[0] - n.points.front().f[0]) <= 1e-2);
  CHECK((m.points.front().c - n.points.front().c).cwiseAbs().maxCoeff() <= 1e-2);
}

TEST_CASE("MOEA/D evaluation count and archive") {
  MoeadParams mp;
  mp.population = 50;
  mp.generations = 20;
  mp.seed = 3;
  const auto front = moead_front(conflicting_pair(), mp);
  CHECK(front.evaluations == 50 * 20 + 50);
  CHECK(front.provenance == Provenance::Moead);
  CHECK(pairwise_non_dominated(front));
  CHECK(non_dominated_filter(front.points, front.directions).size() == front.size());
  const auto again = moead_front(conflicting_pair(), mp);
  CHECK(again.size() == front.size());
  CHECK(again.points.back().c == front.points.back().c);
}

TEST_CASE("grid search front") {
  FunctionOracle same(2, 2, [](const Eigen::VectorXd& c) { return Eigen::Vector2d(c[0], c[0]); });
  auto f = grid_search_front(same, Box::unit(2), 3, kMin2);
  CHECK(same.eval_count() == 9);
  CHECK(f.provenance == Provenance::Grid);
  for (const auto& p : f.points) CHECK(p.c[0] == 0.0);
  CHECK(f.points.front().f == Eigen::Vector2d(0, 0));

  FunctionOracle capped(2, 2, [](const Eigen::VectorXd& c) { return c; });
  capped.set_budget(200);
  CHECK(error_kind([&] { grid_search_front(capped, Box::unit(2), 15, kMax2); }) ==
        ErrorKind::BudgetExceeded);
  CHECK(capped.eval_count() == 0);
  CHECK(grid_search_front(capped, Box::unit(2), 14, kMax2).size() == 1);
}

TEST_CASE("random search front spends exactly its point count") {
  FunctionOracle oracle(2, 2, [](const Eigen::VectorXd& c) { return Eigen::Vector2d(c[0], 1.0 - c[0] * c[0] - c[1]); });
  const auto f = random_search_front(oracle, Box::unit(2), 500, kMax2, 5);
  CHECK(oracle.eval_count() == 500);
  CHECK(f.provenance == Provenance::RandomSearch);
  CHECK(pairwise_non_dominated(f));
  for (const auto& p : f.points) CHECK(Box::unit(2).contains(p.c));
}

TEST_CASE("box validation") {
  CHECK(error_kind([] { Box::uniform(2, 1.0, 1.0).validate(); }) == ErrorKind::Validation);
  CHECK(Box::uniform(2, -1, 2).contains(Eigen::Vector2d(-1, 2)));
  CHECK_FALSE(Box::unit(2).contains(Eigen::Vector2d(0.5, 1.0000001)));
}

}  // TEST_SUITE
