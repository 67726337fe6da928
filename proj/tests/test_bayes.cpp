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

#include <cmath>
#include <numbers>

#include "mapfront/bayes.hpp"
#include "mapfront/errors.hpp"
#include "reference.hpp"

using namespace mapfront;
using testing_support::error_kind;
using testing_support::FunctionOracle;

namespace {

Eigen::VectorXd bowl(const Eigen::VectorXd& c) {
  return Eigen::Vector2d(1.0 - (c[0] - 0.8) * (c[0] - 0.8) - 0.6 * c[1] * c[1],
                         0.9 - 0.5 * c[0] * c[0] - (c[1] - 0.7) * (c[1] - 0.7));
}

SurrogateModel zero_model(Eigen::Index n) {
  return SurrogateModel::from_parts(Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0,
                                    MetricRange::unbounded());
}

// Pearson statistic of observed counts against equal expected counts.
double chi_square_uniform(const std::vector<std::size_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double chi = 0.0;
  for (auto c : counts) chi += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  return chi;
}

// Upper 1% points of the chi-square distribution.
double chi_square_critical(std::size_t dof) {
  static const double table[] = {0, 6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090};
  return table[dof];
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("bin indices in two dimensions") {
  CHECK(angular_bin_index(Eigen::Vector2d(1, 0), 3) == 0);
  CHECK(angular_bin_index(Eigen::Vector2d(0, 1), 3) == 2);
  CHECK(angular_bin_index(Eigen::Vector2d(1, 1), 3) == 1);
  CHECK(angular_bin_count(2, 3) == 3);
  const auto phi = hyperspherical_angles(Eigen::Vector2d(1, 1));
  REQUIRE(phi.size() == 1);
  CHECK(phi[0] == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("bin indices ignore the radius") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d c(rng.uniform(), rng.uniform(), rng.uniform());
    const double lambda = rng.uniform(0.01, 50.0);
    CHECK(angular_bin_index(c, 4) == angular_bin_index(Eigen::Vector3d(lambda * c), 4));
  }
}

TEST_CASE("three dimensional corners") {
  CHECK(angular_bin_count(3, 2) == 4);
  // phi_1 = atan2(|(c2, c3)|, c1), phi_2 = atan2(c3, c2).
  const auto e1 = angular_bin_index(Eigen::Vector3d(1, 0, 0), 2);
  const auto e2 = angular_bin_index(Eigen::Vector3d(0, 1, 0), 2);
  const auto e3 = angular_bin_index(Eigen::Vector3d(0, 0, 1), 2);
  CHECK(e1 == 0);
  CHECK(e2 == 2);
  CHECK(e3 == 3);
  const auto phi = hyperspherical_angles(Eigen::Vector3d(1, 1, 1));
  CHECK(phi[0] == doctest::Approx(std::atan2(std::sqrt(2.0), 1.0)));
  CHECK(phi[1] == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("bin index errors") {
  CHECK(error_kind([] { angular_bin_index(Eigen::Vector2d(0, 0), 3); }) == ErrorKind::ZeroVector);
  CHECK(error_kind([] { angular_bin_index(Eigen::Vector2d(-0.1, 1), 3); }) == ErrorKind::NegativeCoordinate);
}

TEST_CASE("default bins per axis") {
  CHECK(default_bins_per_axis(2) == 6);
  CHECK(default_bins_per_axis(3) == 4);
  CHECK(angular_bin_count(4, default_bins_per_axis(4)) >= 8);
}

TEST_CASE("bin probabilities keep the floor and sum to one") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd s(1 + rng.below(40));
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = rng.uniform(-1, 3);
    const auto p = bin_probabilities(s);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    CHECK(p.minCoeff() >= kExplorationMass / static_cast<double>(s.size()) - 1e-15);
  }
  const auto u = bin_probabilities(Eigen::Vector3d(-1, 0, -2));
  CHECK(u.isApproxToConstant(1.0 / 3.0));
  const auto post = make_posterior(2, 4, Eigen::Vector4d(1, 1, 1, 1));
  CHECK(post.floor() == doctest::Approx(0.0025));
  CHECK(post.probabilities.isApproxToConstant(0.25));
}

TEST_CASE("bootstrap with equal losses has no spread") {
  const auto s = bootstrap_statistics({0.3, 0.3, 0.3, 0.3}, 30, 0.2, 1);
  CHECK(s.mean == doctest::Approx(0.3));
  CHECK(s.std == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(error_kind([] { bootstrap_statistics({1.0}, 1, 0.2, 0); }) == ErrorKind::Validation);
  CHECK(error_kind([] { bootstrap_statistics({1.0}, 5, 1.0, 0); }) == ErrorKind::Validation);
}

TEST_CASE("bootstrap spread matches enumeration over drop subsets") {
  const std::vector<std::vector<double>> cases{{0.1, 0.5, 0.2}, {1.0, 0.0, 0.4, 0.9, 0.3}, {2.0, 0.5}};
  for (const auto& losses : cases) {
    const std::size_t drop = std::min<std::size_t>(
        static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(losses.size()))), losses.size() - 1);
    const auto exact = reference::drop_subset_moments(losses, drop);
    const auto s = bootstrap_statistics(losses, 20000, 0.2, 7);
    CHECK(s.mean == doctest::Approx(exact.mean).epsilon(1e-12));
    CHECK(s.std == doctest::Approx(exact.std).epsilon(0.03));
  }
}

TEST_CASE("bin scores from a store") {
  // Zero surrogate: the loss of a record is its squared metric.
  RecordStore store(1);
  const std::vector<std::pair<Eigen::Vector2d, double>> rows{
      {{1.0, 0.1}, 0.1}, {{0.9, 0.2}, 0.5}, {{0.7, 0.3}, 0.2},               // bin 0
      {{0.1, 1.0}, 1.0}, {{0.2, 0.9}, 0.0}, {{0.3, 0.8}, 0.4}, {{0.1, 0.5}, 0.9}, {{0.05, 0.6}, 0.3},  // bin 1
      {{0.0, 0.0}, 5.0}};  // origin, not binned
  for (const auto& [c, m] : rows) store.add({c, Eigen::VectorXd::Constant(1, m)});
  Rng rng(11);
  const auto post = bootstrap_bin_scores(store, {zero_model(2)}, 2, 20000, 0.2, rng);
  REQUIRE(post.bin_count() == 2);
  CHECK(post.counts == std::vector<std::size_t>{3, 5});
  const std::vector<std::vector<double>> losses{{0.01, 0.25, 0.04}, {1.0, 0.0, 0.16, 0.81, 0.09}};
  for (std::size_t b = 0; b < 2; ++b) {
    const std::size_t drop = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(losses[b].size())));
    const auto exact = reference::drop_subset_moments(losses[b], drop);
    const auto i = static_cast<Eigen::Index>(b);
    CHECK(post.means[i] == doctest::Approx(exact.mean).epsilon(1e-12));
    CHECK(post.stds[i] == doctest::Approx(exact.std).epsilon(0.03));
    CHECK(post.scores[i] == doctest::Approx(post.means[i] + 0.5 * post.stds[i]).epsilon(1e-12));
  }
  CHECK(std::abs(post.probabilities.sum() - 1.0) <= 1e-12);
}

TEST_CASE("empty bins inherit the best occupied score") {
  RecordStore store(1);
  store.add({Eigen::Vector2d(1.0, 0.0), Eigen::VectorXd::Constant(1, 0.5)});
  store.add({Eigen::Vector2d(0.0, 1.0), Eigen::VectorXd::Constant(1, 0.2)});
  Rng rng(1);
  const auto post = bootstrap_bin_scores(store, {zero_model(2)}, 3, 10, 0.2, rng);
  CHECK(post.counts == std::vector<std::size_t>{1, 0, 1});
  CHECK(post.scores[1] == post.scores.maxCoeff());
  CHECK(post.scores[1] == doctest::Approx(0.25));
  CHECK(error_kind([&] {
          Rng r(0);
          bootstrap_bin_scores(RecordStore(1), {zero_model(2)}, 3, 10, 0.2, r);
        }) == ErrorKind::EmptyRecords);
}

TEST_CASE("a perfect surrogate leaves the posterior uniform") {
  FunctionOracle oracle(2, 2, bowl);
  RecordStore store(2);
  Rng rng(2);
  for (int i = 0; i < 40; ++i) store.evaluate_and_add(oracle, Eigen::Vector2d(rng.uniform(), rng.uniform()));
  const auto fits = fit_surrogates(store, {MetricRange::unbounded(), MetricRange::unbounded()}, FitOptions{});
  const auto post = bootstrap_bin_scores(store, fits.first, 6, 30, 0.2, rng);
  CHECK(post.scores.isZero(0.0));
  CHECK(post.probabilities.isApproxToConstant(1.0 / 6.0));
}

TEST_CASE("equal scores give uniform bin frequencies") {
  const auto post = make_posterior(2, 6, Eigen::VectorXd::Ones(6));
  Rng rng(8);
  const auto draws = posterior_draws(post, 10000, Box::unit(2), rng);
  std::vector<std::size_t> counts(6, 0);
  for (const auto& d : draws) ++counts[d.bin];
  const double sigma = std::sqrt(10000.0 * (1.0 / 6.0) * (5.0 / 6.0));
  for (auto c : counts) CHECK(std::abs(static_cast<double>(c) - 10000.0 / 6.0) <= 3.0 * sigma);
}

TEST_CASE("degenerate posterior concentrates on the scored bin") {
  const auto post = make_posterior(2, 2, Eigen::Vector2d(0.0, 2.5));
  Rng rng(9);
  const auto draws = posterior_draws(post, 5000, Box::unit(2), rng);
  std::size_t in_one = 0;
  for (const auto& d : draws) in_one += d.bin == 1 ? 1 : 0;
  CHECK(static_cast<double>(in_one) / 5000.0 >= 0.98);
}

TEST_CASE("draws lie in their claimed bin and inside the box") {
  Box box;
  box.lower = Eigen::Vector3d(0.0, 0.1, 0.0);
  box.upper = Eigen::Vector3d(1.0, 0.6, 2.0);
  Eigen::VectorXd scores(16);
  Rng srng(4);
  for (Eigen::Index i = 0; i < 16; ++i) scores[i] = srng.uniform();
  const auto post = make_posterior(3, 4, scores);
  Rng rng(10);
  for (const auto& d : posterior_draws(post, 2000, box, rng)) {
    CHECK(angular_bin_index(d.c, 4) == d.bin);
    CHECK((d.c.array() >= box.lower.array()).all());
    CHECK((d.c.array() <= box.upper.array()).all());
  }
  Box negative = Box::unit(2);
  negative.lower[0] = -1.0;
  CHECK(error_kind([&] { posterior_sample(make_posterior(2, 3, Eigen::Vector3d::Ones()), 1, negative, rng); }) ==
        ErrorKind::NegativeCoordinate);
}

TEST_CASE("no adaptive rounds equals plain MAP") {
  BasmConfig cfg;
  cfg.iterations = 0;
  cfg.initial = 12;
  cfg.seed = 3;
  cfg.moop.generations = 40;
  FunctionOracle o1(2, 2, bowl);
  FunctionOracle o2(2, 2, bowl);
  const auto b = run_bayesian_map(cfg, o1);
  const auto m = run_map(basm_map_config(cfg), o2);
  CHECK(basm_map_config(cfg).samples == 12);
  REQUIRE(b.map.front_predicted.size() == m.front_predicted.size());
  for (std::size_t i = 0; i < m.front_predicted.size(); ++i) {
    CHECK(b.map.front_predicted.points[i].c == m.front_predicted.points[i].c);
    CHECK(b.map.front_real.points[i].f == m.front_real.points[i].f);
  }
  CHECK(o1.eval_count() == o2.eval_count());
  CHECK(b.rounds.empty());
}

TEST_CASE("buffer holds the initial and per-round samples") {
  BasmConfig cfg;
  cfg.iterations = 3;
  cfg.initial = 6;
  cfg.per_round = {4, 2, 5};
  cfg.seed = 1;
  cfg.moop.generations = 20;
  cfg.reevaluate_front = false;
  FunctionOracle oracle(2, 2, bowl);
  const auto r = run_bayesian_map(cfg, oracle);
  CHECK(r.map.records.size() == 6 + 4 + 2 + 5);
  CHECK(oracle.eval_count() == 17);
  CHECK(r.map.eval_count == 17);
  REQUIRE(r.rounds.size() == 3);
  CHECK(r.rounds[1].draws.size() == 2);
  const auto j = bayes_diagnostics_to_json(r);
  CHECK(j.at("rounds").size() == 3);
  CHECK(j.at("rounds")[0].contains("probabilities"));
}

TEST_CASE("equal scores reproduce uniform bin sampling") {
  BasmConfig cfg;
  cfg.iterations = 1;
  cfg.initial = 6;
  cfg.per_round = {10000};
  cfg.force_equal_scores = true;
  cfg.seed = 6;
  cfg.moop.generations = 1;
  cfg.reevaluate_front = false;
  FunctionOracle oracle(2, 2, bowl);
  const auto r = run_bayesian_map(cfg, oracle);
  REQUIRE(r.rounds.size() == 1);
  std::vector<std::size_t> counts(6, 0);
  for (const auto& d : r.rounds[0].draws) ++counts[d.bin];
  CHECK(chi_square_uniform(counts) < chi_square_critical(5));
}

TEST_CASE("same seed, same Bayesian run") {
  BasmConfig cfg;
  cfg.iterations = 2;
  cfg.initial = 6;
  cfg.seed = 12;
  cfg.moop.generations = 20;
  FunctionOracle o1(2, 2, bowl);
  FunctionOracle o2(2, 2, bowl);
  const auto a = run_bayesian_map(cfg, o1);
  const auto b = run_bayesian_map(cfg, o2);
  REQUIRE(a.map.records.size() == b.map.records.size());
  for (std::size_t i = 0; i < a.map.records.size(); ++i) {
    CHECK(a.map.records.records()[i].c == b.map.records.records()[i].c);
  }
  CHECK(bayes_diagnostics_to_json(a) == bayes_diagnostics_to_json(b));
}

TEST_CASE("large dimensions warn") {
  BasmConfig cfg;
  cfg.iterations = 1;
  cfg.initial = 15;
  cfg.per_round = {2};
  cfg.moop.generations = 2;
  cfg.reevaluate_front = false;
  FunctionOracle oracle(4, 1, [](const Eigen::VectorXd& c) { return Eigen::VectorXd::Constant(1, c.sum()); });
  const auto r = run_bayesian_map(cfg, oracle);
  CHECK(!r.warnings.empty());
}

}  // TEST_SUITE
