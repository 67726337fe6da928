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

#include "mapfront/errors.hpp"
#include "mapfront/map_pipeline.hpp"
#include "reference.hpp"

using namespace mapfront;
using testing_support::error_kind;
using testing_support::FunctionOracle;

namespace {

// Two concave identity-link quadratics with conflicting maximizers.
Eigen::VectorXd two_peaks(const Eigen::VectorXd& c) {
  const double x = c[0];
  const double y = c[1];
  return Eigen::Vector2d(1.0 - (x - 0.9) * (x - 0.9) - 0.5 * (y - 0.1) * (y - 0.1) + 0.2 * x * y,
                         0.8 - 0.7 * (x - 0.2) * (x - 0.2) - (y - 0.8) * (y - 0.8) - 0.1 * x * y);
}

MapConfig quick_config(std::size_t k, std::uint64_t seed = 1) {
  MapConfig cfg;
  cfg.samples = k;
  cfg.seed = seed;
  cfg.moop.generations = 60;
  return cfg;
}

double grid_mse(const std::vector<SurrogateModel>& models, const SyntheticLandscape& land) {
  double s = 0.0;
  std::size_t n = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const Eigen::Vector2d c(i / 20.0, j / 20.0);
      const Eigen::VectorXd truth = eval_synthetic(land, c, 0);
      for (std::size_t t = 0; t < models.size(); ++t) {
        const double d = models[t].predict(c) - truth[static_cast<Eigen::Index>(t)];
        s += d * d;
        ++n;
      }
    }
  }
  return s / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("map_pipeline") {

TEST_CASE("uniform samples stay in the box and repeat under a seed") {
  MapConfig cfg;
  cfg.samples = 5;
  const Box box = Box::unit(2);
  Rng r1(9);
  Rng r2(9);
  const auto a = sample_coefficients(cfg, box, r1);
  const auto b = sample_coefficients(cfg, box, r2);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i].minCoeff() >= 0.0);
    CHECK(a[i].maxCoeff() <= 1.0);
  }
}

TEST_CASE("latin hypercube puts one sample per stratum") {
  MapConfig cfg;
  cfg.samples = 8;
  cfg.sampling = SamplingKind::LatinHypercube;
  Box box;
  box.lower = Eigen::Vector3d(-1, 0, 2);
  box.upper = Eigen::Vector3d(1, 4, 3);
  Rng rng(2);
  const auto s = sample_coefficients(cfg, box, rng);
  for (Eigen::Index d = 0; d < 3; ++d) {
    std::vector<int> hits(8, 0);
    for (const auto& c : s) {
      const double u = (c[d] - box.lower[d]) / (box.upper[d] - box.lower[d]);
      ++hits[static_cast<std::size_t>(std::min(7.0, std::floor(u * 8)))];
    }
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("provided lists pass through") {
  MapConfig cfg;
  cfg.sampling = SamplingKind::ProvidedList;
  cfg.provided = {Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.7, 0.3)};
  Rng rng(0);
  const auto s = sample_coefficients(cfg, Box::unit(2), rng);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == cfg.provided[0]);
  CHECK(s[1] == cfg.provided[1]);
  cfg.provided.push_back(Eigen::Vector3d(0, 0, 0));
  CHECK(error_kind([&] { sample_coefficients(cfg, Box::unit(2), rng); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("sampling kinds round trip through their names") {
  for (auto k : {SamplingKind::UniformBox, SamplingKind::LatinHypercube, SamplingKind::ProvidedList}) {
    CHECK(parse_sampling_kind(to_string(k)) == k);
  }
  CHECK(error_kind([] { parse_sampling_kind("sobol"); }) == ErrorKind::Validation);
}

TEST_CASE("exact quadratic: near perfect fit and matching fronts") {
  FunctionOracle oracle(2, 2, two_peaks);
  const auto r = run_map(quick_config(30), oracle);
  REQUIRE(r.fit_reports.size() == 2);
  for (const auto& f : r.fit_reports) CHECK(f.r_squared >= 0.999);
  REQUIRE(r.front_real.size() == r.front_predicted.size());
  CHECK(r.front_predicted.size() > 1);
  for (std::size_t i = 0; i < r.front_real.size(); ++i) {
    CHECK(r.front_real.points[i].c == r.front_predicted.points[i].c);
    CHECK((r.front_real.points[i].f - r.front_predicted.points[i].f).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("evaluation accounting is exact") {
  FunctionOracle oracle(2, 2, two_peaks);
  const auto r = run_map(quick_config(30), oracle);
  CHECK(r.sample_evaluations == 30);
  CHECK(r.reevaluations == r.front_predicted.size());
  CHECK(r.eval_count == 30 + r.front_predicted.size());
  CHECK(oracle.eval_count() == r.eval_count);

  FunctionOracle quiet(2, 2, two_peaks);
  auto cfg = quick_config(30);
  cfg.reevaluate_front = false;
  const auto q = run_map(cfg, quiet);
  CHECK(quiet.eval_count() == 30);
  CHECK(q.front_real.empty());
}

TEST_CASE("too few samples for the surrogate") {
  FunctionOracle oracle(2, 2, two_peaks);
  CHECK(error_kind([&] { run_map(quick_config(5), oracle); }) == ErrorKind::InsufficientSamples);
  CHECK(oracle.eval_count() == 0);
  FunctionOracle exact(2, 2, two_peaks);
  CHECK_NOTHROW(run_map(quick_config(6), exact));
}

TEST_CASE("budget is checked before sampling") {
  FunctionOracle oracle(2, 2, two_peaks);
  oracle.set_budget(10);
  CHECK(error_kind([&] { run_map(quick_config(30), oracle); }) == ErrorKind::BudgetExceeded);
  CHECK(oracle.eval_count() == 0);
  // Enough for sampling but not for re-evaluating the front.
  FunctionOracle tight(2, 2, two_peaks);
  tight.set_budget(31);
  CHECK(error_kind([&] { run_map(quick_config(30), tight); }) == ErrorKind::BudgetExceeded);
  CHECK(tight.eval_count() == 30);
}

TEST_CASE("more samples never hurt a noiseless fit on average") {
  double mse30 = 0.0;
  double mse100 = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    TradeoffOptions opts;
    opts.link = MetricRange::unbounded();
    opts.cubic_gamma = 0.3;
    const auto land = make_tradeoff_landscape(2, 100 + s, opts);
    for (std::size_t k : {30u, 100u}) {
      SyntheticOracle oracle(land, 0);
      auto cfg = quick_config(k, s);
      cfg.reevaluate_front = false;
      cfg.moop.generations = 1;
      const auto r = run_map(cfg, oracle);
      (k == 30 ? mse30 : mse100) += grid_mse(r.surrogates, land);
    }
  }
  CHECK(mse100 <= mse30);
}

TEST_CASE("same seed, same fronts") {
  FunctionOracle o1(2, 2, two_peaks);
  FunctionOracle o2(2, 2, two_peaks);
  const auto a = run_map(quick_config(20, 5), o1);
  const auto b = run_map(quick_config(20, 5), o2);
  REQUIRE(a.front_predicted.size() == b.front_predicted.size());
  for (std::size_t i = 0; i < a.front_predicted.size(); ++i) {
    CHECK(a.front_predicted.points[i].c == b.front_predicted.points[i].c);
  }
  CHECK(a.front_predicted.spec_digest == b.front_predicted.spec_digest);
}

TEST_CASE("parallel fits equal serial fits") {
  const auto land = make_tradeoff_landscape(4, 3);
  SyntheticOracle oracle(land, 1);
  RecordStore store(4, land.ranges());
  MapConfig cfg;
  cfg.samples = 40;
  Rng rng(1);
  for (const auto& c : sample_coefficients(cfg, Box::unit(4), rng)) store.evaluate_and_add(oracle, c);
  const auto serial = fit_surrogates(store, land.ranges(), FitOptions{}, 1);
  const auto parallel = fit_surrogates(store, land.ranges(), FitOptions{}, 4);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(serial.first[t].A() == parallel.first[t].A());
    CHECK(serial.first[t].b() == parallel.first[t].b());
    CHECK(serial.second[t].r_squared == parallel.second[t].r_squared);
  }
}

TEST_CASE("fitting from stored records matches the oracle run") {
  FunctionOracle oracle(2, 2, two_peaks);
  auto cfg = quick_config(25, 8);
  const auto live = run_map(cfg, oracle);
  const auto offline = run_map_on_records(cfg, live.records);
  CHECK(offline.eval_count == 25);
  CHECK(offline.reevaluations == 0);
  REQUIRE(offline.front_predicted.size() == live.front_predicted.size());
  for (std::size_t i = 0; i < live.front_predicted.size(); ++i) {
    CHECK(offline.front_predicted.points[i].c == live.front_predicted.points[i].c);
  }
  CHECK(error_kind([&] { run_map_on_records(cfg, RecordStore(2)); }) == ErrorKind::EmptyStore);
}

TEST_CASE("objective weights aggregate tasks") {
  FunctionOracle oracle(2, 3, [](const Eigen::VectorXd& c) {
    return Eigen::Vector3d(two_peaks(c)[0], two_peaks(c)[1], 0.5 - c.squaredNorm());
  });
  auto cfg = quick_config(30);
  cfg.objective_weights = Eigen::MatrixXd(2, 3);
  cfg.objective_weights << 0.5, 0.5, 0.0, 0.0, 0.0, 1.0;
  const auto r = run_map(cfg, oracle);
  REQUIRE(!r.front_real.empty());
  for (std::size_t i = 0; i < r.front_real.size(); ++i) {
    CHECK(r.front_real.points[i].f.size() == 2);
    CHECK((r.front_real.points[i].f - r.front_predicted.points[i].f).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("box dimension must match the oracle") {
  FunctionOracle oracle(2, 2, two_peaks);
  auto cfg = quick_config(30);
  cfg.box = Box::unit(3);
  CHECK(error_kind([&] { run_map(cfg, oracle); }) == ErrorKind::LengthMismatch);
}

}  // TEST_SUITE
