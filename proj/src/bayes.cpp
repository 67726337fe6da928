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

#include "mapfront/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mapfront/errors.hpp"
#include "mapfront/serialization.hpp"

namespace mapfront {

namespace {

constexpr double kQuarter = std::numbers::pi / 2.0;

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

std::vector<std::size_t> decode_bin(std::size_t flat, std::size_t axes, std::size_t k) {
  std::vector<std::size_t> out(axes);
  for (std::size_t i = axes; i-- > 0;) {
    out[i] = flat % k;
    flat /= k;
  }
  return out;
}

}  // namespace

double BinPosterior::floor() const {
  return bin_count() == 0 ? 0.0 : kExplorationMass / static_cast<double>(bin_count());
}

std::size_t default_bins_per_axis(std::size_t dimension) {
  if (dimension <= 2) return 6;
  if (dimension == 3) return 4;
  return 3;
}

std::size_t angular_bin_count(std::size_t dimension, std::size_t k) {
  require(dimension >= 1, ErrorKind::Validation, "dimension must be positive");
  require(k >= 1, ErrorKind::Validation, "need at least one bin per axis");
  return ipow(k, dimension - 1);
}

std::vector<double> hyperspherical_angles(const Coeffs& c) {
  const Eigen::Index n = c.size();
  require(n >= 1, ErrorKind::Validation, "empty scaling coefficients");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out.push_back(std::atan2(c.tail(n - i - 1).norm(), c[i]));
  }
  return out;
}

std::size_t angular_bin_index(const Coeffs& c, std::size_t k) {
  require(k >= 1, ErrorKind::Validation, "need at least one bin per axis");
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    require(!(c[i] < 0.0), ErrorKind::NegativeCoordinate,
            "scaling coefficients must lie in the nonnegative orthant");
  }
  require(c.size() > 0 && c.cwiseAbs().maxCoeff() > 0.0, ErrorKind::ZeroVector,
          "the zero vector has no direction");
  std::size_t flat = 0;
  for (double phi : hyperspherical_angles(c)) {
    const auto b = static_cast<std::size_t>(phi / kQuarter * static_cast<double>(k));
    flat = flat * k + std::min(b, k - 1);
  }
  return flat;
}

Eigen::VectorXd bin_probabilities(const Eigen::VectorXd& scores) {
  const Eigen::Index n = scores.size();
  require(n >= 1, ErrorKind::Validation, "no bins");
  require(scores.allFinite(), ErrorKind::Validation, "bin scores must be finite");
  const Eigen::VectorXd pos = scores.cwiseMax(0.0);
  const double total = pos.sum();
  const double inv = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd q = total > 0.0 ? Eigen::VectorXd(pos / total) : Eigen::VectorXd::Constant(n, inv);
  Eigen::VectorXd p = (1.0 - kExplorationMass) * q + Eigen::VectorXd::Constant(n, kExplorationMass * inv);
  return p / p.sum();
}

BinPosterior make_posterior(std::size_t dimension, std::size_t k, Eigen::VectorXd scores) {
  BinPosterior post;
  post.dimension = dimension;
  post.bins_per_axis = k;
  require(static_cast<std::size_t>(scores.size()) == angular_bin_count(dimension, k),
          ErrorKind::LengthMismatch, "one score per bin required");
  post.probabilities = bin_probabilities(scores);
  post.scores = std::move(scores);
  post.means = post.scores;
  post.stds = Eigen::VectorXd::Zero(post.scores.size());
  post.counts.assign(post.bin_count(), 0);
  return post;
}

BootstrapStats bootstrap_statistics(const std::vector<double>& losses, std::size_t q,
                                    double alpha, std::uint64_t seed) {
  require(!losses.empty(), ErrorKind::EmptyRecords, "no losses to resample");
  require(q >= 2, ErrorKind::Validation, "bootstrap needs at least two resamples");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Validation, "drop rate must lie in (0, 1)");
  const std::size_t m = losses.size();
  BootstrapStats out;
  out.mean = std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(m);
  const auto want = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(m)));
  const std::size_t drop = std::min(want, m - 1);
  if (drop == 0) return out;

  std::vector<double> resampled(q);
  std::vector<std::size_t> idx(m);
  for (std::size_t r = 0; r < q; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first `drop` slots are the dropped records.
    for (std::size_t i = 0; i < drop; ++i) {
      std::swap(idx[i], idx[i + rng.below(m - i)]);
    }
    double s = 0.0;
    for (std::size_t i = drop; i < m; ++i) s += losses[idx[i]];
    resampled[r] = s / static_cast<double>(m - drop);
  }
  const double mu = std::accumulate(resampled.begin(), resampled.end(), 0.0) / static_cast<double>(q);
  double var = 0.0;
  for (double v : resampled) var += (v - mu) * (v - mu);
  out.std = std::sqrt(var / static_cast<double>(q));
  return out;
}

double surrogate_loss(const EvaluationRecord& record, const std::vector<SurrogateModel>& models) {
  require(static_cast<Eigen::Index>(models.size()) == record.metrics.size(),
          ErrorKind::LengthMismatch, "one surrogate per task required");
  double s = 0.0;
  for (std::size_t n = 0; n < models.size(); ++n) {
    const double e = models[n].predict(record.c) - record.metrics[static_cast<Eigen::Index>(n)];
    s += e * e;
  }
  return s;
}

BinPosterior bootstrap_bin_scores(const RecordStore& records,
                                  const std::vector<SurrogateModel>& surrogates, std::size_t k,
                                  std::size_t q, double alpha, Rng& rng) {
  require(!records.empty(), ErrorKind::EmptyRecords, "no records to score");
  const auto dim = static_cast<std::size_t>(records.records().front().c.size());
  const std::size_t bins = angular_bin_count(dim, k);
  std::vector<std::vector<double>> losses(bins);
  double energy = 0.0;
  std::size_t binned = 0;
  for (const auto& r : records.records()) {
    if (r.c.cwiseAbs().maxCoeff() == 0.0) continue;
    losses[angular_bin_index(r.c, k)].push_back(surrogate_loss(r, surrogates));
    energy += r.metrics.squaredNorm();
    ++binned;
  }
  // Squared errors at rounding level of the metrics count as an exact fit.
  const double zero_level = kExactFitTolerance * (binned > 0 ? energy / static_cast<double>(binned) : 0.0);

  BinPosterior post;
  post.dimension = dim;
  post.bins_per_axis = k;
  post.scores = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bins));
  post.means = post.scores;
  post.stds = post.scores;
  post.counts.assign(bins, 0);
  const std::uint64_t base = rng.next_u64();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < bins; ++b) {
    post.counts[b] = losses[b].size();
    if (losses[b].empty()) continue;
    const auto stats = bootstrap_statistics(losses[b], q, alpha, derive_seed(base, b));
    const auto i = static_cast<Eigen::Index>(b);
    post.means[i] = stats.mean;
    post.stds[i] = stats.std;
    post.scores[i] = stats.mean + 0.5 * stats.std;
    if (post.scores[i] <= zero_level) post.scores[i] = 0.0;
    best = std::max(best, post.scores[i]);
  }
  require(std::isfinite(best), ErrorKind::EmptyRecords, "no record lies off the origin");
  for (std::size_t b = 0; b < bins; ++b) {
    if (post.counts[b] == 0) post.scores[static_cast<Eigen::Index>(b)] = best;
  }
  post.probabilities = bin_probabilities(post.scores);
  return post;
}

namespace {

std::size_t draw_bin(const Eigen::VectorXd& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(p.size() - 1);
}

// Uniform angles within the wedge, uniform radius within the box.
bool draw_in_bin(std::size_t bin, std::size_t k, const Box& box, Rng& rng, Coeffs& out) {
  const Eigen::Index n = box.dimension();
  const auto cells = decode_bin(bin, static_cast<std::size_t>(n - 1), k);
  const double width = kQuarter / static_cast<double>(k);
  Eigen::VectorXd u(n);
  double tail = 1.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double lo = static_cast<double>(cells[static_cast<std::size_t>(i)]) * width;
    const double phi = rng.uniform(lo, lo + width);
    u[i] = tail * std::cos(phi);
    tail *= std::sin(phi);
  }
  u[n - 1] = tail;

  double r_lo = 0.0;
  double r_hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (u[i] > 0.0) {
      r_lo = std::max(r_lo, box.lower[i] / u[i]);
      r_hi = std::min(r_hi, box.upper[i] / u[i]);
    } else if (box.lower[i] > 0.0 || box.upper[i] < 0.0) {
      return false;
    }
  }
  if (!(r_lo < r_hi)) return false;
  const double r = rng.uniform(r_lo, r_hi);
  if (r <= 0.0) return false;
  out = (r * u).cwiseMax(box.lower).cwiseMin(box.upper);
  return out.maxCoeff() > 0.0 && angular_bin_index(out, k) == bin;
}

}  // namespace

std::vector<BinDraw> posterior_draws(const BinPosterior& post, std::size_t n, const Box& box,
                                     Rng& rng) {
  require(n >= 1, ErrorKind::Validation, "need at least one draw");
  require(box.dimension() == static_cast<Eigen::Index>(post.dimension), ErrorKind::LengthMismatch,
          "box dimension differs from the posterior");
  box.validate();
  require(box.lower.minCoeff() >= 0.0, ErrorKind::NegativeCoordinate,
          "adaptive sampling needs a box inside the nonnegative orthant");
  constexpr int kAttempts = 1000;
  std::vector<BinDraw> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t bin = draw_bin(post.probabilities, rng);
    BinDraw d;
    bool ok = false;
    for (int a = 0; a < kAttempts && !ok; ++a) ok = draw_in_bin(bin, post.bins_per_axis, box, rng, d.c);
    if (ok) {
      d.bin = bin;
    } else {
      // The wedge misses the box: fall back to a uniform box point.
      do {
        d.c = Coeffs(box.dimension());
        for (Eigen::Index i = 0; i < d.c.size(); ++i) d.c[i] = rng.uniform(box.lower[i], box.upper[i]);
      } while (d.c.maxCoeff() <= 0.0);
      d.bin = angular_bin_index(d.c, post.bins_per_axis);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Coeffs> posterior_sample(const BinPosterior& post, std::size_t n, const Box& box,
                                     Rng& rng) {
  std::vector<Coeffs> out;
  for (auto& d : posterior_draws(post, n, box, rng)) out.push_back(std::move(d.c));
  return out;
}

MapConfig basm_map_config(const BasmConfig& config) {
  MapConfig m;
  m.samples = config.initial;
  m.sampling = SamplingKind::UniformBox;
  m.box = config.box;
  m.links = config.links;
  m.directions = config.directions;
  m.moop = config.moop;
  m.fit = config.fit;
  m.seed = config.seed;
  m.reevaluate_front = config.reevaluate_front;
  m.threads = config.threads;
  return m;
}

BayesResult run_bayesian_map(const BasmConfig& config, Oracle& oracle) {
  const Eigen::Index dim = oracle.dimension();
  const auto n = static_cast<std::size_t>(dim);
  MapConfig map = basm_map_config(config);
  if (map.samples == 0) map.samples = design_size(n);
  const Box box = resolve_box(map, dim);
  const auto links = map.links.empty() ? oracle.ranges() : map.links;
  require(links.size() == oracle.task_count(), ErrorKind::LengthMismatch,
          "one link per task required");
  require(config.bootstrap >= 2, ErrorKind::Validation, "bootstrap needs at least two resamples");
  require(config.alpha > 0.0 && config.alpha < 1.0, ErrorKind::Validation,
          "drop rate must lie in (0, 1)");
  require(box.lower.minCoeff() >= 0.0, ErrorKind::NegativeCoordinate,
          "adaptive sampling needs a box inside the nonnegative orthant");

  std::vector<std::size_t> rounds = config.per_round;
  if (rounds.size() == 1) rounds.assign(config.iterations, rounds.front());
  require(rounds.size() == config.iterations, ErrorKind::LengthMismatch,
          "per-round sample counts must match the iteration count");
  if (config.iterations == 0) rounds.clear();
  for (auto r : rounds) require(r >= 1, ErrorKind::Validation, "every round needs samples");
  const std::size_t k = config.bins_per_axis == 0 ? default_bins_per_axis(n) : config.bins_per_axis;

  BayesResult result;
  if (n > 3) {
    result.warnings.push_back(std::to_string(angular_bin_count(n, k)) +
                              " angular bins for " + std::to_string(n) +
                              " tasks; adaptive sampling is meant for three or fewer");
  }
  if (map.samples < design_size(n)) {
    result.warnings.push_back("initial sample count below the surrogate coefficient count");
  }
  oracle.ensure_budget(map.samples + std::accumulate(rounds.begin(), rounds.end(), std::size_t{0}));

  Rng sampling(derive_seed(config.seed, "sampling"));
  RecordStore store(oracle.task_count(), links);
  for (const auto& c : sample_coefficients(map, box, sampling)) store.evaluate_and_add(oracle, c);

  Rng bootstrap(derive_seed(config.seed, "bootstrap"));
  Rng posterior(derive_seed(config.seed, "posterior"));
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    auto [models, reports] = fit_surrogates(store, links, config.fit, config.threads);
    RoundDiagnostics diag;
    diag.round = j + 1;
    for (const auto& rep : reports) diag.r_squared.push_back(rep.r_squared);
    if (config.force_equal_scores) {
      diag.posterior = make_posterior(n, k, Eigen::VectorXd::Ones(
                                                static_cast<Eigen::Index>(angular_bin_count(n, k))));
    } else {
      diag.posterior = bootstrap_bin_scores(store, models, k, config.bootstrap, config.alpha, bootstrap);
    }
    diag.draws = posterior_draws(diag.posterior, rounds[j], box, posterior);
    for (const auto& d : diag.draws) store.evaluate_and_add(oracle, d.c);
    result.rounds.push_back(std::move(diag));
  }

  map.links = links;
  result.map = map_from_store(map, std::move(store), &oracle);
  return result;
}

nlohmann::json bayes_diagnostics_to_json(const BayesResult& result) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : result.rounds) {
    nlohmann::json sampled = nlohmann::json::array();
    for (const auto& d : r.draws) sampled.push_back({{"c", vector_to_json(d.c)}, {"bin", d.bin}});
    rounds.push_back({{"round", r.round},
                      {"bins_per_axis", r.posterior.bins_per_axis},
                      {"scores", vector_to_json(r.posterior.scores)},
                      {"means", vector_to_json(r.posterior.means)},
                      {"stds", vector_to_json(r.posterior.stds)},
                      {"counts", r.posterior.counts},
                      {"probabilities", vector_to_json(r.posterior.probabilities)},
                      {"sampled", std::move(sampled)},
                      {"r_squared", r.r_squared}});
  }
  return {{"rounds", std::move(rounds)}, {"warnings", result.warnings}};
}

}  // namespace mapfront
