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

#include "mapfront/map_pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

#include "mapfront/errors.hpp"
#include "mapfront/serialization.hpp"

namespace mapfront {

std::string to_string(SamplingKind k) {
  switch (k) {
    case SamplingKind::UniformBox:
      return "uniform_box";
    case SamplingKind::LatinHypercube:
      return "latin_hypercube";
    case SamplingKind::ProvidedList:
      return "provided_list";
  }
  return "uniform_box";
}

SamplingKind parse_sampling_kind(const std::string& s) {
  for (auto k : {SamplingKind::UniformBox, SamplingKind::LatinHypercube,
                 SamplingKind::ProvidedList}) {
    if (to_string(k) == s) return k;
  }
  fail(ErrorKind::Validation, "unknown sampling kind '" + s + "'");
}

std::vector<Coeffs> sample_coefficients(const MapConfig& config, const Box& box, Rng& rng) {
  box.validate();
  const Eigen::Index n = box.dimension();
  if (config.sampling == SamplingKind::ProvidedList) {
    for (const auto& c : config.provided) {
      require(c.size() == n, ErrorKind::LengthMismatch,
              "provided scaling coefficients have the wrong length");
      require(c.allFinite(), ErrorKind::Validation, "provided scaling coefficients must be finite");
    }
    return config.provided;
  }
  const std::size_t k = config.samples;
  require(k >= 1, ErrorKind::Validation, "need at least one sample");
  std::vector<Coeffs> out(k, Coeffs(n));
  if (config.sampling == SamplingKind::UniformBox) {
    for (auto& c : out) {
      for (Eigen::Index i = 0; i < n; ++i) c[i] = rng.uniform(box.lower[i], box.upper[i]);
    }
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::size_t> strata(k);
    std::iota(strata.begin(), strata.end(), 0);
    rng.shuffle(strata);
    const double span = box.upper[i] - box.lower[i];
    for (std::size_t s = 0; s < k; ++s) {
      const double u = (static_cast<double>(strata[s]) + rng.uniform()) / static_cast<double>(k);
      out[s][i] = box.lower[i] + u * span;
    }
  }
  return out;
}

std::pair<std::vector<SurrogateModel>, std::vector<FitReport>> fit_surrogates(
    const RecordStore& store, const std::vector<MetricRange>& links, const FitOptions& opts,
    std::size_t threads) {
  const std::size_t n = store.task_count();
  require(links.size() == n, ErrorKind::LengthMismatch, "one link per task required");
  std::vector<SurrogateModel> models(n);
  std::vector<FitReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t task) {
    try {
      std::tie(models[task], reports[task]) = fit_surrogate(store, task, links[task], opts);
    } catch (...) {
      errors[task] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
  if (workers == 1) {
    for (std::size_t t = 0; t < n; ++t) work(t);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < n; t += workers) work(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return {std::move(models), std::move(reports)};
}

ObjectiveSpec make_objective_spec(const MapConfig& config, std::vector<SurrogateModel> surrogates,
                                  const Box& box) {
  ObjectiveSpec spec;
  spec.box = box;
  spec.weights = config.objective_weights;
  spec.surrogates = std::move(surrogates);
  spec.directions = config.directions;
  if (spec.directions.empty()) {
    spec.directions.assign(spec.objective_count(), Direction::Maximize);
  }
  spec.validate();
  return spec;
}

Box resolve_box(const MapConfig& config, Eigen::Index dimension) {
  if (config.box.dimension() == 0) return Box::unit(dimension);
  require(config.box.dimension() == dimension, ErrorKind::LengthMismatch,
          "decision box dimension differs from the oracle");
  config.box.validate();
  return config.box;
}

namespace {

std::vector<MetricRange> resolve_links(const MapConfig& config, std::vector<MetricRange> fallback) {
  if (config.links.empty()) return fallback;
  require(config.links.size() == fallback.size(), ErrorKind::LengthMismatch,
          "one link per task required");
  return config.links;
}

}  // namespace

MapResult map_from_store(const MapConfig& config, RecordStore store, Oracle* oracle) {
  require(!store.empty(), ErrorKind::EmptyStore, "record store is empty");
  const Eigen::Index dim = store.records().front().c.size();
  const Box box = resolve_box(config, dim);
  const auto links = resolve_links(config, store.ranges());

  MapResult result;
  std::tie(result.surrogates, result.fit_reports) =
      fit_surrogates(store, links, config.fit, config.threads);
  const ObjectiveSpec spec = make_objective_spec(config, result.surrogates, box);
  Nsga3Params moop = config.moop;
  moop.seed = derive_seed(config.seed, "moop");
  result.front_predicted = nsga3_front(spec, moop);
  result.front_predicted.spec_digest = spec_digest(spec);
  result.sample_evaluations = store.eval_count();
  result.records = std::move(store);

  result.front_real.provenance = result.front_predicted.provenance;
  result.front_real.directions = result.front_predicted.directions;
  result.front_real.spec_digest = result.front_predicted.spec_digest;
  if (oracle != nullptr && config.reevaluate_front) {
    oracle->ensure_budget(result.front_predicted.size());
    for (const auto& p : result.front_predicted.points) {
      Eigen::VectorXd m = oracle->evaluate(p.c);
      if (config.objective_weights.size() != 0) m = config.objective_weights * m;
      result.front_real.points.push_back({p.c, std::move(m)});
    }
    result.reevaluations = result.front_predicted.size();
    result.front_real.evaluations = result.reevaluations;
  }
  result.eval_count = result.sample_evaluations + result.reevaluations;
  return result;
}

MapResult run_map(const MapConfig& config, Oracle& oracle) {
  const Eigen::Index dim = oracle.dimension();
  const Box box = resolve_box(config, dim);
  const auto links = resolve_links(config, oracle.ranges());
  const std::size_t k =
      config.sampling == SamplingKind::ProvidedList ? config.provided.size() : config.samples;
  require(k >= design_size(static_cast<std::size_t>(dim)), ErrorKind::InsufficientSamples,
          std::to_string(k) + " samples cannot determine " +
              std::to_string(design_size(static_cast<std::size_t>(dim))) +
              " surrogate coefficients");
  oracle.ensure_budget(k);

  Rng rng(derive_seed(config.seed, "sampling"));
  RecordStore store(oracle.task_count(), links);
  for (const auto& c : sample_coefficients(config, box, rng)) store.evaluate_and_add(oracle, c);
  return map_from_store(config, std::move(store), &oracle);
}

MapResult run_map_on_records(const MapConfig& config, const RecordStore& store) {
  return map_from_store(config, store, nullptr);
}

}  // namespace mapfront
