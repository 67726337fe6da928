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

#include "mapfront/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapfront/bayes.hpp"
#include "mapfront/core_model.hpp"
#include "mapfront/eval_oracle.hpp"
#include "mapfront/map_pipeline.hpp"
#include "mapfront/metrics.hpp"
#include "mapfront/moop.hpp"
#include "mapfront/nested.hpp"
#include "mapfront/random.hpp"
#include "mapfront/serialization.hpp"
#include "mapfront/surrogate.hpp"

namespace mapfront {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BudgetExceeded:
      return 3;
    case ErrorKind::SingularDesign:
      return 4;
    default:
      return 2;
  }
}

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::uint64_t seed = 0;
  long long budget = -1;
  std::string out;
  std::size_t threads = 1;
  std::string box;
};

void add_common(CLI::App* app, Common& c, bool out_required = true) {
  app->add_option("--seed", c.seed, "Seed for every random stream");
  app->add_option("--budget", c.budget, "Cap on oracle evaluations")->check(CLI::NonNegativeNumber);
  auto* out = app->add_option("--out", c.out, "Output file or directory");
  if (out_required) out->required();
  app->add_option("--threads", c.threads, "Worker cap")->check(CLI::PositiveNumber);
  app->add_option("--box", c.box, "Decision box, lo:hi or one lo:hi per task joined by commas");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::ParseError, "bad number '" + s + "' in " + what);
}

Box parse_box(const std::string& text, Eigen::Index n) {
  const auto parts = split(text, ',');
  require(parts.size() == 1 || static_cast<Eigen::Index>(parts.size()) == n,
          ErrorKind::Validation, "--box needs one lo:hi or one per task");
  Box b{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = parts[parts.size() == 1 ? 0 : static_cast<std::size_t>(i)];
    const auto lh = split(p, ':');
    require(lh.size() == 2, ErrorKind::ParseError, "box entries look like lo:hi");
    b.lower[i] = to_double(lh[0], "--box");
    b.upper[i] = to_double(lh[1], "--box");
  }
  b.validate();
  return b;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), ErrorKind::ParseError, where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    require(allowed.count(key) == 1, ErrorKind::Validation,
            "unknown key '" + key + "' in " + where);
  }
}

std::vector<MetricRange> links_from_json(const json& j) {
  std::vector<MetricRange> out;
  for (const auto& l : j) out.push_back(range_from_json(l));
  return out;
}

std::vector<MetricRange> links_from_text(const std::string& text) {
  std::vector<MetricRange> out;
  for (const auto& p : split(text, ',')) out.push_back(range_from_text(p));
  return out;
}

std::vector<Direction> directions_from_json(const json& j) {
  std::vector<Direction> out;
  for (const auto& d : j) out.push_back(parse_direction(d.get<std::string>()));
  return out;
}

json directions_to_json(const std::vector<Direction>& ds) {
  json j = json::array();
  for (auto d : ds) j.push_back(to_string(d));
  return j;
}

Nsga3Params moop_from_json(const json& j) {
  check_keys(j, {"population", "generations", "partitions", "crossover_eta", "crossover_rate",
                 "mutation_eta", "mutation_rate"},
             "moop");
  Nsga3Params p;
  p.population = j.value("population", p.population);
  p.generations = j.value("generations", p.generations);
  p.partitions = j.value("partitions", p.partitions);
  p.crossover_eta = j.value("crossover_eta", p.crossover_eta);
  p.crossover_rate = j.value("crossover_rate", p.crossover_rate);
  p.mutation_eta = j.value("mutation_eta", p.mutation_eta);
  p.mutation_rate = j.value("mutation_rate", p.mutation_rate);
  return p;
}

json moop_to_json(const Nsga3Params& p) {
  return {{"population", p.population},       {"generations", p.generations},
          {"partitions", p.partitions},       {"crossover_eta", p.crossover_eta},
          {"crossover_rate", p.crossover_rate}, {"mutation_eta", p.mutation_eta},
          {"mutation_rate", p.mutation_rate}};
}

FitOptions fit_from_json(const json& j) {
  check_keys(j, {"max_iterations", "window", "relative_tolerance", "clip_epsilon",
                 "condition_limit"},
             "fit");
  FitOptions f;
  f.max_iterations = j.value("max_iterations", f.max_iterations);
  f.window = j.value("window", f.window);
  f.relative_tolerance = j.value("relative_tolerance", f.relative_tolerance);
  f.clip_epsilon = j.value("clip_epsilon", f.clip_epsilon);
  f.condition_limit = j.value("condition_limit", f.condition_limit);
  return f;
}

json fit_to_json(const FitOptions& f) {
  return {{"max_iterations", f.max_iterations},
          {"window", f.window},
          {"relative_tolerance", f.relative_tolerance},
          {"clip_epsilon", f.clip_epsilon},
          {"condition_limit", f.condition_limit}};
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  return read_json_file(path);
}

const std::set<std::string> kMapKeys = {"samples", "sampling", "provided", "box", "links",
                                        "directions", "objective_weights", "moop", "fit",
                                        "seed", "reevaluate_front", "threads"};

// Fields shared by map and bayes configs.
void apply_search_keys(const json& j, MapConfig& m) {
  if (j.contains("box")) m.box = box_from_json(j.at("box"));
  if (j.contains("links")) m.links = links_from_json(j.at("links"));
  if (j.contains("directions")) m.directions = directions_from_json(j.at("directions"));
  if (j.contains("moop")) m.moop = moop_from_json(j.at("moop"));
  if (j.contains("fit")) m.fit = fit_from_json(j.at("fit"));
  m.seed = j.value("seed", m.seed);
  m.reevaluate_front = j.value("reevaluate_front", m.reevaluate_front);
  m.threads = j.value("threads", m.threads);
}

MapConfig map_config_from_json(const json& j) {
  check_keys(j, kMapKeys, "map config");
  MapConfig m;
  m.samples = j.value("samples", m.samples);
  if (j.contains("sampling")) m.sampling = parse_sampling_kind(j.at("sampling").get<std::string>());
  if (j.contains("provided")) {
    for (const auto& c : j.at("provided")) m.provided.push_back(vector_from_json(c));
    if (!j.contains("sampling")) m.sampling = SamplingKind::ProvidedList;
  }
  if (j.contains("objective_weights")) m.objective_weights = matrix_from_json(j.at("objective_weights"));
  apply_search_keys(j, m);
  return m;
}

json map_config_to_json(const MapConfig& m) {
  json j = {{"samples", m.samples},
            {"sampling", to_string(m.sampling)},
            {"directions", directions_to_json(m.directions)},
            {"moop", moop_to_json(m.moop)},
            {"fit", fit_to_json(m.fit)},
            {"seed", m.seed},
            {"reevaluate_front", m.reevaluate_front}};
  if (m.box.dimension() > 0) j["box"] = box_to_json(m.box);
  j["links"] = json::array();
  for (const auto& l : m.links) j["links"].push_back(range_to_json(l));
  if (!m.provided.empty()) {
    j["provided"] = json::array();
    for (const auto& c : m.provided) j["provided"].push_back(vector_to_json(c));
  }
  if (m.objective_weights.size() != 0) j["objective_weights"] = matrix_to_json(m.objective_weights);
  return j;
}

// Flags win over config values.
void apply_common(const CLI::App& app, const Common& c, MapConfig& m, Eigen::Index n) {
  if (app.count("--seed") > 0) m.seed = c.seed;
  if (app.count("--threads") > 0) m.threads = c.threads;
  if (!c.box.empty()) m.box = parse_box(c.box, n);
}

SyntheticLandscape load_landscape(const std::string& path) {
  return landscape_from_json(read_json_file(path));
}

SyntheticOracle make_oracle(const std::string& path, std::uint64_t seed, const Common& c) {
  SyntheticOracle oracle(load_landscape(path), derive_seed(seed, "oracle"));
  if (c.budget >= 0) oracle.set_budget(static_cast<std::size_t>(c.budget));
  return oracle;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  long long budget = -1;
  std::string started = utc_now();
};

void write_manifest(const fs::path& dir, const Manifest& m, std::size_t eval_count) {
  json j = {{"command", m.command},
            {"config_digest", json_digest(m.config)},
            {"seed", m.seed},
            {"version", kToolVersion},
            {"started_at", m.started},
            {"finished_at", utc_now()},
            {"eval_count", eval_count}};
  j["budget"] = m.budget >= 0 ? json(m.budget) : json(nullptr);
  write_json_file(dir / "manifest.json", j);
}

json map_report(const std::string& command, const MapResult& r) {
  json rs = json::array();
  json fits = json::array();
  for (const auto& f : r.fit_reports) {
    rs.push_back(f.r_squared);
    fits.push_back(fit_report_to_json(f));
  }
  return {{"command", command},
          {"N", r.surrogates.empty() ? 0 : r.surrogates.front().task_dimension()},
          {"tasks", r.surrogates.size()},
          {"records", r.records.size()},
          {"sample_evaluations", r.sample_evaluations},
          {"reevaluations", r.reevaluations},
          {"eval_count", r.eval_count},
          {"front_size", r.front_predicted.size()},
          {"spec_digest", r.front_predicted.spec_digest},
          {"r_squared", std::move(rs)},
          {"fit", std::move(fits)}};
}

void write_surrogates(const fs::path& dir, const std::vector<SurrogateModel>& models) {
  for (std::size_t n = 0; n < models.size(); ++n) {
    write_json_file(dir / ("surrogate_task_" + std::to_string(n + 1) + ".json"),
                    surrogate_to_json(models[n]));
  }
}

void write_map_outputs(const fs::path& dir, const std::string& command, const MapResult& r) {
  save_records(r.records, dir / "records.csv");
  write_surrogates(dir, r.surrogates);
  write_json_file(dir / "front_predicted.json", front_to_json(r.front_predicted));
  if (r.reevaluations > 0) write_json_file(dir / "front_real.json", front_to_json(r.front_real));
  write_json_file(dir / "report.json", map_report(command, r));
}

std::vector<Coeffs> read_coefficients(const std::string& path) {
  const json j = read_json_file(path);
  const json& list = j.is_object() ? j.at("coefficients") : j;
  std::vector<Coeffs> out;
  for (const auto& c : list) out.push_back(vector_from_json(c));
  require(!out.empty(), ErrorKind::EmptyInput, "no scaling coefficients in " + path);
  return out;
}

// ---------------------------------------------------------------------------

struct GenOracleArgs {
  std::string spec;
};

int cmd_gen_oracle(const CLI::App& app, const Common& c, const GenOracleArgs& a,
                   std::ostream& out) {
  const json spec = read_json_file(a.spec);
  SyntheticLandscape land;
  if (spec.contains("random")) {
    check_keys(spec, {"N", "random"}, "oracle spec");
    const json& r = spec.at("random");
    check_keys(r, {"seed", "link", "cubic_gamma", "noise_sigma"}, "random oracle spec");
    TradeoffOptions opts;
    if (r.contains("link")) opts.link = range_from_json(r.at("link"));
    opts.cubic_gamma = r.value("cubic_gamma", 0.0);
    opts.noise_sigma = r.value("noise_sigma", 0.0);
    const std::uint64_t seed = app.count("--seed") > 0 ? c.seed : r.value("seed", c.seed);
    land = make_tradeoff_landscape(spec.at("N").get<std::size_t>(), seed, opts);
  } else {
    land = landscape_from_json(spec);
  }
  write_json_file(c.out, landscape_to_json(land));
  out << "wrote " << c.out << " (" << land.task_count() << " tasks)\n";
  return 0;
}

struct SampleArgs {
  std::size_t samples = 30;
  std::string sampling = "uniform_box";
  std::size_t dimension = 0;
  std::string oracle;
};

int cmd_sample(const Common& c, const SampleArgs& a, std::ostream& out) {
  std::size_t n = a.dimension;
  if (!a.oracle.empty()) n = static_cast<std::size_t>(load_landscape(a.oracle).dimension());
  require(n >= 1, ErrorKind::Validation, "give --dimension or --oracle");
  MapConfig m;
  m.samples = a.samples;
  m.sampling = parse_sampling_kind(a.sampling);
  require(m.sampling != SamplingKind::ProvidedList, ErrorKind::Validation,
          "sample draws coefficients; provided lists go to evaluate");
  const Box box = c.box.empty() ? Box::unit(static_cast<Eigen::Index>(n))
                                : parse_box(c.box, static_cast<Eigen::Index>(n));
  Rng rng(derive_seed(c.seed, "sampling"));
  json list = json::array();
  for (const auto& v : sample_coefficients(m, box, rng)) list.push_back(vector_to_json(v));
  write_json_file(c.out, {{"N", n}, {"coefficients", std::move(list)}});
  out << "wrote " << a.samples << " coefficient vectors to " << c.out << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string oracle;
  std::string coeffs;
};

int cmd_evaluate(const Common& c, const EvaluateArgs& a, std::ostream& out) {
  auto oracle = make_oracle(a.oracle, c.seed, c);
  const auto list = read_coefficients(a.coeffs);
  oracle.ensure_budget(list.size());
  RecordStore store(oracle.task_count(), oracle.ranges());
  for (const auto& v : list) {
    require(v.size() == oracle.dimension(), ErrorKind::LengthMismatch,
            "coefficient vector length differs from the oracle");
    store.evaluate_and_add(oracle, v);
  }
  save_records(store, c.out, "evaluated by mapfront " + std::string(kToolVersion));
  out << "evaluated " << store.eval_count() << " points into " << c.out << "\n";
  return 0;
}

struct FitArgs {
  std::string records;
  std::string links;
};

int cmd_fit(const Common& c, const FitArgs& a, std::ostream& out) {
  std::vector<MetricRange> links;
  if (!a.links.empty()) links = links_from_text(a.links);
  RecordStore store = load_records(a.records);
  if (links.size() == 1 && store.task_count() > 1) links.assign(store.task_count(), links.front());
  if (links.empty()) links = store.ranges();
  require(links.size() == store.task_count(), ErrorKind::LengthMismatch,
          "one link per task required");
  store.set_ranges(links);
  const auto [models, reports] = fit_surrogates(store, links, FitOptions{}, c.threads);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  write_surrogates(dir, models);
  json rs = json::array();
  json fits = json::array();
  for (const auto& r : reports) {
    rs.push_back(r.r_squared);
    fits.push_back(fit_report_to_json(r));
  }
  write_json_file(dir / "fit_report.json",
                  {{"records", store.size()}, {"r_squared", rs}, {"fit", fits}});
  out << "fitted " << models.size() << " surrogates on " << store.size() << " records\n";
  return 0;
}

struct MapArgs {
  std::string config;
  std::string oracle;
  std::string records;
  std::size_t samples = 0;
};

int cmd_map(const CLI::App& app, const Common& c, const MapArgs& a, std::ostream& out) {
  require(a.oracle.empty() != a.records.empty(), ErrorKind::Validation,
          "give exactly one of --oracle and --records");
  MapConfig m = map_config_from_json(read_config(a.config));
  if (a.samples > 0) m.samples = a.samples;
  Manifest man{"map", {}, 0, c.budget};
  const fs::path dir(c.out);
  fs::create_directories(dir);
  MapResult r;
  if (!a.oracle.empty()) {
    auto landscape = load_landscape(a.oracle);
    apply_common(app, c, m, landscape.dimension());
    SyntheticOracle oracle(std::move(landscape), derive_seed(m.seed, "oracle"));
    if (c.budget >= 0) oracle.set_budget(static_cast<std::size_t>(c.budget));
    man.config = map_config_to_json(m);
    r = run_map(m, oracle);
  } else {
    RecordStore store = load_records(a.records, m.links);
    require(!store.empty(), ErrorKind::EmptyStore, "no records in " + a.records);
    apply_common(app, c, m, store.records().front().c.size());
    man.config = map_config_to_json(m);
    r = run_map_on_records(m, store);
  }
  man.seed = m.seed;
  write_map_outputs(dir, "map", r);
  write_manifest(dir, man, r.eval_count);
  out << "map: " << r.front_predicted.size() << " front points, " << r.eval_count
      << " oracle evaluations\n";
  return 0;
}

struct NestedArgs {
  std::string config;
  std::string oracle;
};

int cmd_nested(const CLI::App& app, const Common& c, const NestedArgs& a, std::ostream& out) {
  const json j = read_config(a.config);
  check_keys(j, {"per_pair_budget", "preference", "parameter_dimension", "task_vector_scale",
                 "pretrained", "finetuned", "direction", "box", "moop", "fit", "seed"},
             "nested config");
  const SyntheticLandscape land = load_landscape(a.oracle);
  const auto n = land.task_count();
  require(n >= 2, ErrorKind::TooFewNodes, "nested merging needs at least two tasks");

  NestedConfig cfg;
  cfg.per_pair_budget = j.value("per_pair_budget", cfg.per_pair_budget);
  if (j.contains("direction")) cfg.direction = parse_direction(j.at("direction").get<std::string>());
  if (j.contains("box")) cfg.box = box_from_json(j.at("box"));
  if (!c.box.empty()) cfg.box = parse_box(c.box, 2);
  if (j.contains("moop")) cfg.moop = moop_from_json(j.at("moop"));
  if (j.contains("fit")) cfg.fit = fit_from_json(j.at("fit"));
  cfg.seed = app.count("--seed") > 0 ? c.seed : j.value("seed", c.seed);

  Eigen::VectorXd weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0);
  if (j.contains("preference")) weights = vector_from_json(j.at("preference"));
  require(static_cast<std::size_t>(weights.size()) == n, ErrorKind::LengthMismatch,
          "one preference weight per task required");
  const PreferenceVector pref(weights);

  ParameterVector pretrained;
  std::vector<ParameterVector> finetuned;
  if (j.contains("pretrained")) {
    pretrained = load_parameter_vector(j.at("pretrained").get<std::string>());
    for (const auto& p : j.at("finetuned")) finetuned.push_back(load_parameter_vector(p.get<std::string>()));
    require(finetuned.size() == n, ErrorKind::LengthMismatch, "one fine-tuned model per task required");
  } else {
    const auto d = j.value("parameter_dimension", std::size_t{64});
    const double scale = j.value("task_vector_scale", 0.1);
    require(d >= n, ErrorKind::Validation, "parameter dimension below the task count");
    Rng rng(derive_seed(cfg.seed, "parameters"));
    Eigen::VectorXd pre(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < pre.size(); ++i) pre[i] = rng.normal();
    pretrained = ParameterVector(pre);
    for (std::size_t t = 0; t < n; ++t) {
      Eigen::VectorXd v(pre.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scale * rng.normal();
      finetuned.emplace_back(pre + v);
    }
  }
  const TaskMatrix tasks = compute_task_vectors(pretrained, finetuned);
  SyntheticParameterOracle oracle(land, pretrained, tasks, derive_seed(cfg.seed, "oracle"));

  std::vector<TaskNode> nodes;
  for (std::size_t t = 0; t < n; ++t) nodes.push_back({{t}, 0.0, finetuned[t]});
  const std::size_t projected = cfg.per_pair_budget * n * static_cast<std::size_t>(
                                    std::ceil(std::log2(static_cast<double>(n))));
  if (c.budget >= 0) {
    require(projected <= static_cast<std::size_t>(c.budget), ErrorKind::BudgetExceeded,
            "nested merging needs about " + std::to_string(projected) +
                " task evaluations, over the cap of " + std::to_string(c.budget));
  }

  Manifest man{"nested", j, cfg.seed, c.budget};
  man.config["seed"] = cfg.seed;
  const NestedResult r = nested_merge(pretrained, nodes, pref, cfg, oracle);
  const Eigen::VectorXd final_metrics = oracle.evaluate(r.final_params, r.final_tasks);

  const fs::path dir(c.out);
  fs::create_directories(dir);
  write_json_file(dir / "merge_tree.json", merge_tree_to_json(r));
  for (std::size_t s = 0; s < r.steps.size(); ++s) {
    write_json_file(dir / ("front_step_" + std::to_string(s + 1) + ".json"),
                    front_to_json(r.steps[s].front));
  }
  save_parameter_vector(r.final_params, dir / "final_params.json");
  write_json_file(dir / "report.json",
                  {{"command", "nested"},
                   {"N", n},
                   {"per_pair_budget", cfg.per_pair_budget},
                   {"preference", vector_to_json(pref.weights())},
                   {"final_tasks", r.final_tasks},
                   {"final_coefficients", vector_to_json(oracle.coefficients_of(r.final_params))},
                   {"final_metrics", vector_to_json(final_metrics)},
                   {"map_evaluations", r.map_evaluations},
                   {"probe_evaluations", r.probe_evaluations},
                   {"final_evaluations", r.final_tasks.size()},
                   {"eval_count", oracle.task_evaluations()}});
  write_manifest(dir, man, oracle.task_evaluations());
  out << "nested: " << r.steps.size() << " merges, " << r.map_evaluations
      << " MAP task evaluations\n";
  return 0;
}

struct BayesArgs {
  std::string config;
  std::string oracle;
};

int cmd_bayes(const CLI::App& app, const Common& c, const BayesArgs& a, std::ostream& out) {
  const json j = read_config(a.config);
  check_keys(j, {"iterations", "initial", "per_round", "bins_per_axis", "bootstrap", "alpha",
                 "box", "links", "directions", "moop", "fit", "seed", "reevaluate_front",
                 "threads"},
             "bayes config");
  auto landscape = load_landscape(a.oracle);
  MapConfig m;
  apply_search_keys(j, m);
  apply_common(app, c, m, landscape.dimension());

  BasmConfig cfg;
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.initial = j.value("initial", cfg.initial);
  if (j.contains("per_round")) {
    cfg.per_round = j.at("per_round").is_array() ? j.at("per_round").get<std::vector<std::size_t>>()
                                                 : std::vector<std::size_t>{j.at("per_round").get<std::size_t>()};
  }
  cfg.bins_per_axis = j.value("bins_per_axis", cfg.bins_per_axis);
  cfg.bootstrap = j.value("bootstrap", cfg.bootstrap);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.seed = m.seed;
  cfg.box = m.box;
  cfg.links = m.links;
  cfg.directions = m.directions;
  cfg.moop = m.moop;
  cfg.fit = m.fit;
  cfg.reevaluate_front = m.reevaluate_front;
  cfg.threads = m.threads;

  SyntheticOracle oracle(std::move(landscape), derive_seed(cfg.seed, "oracle"));
  if (c.budget >= 0) oracle.set_budget(static_cast<std::size_t>(c.budget));
  Manifest man{"bayes", j, cfg.seed, c.budget};
  man.config["seed"] = cfg.seed;
  const BayesResult r = run_bayesian_map(cfg, oracle);

  const fs::path dir(c.out);
  fs::create_directories(dir);
  write_map_outputs(dir, "bayes", r.map);
  write_json_file(dir / "bayes_diagnostics.json", bayes_diagnostics_to_json(r));
  write_manifest(dir, man, r.map.eval_count);
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  out << "bayes: " << r.map.front_predicted.size() << " front points, " << r.map.eval_count
      << " oracle evaluations\n";
  return 0;
}

struct CompareArgs {
  std::string front_a;
  std::string front_b;
  std::string oracle;
  std::size_t k = 100;
  double p = 2.0;
  bool raw = false;
};

int cmd_compare(const Common& c, const CompareArgs& a, std::ostream& out) {
  const ParetoFront fa = front_from_json(read_json_file(a.front_a));
  const ParetoFront fb = front_from_json(read_json_file(a.front_b));
  require(!fa.empty() && !fb.empty(), ErrorKind::EmptyFront, "cannot compare an empty front");
  require(fa.points.front().c.size() == fb.points.front().c.size() &&
              fa.points.front().f.size() == fb.points.front().f.size(),
          ErrorKind::LengthMismatch, "fronts differ in dimension");
  require(fa.directions == fb.directions, ErrorKind::Validation, "fronts differ in directions");
  auto oracle = make_oracle(a.oracle, c.seed, c);
  const ComparisonReport r = compare_fronts(fa, fb, oracle, a.k, c.seed, a.p,
                                            a.raw ? DistanceMode::Raw : DistanceMode::Normalized);
  json j = comparison_to_json(r);
  j["eval_count"] = oracle.eval_count();
  write_json_file(c.out, j);
  out << "win_rate " << r.win_rate << ", gd+igd " << r.gd_plus_igd << "\n";
  return 0;
}

struct GridArgs {
  std::string oracle;
  std::size_t points = 15;
};

int cmd_grid(const Common& c, const GridArgs& a, std::ostream& out) {
  auto oracle = make_oracle(a.oracle, c.seed, c);
  const Box box = c.box.empty() ? Box::unit(oracle.dimension()) : parse_box(c.box, oracle.dimension());
  const ParetoFront f = grid_search_front(
      oracle, box, a.points, std::vector<Direction>(oracle.task_count(), Direction::Maximize));
  write_json_file(c.out, front_to_json(f));
  out << "grid: " << f.size() << " front points from " << oracle.eval_count() << " evaluations\n";
  return 0;
}

struct ReportArgs {
  std::string dir;
};

int cmd_report(const Common& c, const ReportArgs& a, std::ostream& out) {
  const fs::path dir(a.dir);
  const json report = read_json_file(dir / "report.json");
  json summary = {{"report", report}};
  for (const char* name : {"front_predicted.json", "front_real.json"}) {
    if (!fs::exists(dir / name)) continue;
    const ParetoFront f = front_from_json(read_json_file(dir / name));
    json best = json::array();
    if (!f.empty()) {
      const Eigen::Index m = f.points.front().f.size();
      for (Eigen::Index k = 0; k < m; ++k) {
        double v = f.points.front().f[k];
        for (const auto& p : f.points) {
          v = f.directions.size() > static_cast<std::size_t>(k) &&
                      f.directions[static_cast<std::size_t>(k)] == Direction::Minimize
                  ? std::min(v, p.f[k])
                  : std::max(v, p.f[k]);
        }
        best.push_back(v);
      }
    }
    summary[std::string(name, std::string(name).find('.'))] = {{"size", f.size()},
                                                               {"best_per_objective", best}};
  }
  out << "command: " << report.value("command", std::string("?")) << "\n";
  if (report.contains("eval_count")) out << "oracle evaluations: " << report.at("eval_count") << "\n";
  if (report.contains("r_squared")) out << "R^2 per task: " << report.at("r_squared").dump() << "\n";
  for (const char* key : {"front_predicted", "front_real"}) {
    if (summary.contains(key)) {
      out << key << ": " << summary[key]["size"] << " points, best per objective "
          << summary[key]["best_per_objective"].dump() << "\n";
    }
  }
  if (!c.out.empty()) write_json_file(c.out, summary);
  return 0;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Amortized Pareto fronts for task-vector model merging", "mapfront"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Common common;
  GenOracleArgs gen;
  SampleArgs sample;
  EvaluateArgs evaluate;
  FitArgs fit;
  MapArgs map;
  NestedArgs nested;
  BayesArgs bayes;
  CompareArgs compare;
  GridArgs grid;
  ReportArgs report;

  auto* s_gen = app.add_subcommand("gen-oracle", "Write a synthetic oracle description");
  add_common(s_gen, common);
  s_gen->add_option("--spec", gen.spec, "Oracle spec JSON")->required()->check(CLI::ExistingFile);

  auto* s_sample = app.add_subcommand("sample", "Draw scaling coefficients");
  add_common(s_sample, common);
  s_sample->add_option("--samples", sample.samples, "Number of vectors")->check(CLI::PositiveNumber);
  s_sample->add_option("--sampling", sample.sampling, "uniform_box or latin_hypercube");
  s_sample->add_option("--dimension", sample.dimension, "Number of tasks");
  s_sample->add_option("--oracle", sample.oracle, "Take the dimension from an oracle file")
      ->check(CLI::ExistingFile);

  auto* s_eval = app.add_subcommand("evaluate", "Evaluate coefficient vectors on an oracle");
  add_common(s_eval, common);
  s_eval->add_option("--oracle", evaluate.oracle, "Oracle JSON")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--coeffs", evaluate.coeffs, "Coefficient list JSON")
      ->required()
      ->check(CLI::ExistingFile);

  auto* s_fit = app.add_subcommand("fit", "Fit one quadratic surrogate per task");
  add_common(s_fit, common);
  s_fit->add_option("--records", fit.records, "Records CSV or JSON")->required()->check(CLI::ExistingFile);
  s_fit->add_option("--links", fit.links, "identity, sigmoid[:l:u] or softplus[:l]; comma list per task");

  auto* s_map = app.add_subcommand("map", "Sample, fit, and search the amortized front");
  add_common(s_map, common);
  s_map->add_option("--config", map.config, "Map config JSON")->check(CLI::ExistingFile);
  s_map->add_option("--oracle", map.oracle, "Oracle JSON")->check(CLI::ExistingFile);
  s_map->add_option("--records", map.records, "Use existing records instead of an oracle")
      ->check(CLI::ExistingFile);
  s_map->add_option("--samples", map.samples, "Override the sample count");

  auto* s_nested = app.add_subcommand("nested", "Pairwise nested merging");
  add_common(s_nested, common);
  s_nested->add_option("--config", nested.config, "Nested config JSON")->check(CLI::ExistingFile);
  s_nested->add_option("--oracle", nested.oracle, "Oracle JSON")->required()->check(CLI::ExistingFile);

  auto* s_bayes = app.add_subcommand("bayes", "Adaptive sampling followed by the front search");
  add_common(s_bayes, common);
  s_bayes->add_option("--config", bayes.config, "Bayes config JSON")->check(CLI::ExistingFile);
  s_bayes->add_option("--oracle", bayes.oracle, "Oracle JSON")->required()->check(CLI::ExistingFile);

  auto* s_cmp = app.add_subcommand("compare", "Win rate, GD and IGD between two fronts");
  add_common(s_cmp, common);
  s_cmp->add_option("--front-a", compare.front_a, "Front JSON")->required()->check(CLI::ExistingFile);
  s_cmp->add_option("--front-b", compare.front_b, "Reference front JSON")
      ->required()
      ->check(CLI::ExistingFile);
  s_cmp->add_option("--oracle", compare.oracle, "Oracle JSON")->required()->check(CLI::ExistingFile);
  s_cmp->add_option("--k", compare.k, "Members drawn per front")->check(CLI::PositiveNumber);
  s_cmp->add_option("--p", compare.p, "Distance exponent")->check(CLI::PositiveNumber);
  s_cmp->add_flag("--raw", compare.raw, "Skip objective normalization");

  auto* s_grid = app.add_subcommand("grid", "Ground-truth front from a full lattice");
  add_common(s_grid, common);
  s_grid->add_option("--oracle", grid.oracle, "Oracle JSON")->required()->check(CLI::ExistingFile);
  s_grid->add_option("--points-per-dim", grid.points, "Lattice points per axis");

  auto* s_report = app.add_subcommand("report", "Summarize a run directory");
  add_common(s_report, common, false);
  s_report->add_option("--dir", report.dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  std::vector<const char*> argv{"mapfront"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    print_error(err, "ParseError", e.what());
    return 2;
  }

  try {
    if (s_gen->parsed()) return cmd_gen_oracle(*s_gen, common, gen, out);
    if (s_sample->parsed()) return cmd_sample(common, sample, out);
    if (s_eval->parsed()) return cmd_evaluate(common, evaluate, out);
    if (s_fit->parsed()) return cmd_fit(common, fit, out);
    if (s_map->parsed()) return cmd_map(*s_map, common, map, out);
    if (s_nested->parsed()) return cmd_nested(*s_nested, common, nested, out);
    if (s_bayes->parsed()) return cmd_bayes(*s_bayes, common, bayes, out);
    if (s_cmp->parsed()) return cmd_compare(common, compare, out);
    if (s_grid->parsed()) return cmd_grid(common, grid, out);
    if (s_report->parsed()) return cmd_report(common, report, out);
  } catch (const Error& e) {
    print_error(err, std::string(to_string(e.kind())), e.what());
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    print_error(err, "ParseError", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    print_error(err, "Io", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error(err, "Internal", e.what());
    return 2;
  }
  return 2;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mapfront
