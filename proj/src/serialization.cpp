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

#include "mapfront/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mapfront/errors.hpp"
#include "mapfront/random.hpp"

namespace mapfront {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  require(j.is_array(), ErrorKind::ParseError, "expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), ErrorKind::ParseError, "expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

nlohmann::json range_to_json(const MetricRange& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  if (r.kind != MetricRange::Kind::Unbounded) j["l"] = r.lower;
  if (r.kind == MetricRange::Kind::Bounded) j["u"] = r.upper;
  return j;
}

MetricRange range_from_text(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  auto number = [&](std::size_t i, double fallback) {
    if (parts.size() <= i) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(parts[i], &used);
      if (used == parts[i].size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::ParseError, "bad number in link '" + text + "'");
  };
  switch (parse_range_kind(parts.front())) {
    case MetricRange::Kind::Unbounded:
      require(parts.size() == 1, ErrorKind::ParseError, "identity link takes no bounds");
      return MetricRange::unbounded();
    case MetricRange::Kind::Bounded:
      require(parts.size() == 1 || parts.size() == 3, ErrorKind::ParseError,
              "bounded link needs both bounds");
      return MetricRange::bounded(number(1, 0.0), number(2, 1.0));
    case MetricRange::Kind::LowerBounded:
      require(parts.size() <= 2, ErrorKind::ParseError, "softplus link takes one bound");
      return MetricRange::lower_bounded(number(1, 0.0));
  }
  return {};
}

MetricRange range_from_json(const nlohmann::json& j) {
  if (j.is_string()) return range_from_text(j.get<std::string>());
  switch (parse_range_kind(j.at("kind").get<std::string>())) {
    case MetricRange::Kind::Unbounded:
      return MetricRange::unbounded();
    case MetricRange::Kind::Bounded:
      return MetricRange::bounded(j.at("l").get<double>(), j.at("u").get<double>());
    case MetricRange::Kind::LowerBounded:
      return MetricRange::lower_bounded(j.at("l").get<double>());
  }
  return {};
}

nlohmann::json box_to_json(const Box& b) {
  return {{"lower", vector_to_json(b.lower)}, {"upper", vector_to_json(b.upper)}};
}

Box box_from_json(const nlohmann::json& j) {
  Box b{vector_from_json(j.at("lower")), vector_from_json(j.at("upper"))};
  b.validate();
  return b;
}

nlohmann::json surrogate_to_json(const SurrogateModel& m) {
  nlohmann::json j;
  j["N"] = m.task_dimension();
  j["link"] = range_to_json(m.link());
  j["A_upper_triangle"] = m.upper_triangle();
  j["b"] = vector_to_json(m.b());
  j["e"] = m.e();
  return j;
}

SurrogateModel surrogate_from_json(const nlohmann::json& j) {
  Eigen::VectorXd b = vector_from_json(j.at("b"));
  require(j.at("N").get<std::size_t>() == static_cast<std::size_t>(b.size()),
          ErrorKind::ParseError, "surrogate N does not match len(b)");
  return SurrogateModel::from_upper_triangle(j.at("A_upper_triangle").get<std::vector<double>>(),
                                             std::move(b), j.at("e").get<double>(),
                                             range_from_json(j.at("link")));
}

nlohmann::json fit_report_to_json(const FitReport& r) {
  return {{"r_squared", r.r_squared},
          {"residual_mse", r.residual_mse},
          {"condition_warning", r.condition_warning},
          {"converged", r.converged},
          {"iterations", r.iterations}};
}

nlohmann::json front_to_json(const ParetoFront& front) {
  nlohmann::json j;
  j["provenance"] = to_string(front.provenance);
  j["directions"] = nlohmann::json::array();
  for (auto d : front.directions) j["directions"].push_back(to_string(d));
  j["spec_digest"] = front.spec_digest;
  j["evaluations"] = front.evaluations;
  j["points"] = nlohmann::json::array();
  for (const auto& p : front.points) {
    j["points"].push_back({{"c", vector_to_json(p.c)}, {"f", vector_to_json(p.f)}});
  }
  return j;
}

ParetoFront front_from_json(const nlohmann::json& j) {
  try {
    ParetoFront front;
    front.provenance = parse_provenance(j.value("provenance", std::string("ingested")));
    if (j.contains("directions")) {
      for (const auto& d : j.at("directions")) front.directions.push_back(parse_direction(d));
    }
    front.spec_digest = j.value("spec_digest", std::string());
    front.evaluations = j.value("evaluations", std::size_t{0});
    const auto& pts = j.is_array() ? j : j.at("points");
    for (const auto& p : pts) {
      front.points.push_back({vector_from_json(p.at("c")), vector_from_json(p.at("f"))});
    }
    if (front.directions.empty() && !front.points.empty()) {
      front.directions.assign(static_cast<std::size_t>(front.points.front().f.size()),
                              Direction::Maximize);
    }
    for (const auto& p : front.points) {
      require(static_cast<std::size_t>(p.f.size()) == front.directions.size(),
              ErrorKind::LengthMismatch, "front point has the wrong objective count");
    }
    return front;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("front: ") + e.what());
  }
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(vector_to_json(m.row(i).transpose()));
  return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::ParseError, "expected a nonempty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::VectorXd row = vector_from_json(j[static_cast<std::size_t>(i)]);
    require(row.size() == cols, ErrorKind::ParseError, "ragged matrix");
    m.row(i) = row.transpose();
  }
  return m;
}

nlohmann::json landscape_to_json(const SyntheticLandscape& land) {
  nlohmann::json j;
  j["N"] = land.dimension();
  j["tasks"] = nlohmann::json::array();
  for (const auto& t : land.tasks) {
    j["tasks"].push_back({{"A", matrix_to_json(t.A)},
                          {"b", vector_to_json(t.b)},
                          {"e", t.e},
                          {"link", range_to_json(t.link)},
                          {"cubic_gamma", t.cubic_gamma},
                          {"noise_sigma", t.noise_sigma}});
  }
  return j;
}

SyntheticLandscape landscape_from_json(const nlohmann::json& j) {
  try {
    SyntheticLandscape land;
    for (const auto& t : j.at("tasks")) {
      TaskLandscape task;
      task.A = matrix_from_json(t.at("A"));
      task.b = vector_from_json(t.at("b"));
      task.e = t.value("e", 0.0);
      if (t.contains("link")) task.link = range_from_json(t.at("link"));
      task.cubic_gamma = t.value("cubic_gamma", 0.0);
      task.noise_sigma = t.value("noise_sigma", 0.0);
      land.tasks.push_back(std::move(task));
    }
    land.validate();
    if (j.contains("N")) {
      require(j.at("N").get<Eigen::Index>() == land.dimension(), ErrorKind::Validation,
              "landscape N does not match its tasks");
    }
    return land;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("landscape: ") + e.what());
  }
}

nlohmann::json spec_to_json(const ObjectiveSpec& spec) {
  nlohmann::json j;
  j["box"] = box_to_json(spec.box);
  j["directions"] = nlohmann::json::array();
  for (auto d : spec.directions) j["directions"].push_back(to_string(d));
  j["surrogates"] = nlohmann::json::array();
  for (const auto& s : spec.surrogates) j["surrogates"].push_back(surrogate_to_json(s));
  if (spec.weights.size() != 0) j["weights"] = matrix_to_json(spec.weights);
  return j;
}

std::string json_digest(const nlohmann::json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

std::string spec_digest(const ObjectiveSpec& spec) { return json_digest(spec_to_json(spec)); }

nlohmann::json comparison_to_json(const ComparisonReport& r) {
  return {{"win_rate", r.win_rate}, {"gd", r.gd},       {"igd", r.igd},
          {"gd_plus_igd", r.gd_plus_igd}, {"K", r.k},   {"p", r.p},
          {"seed", r.seed},         {"normalized", r.normalized}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace mapfront
