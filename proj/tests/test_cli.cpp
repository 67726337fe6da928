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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mapfront/cli.hpp"
#include "mapfront/serialization.hpp"

using namespace mapfront;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MAPFRONT_DATA_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("mapfront_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string data(const std::string& f) { return (kData / f).string(); }

std::string error_kind_of(const Run& r) {
  return nlohmann::json::parse(r.err).at("error").at("kind").get<std::string>();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen-oracle is deterministic") {
  TempDir t("gen");
  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "a.json"}).code == 0);
  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "b.json"}).code == 0);
  CHECK(slurp(t / "a.json") == slurp(t / "b.json"));
  CHECK(landscape_from_json(read_json_file(t / "a.json")).task_count() == 2);
}

TEST_CASE("gen-oracle rejects a non-symmetric curvature") {
  TempDir t("gen_bad");
  write_text(t / "spec.json",
             R"({"N": 2, "tasks": [{"A": [[-1, 0.5], [0, -1]], "b": [1, 0], "e": 0}]})");
  const auto r = cli({"gen-oracle", "--spec", t / "spec.json", "--out", t / "o.json"});
  CHECK(r.code == 2);
  CHECK(nlohmann::json::parse(r.err).contains("error"));
  CHECK(!fs::exists(t / "o.json"));
}

TEST_CASE("gen-oracle defaults the cubic term to zero") {
  TempDir t("gen_gamma");
  write_text(t / "spec.json", R"({"N": 2, "tasks": [{"A": [[-1, 0], [0, -1]], "b": [1, 0], "e": 0}]})");
  REQUIRE(cli({"gen-oracle", "--spec", t / "spec.json", "--out", t / "o.json"}).code == 0);
  CHECK(read_json_file(t / "o.json").at("tasks")[0].at("cubic_gamma") == 0.0);
  write_text(t / "r.json", R"({"N": 2, "random": {"seed": 3}})");
  REQUIRE(cli({"gen-oracle", "--spec", t / "r.json", "--out", t / "r_out.json"}).code == 0);
  CHECK(read_json_file(t / "r_out.json").at("tasks")[1].at("cubic_gamma") == 0.0);
}

TEST_CASE("map on the bundled example") {
  TempDir t("map");
  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "oracle.json"}).code == 0);
  const auto r = cli({"map", "--config", data("map_config.json"), "--oracle", t / "oracle.json", "--out",
                      t / "run1"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto report = read_json_file(t / "run1/report.json");
  REQUIRE(report.at("r_squared").size() == 2);
  for (const auto& v : report.at("r_squared")) CHECK(v.get<double>() > 0.9);
  for (const char* f : {"records.csv", "surrogate_task_1.json", "surrogate_task_2.json",
                        "front_predicted.json", "front_real.json", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(t.path / "run1" / f), f);
  }
  const auto manifest = read_json_file(t / "run1/manifest.json");
  CHECK(manifest.at("eval_count") == report.at("eval_count"));
  CHECK(manifest.at("seed") == 1);

  REQUIRE(cli({"map", "--config", data("map_config.json"), "--oracle", t / "oracle.json", "--out",
               t / "run2"}).code == 0);
  for (const char* f : {"front_predicted.json", "front_real.json", "report.json", "records.csv"}) {
    CHECK_MESSAGE(slurp(t / (std::string("run1/") + f)) == slurp(t / (std::string("run2/") + f)), f);
  }
  CHECK(read_json_file(t / "run2/manifest.json").at("config_digest") == manifest.at("config_digest"));

  const auto other = cli({"map", "--config", data("map_config.json"), "--oracle", t / "oracle.json",
                          "--seed", "2", "--out", t / "run3"});
  REQUIRE(other.code == 0);
  CHECK(slurp(t / "run1/front_predicted.json") != slurp(t / "run3/front_predicted.json"));

  const auto rep = cli({"report", "--dir", t / "run1"});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("front_real") != std::string::npos);
}

TEST_CASE("budget cap") {
  TempDir t("budget");
  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "oracle.json"}).code == 0);
  const auto r = cli({"map", "--config", data("map_config.json"), "--oracle", t / "oracle.json", "--budget",
                      "10", "--out", t / "run"});
  CHECK(r.code == 3);
  CHECK(error_kind_of(r) == "BudgetExceeded");
}

TEST_CASE("compare fronts") {
  TempDir t("compare");
  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "oracle.json"}).code == 0);
  REQUIRE(cli({"map", "--config", data("map_config.json"), "--oracle", t / "oracle.json", "--out",
               t / "run"}).code == 0);
  auto r = cli({"compare", "--front-a", t / "run/front_real.json", "--front-b", t / "run/front_real.json",
                "--oracle", t / "oracle.json", "--out", t / "self.json"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto self = read_json_file(t / "self.json");
  CHECK(self.at("gd") == 0.0);
  CHECK(self.at("igd") == 0.0);
  for (const char* k : {"win_rate", "gd", "igd", "gd_plus_igd", "K", "p", "seed"}) CHECK(self.contains(k));

  // The oracle is noiseless here, so re-evaluation is exact.
  write_text(t / "clean.json", R"({"N": 2, "random": {"seed": 7, "link": "sigmoid"}})");
  REQUIRE(cli({"gen-oracle", "--spec", t / "clean.json", "--out", t / "clean_oracle.json"}).code == 0);
  const auto land = landscape_from_json(read_json_file(t / "clean_oracle.json"));
  // (0.5, 0.5) should beat the pre-trained point on both tasks; checked below before use.
  const Eigen::Vector2d hi(0.5, 0.5);
  const Eigen::Vector2d lo(0.0, 0.0);
  const auto fh = eval_synthetic(land, hi, 0);
  const auto fl = eval_synthetic(land, lo, 0);
  if ((fh.array() > fl.array()).all()) {
    ParetoFront a;
    a.points.push_back({hi, fh});
    a.directions = {Direction::Maximize, Direction::Maximize};
    ParetoFront b = a;
    b.points[0] = {lo, fl};
    write_json_file(t / "a.json", front_to_json(a));
    write_json_file(t / "b.json", front_to_json(b));
    r = cli({"compare", "--front-a", t / "a.json", "--front-b", t / "b.json", "--oracle",
             t / "clean_oracle.json", "--out", t / "ab.json"});
    REQUIRE(r.code == 0);
    CHECK(read_json_file(t / "ab.json").at("win_rate") == 1.0);
  } else {
    FAIL("landscape ordering assumption broken");
  }
}

TEST_CASE("sample, evaluate and fit chain") {
  TempDir t("chain");
  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "oracle.json"}).code == 0);
  REQUIRE(cli({"sample", "--oracle", t / "oracle.json", "--samples", "25", "--out", t / "c.json"}).code == 0);
  CHECK(read_json_file(t / "c.json").at("coefficients").size() == 25);
  REQUIRE(cli({"evaluate", "--oracle", t / "oracle.json", "--coeffs", t / "c.json", "--out", t / "r.csv"}).code ==
          0);
  const auto fit = cli({"fit", "--records", t / "r.csv", "--links", "sigmoid", "--out", t / "fit"});
  REQUIRE_MESSAGE(fit.code == 0, fit.err);
  CHECK(read_json_file(t / "fit/fit_report.json").at("records") == 25);
  CHECK(fs::exists(t.path / "fit" / "surrogate_task_2.json"));
  const auto m = cli({"map", "--records", t / "r.csv", "--config", data("map_config.json"), "--out", t / "m"});
  REQUIRE_MESSAGE(m.code == 0, m.err);
  // Ingested records cost no oracle calls.
  CHECK(read_json_file(t / "m/report.json").at("eval_count") == 0);
  CHECK(read_json_file(t / "m/report.json").at("records") == 25);
  CHECK(!fs::exists(t.path / "m" / "front_real.json"));
}

TEST_CASE("nested and bayes runs") {
  TempDir t("nested");
  REQUIRE(cli({"gen-oracle", "--spec", data("nested_spec.json"), "--out", t / "oracle4.json"}).code == 0);
  const auto n = cli({"nested", "--config", data("nested_config.json"), "--oracle", t / "oracle4.json", "--out",
                      t / "nested"});
  REQUIRE_MESSAGE(n.code == 0, n.err);
  const auto tree = read_json_file(t / "nested/merge_tree.json");
  CHECK(tree.at("map_evaluations") == 160);
  CHECK(tree.at("steps").size() == 3);
  CHECK(fs::exists(t.path / "nested" / "final_params.json"));
  CHECK(fs::exists(t.path / "nested" / "front_step_1.json"));

  const auto capped = cli({"nested", "--config", data("nested_config.json"), "--oracle", t / "oracle4.json",
                           "--budget", "100", "--out", t / "nested_cap"});
  CHECK(capped.code == 3);

  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "oracle2.json"}).code == 0);
  const auto b = cli({"bayes", "--config", data("bayes_config.json"), "--oracle", t / "oracle2.json", "--out",
                      t / "bayes"});
  REQUIRE_MESSAGE(b.code == 0, b.err);
  CHECK(read_json_file(t / "bayes/bayes_diagnostics.json").at("rounds").size() == 2);
  CHECK(read_json_file(t / "bayes/report.json").at("sample_evaluations") == 20);
}

TEST_CASE("unknown config keys are rejected") {
  TempDir t("keys");
  REQUIRE(cli({"gen-oracle", "--spec", data("oracle_spec.json"), "--out", t / "oracle.json"}).code == 0);
  write_text(t / "cfg.json", R"({"samples": 30, "sample_count": 30})");
  const auto r = cli({"map", "--config", t / "cfg.json", "--oracle", t / "oracle.json", "--out", t / "run"});
  CHECK(r.code == 2);
  CHECK(error_kind_of(r) == "Validation");
}

TEST_CASE("numerical failure exits with 4") {
  TempDir t("numeric");
  write_text(t / "r.csv", "c_1,m_1\n1e160,0.1\n2e160,0.2\n3e160,0.3\n4e160,0.1\n");
  const auto r = cli({"map", "--records", t / "r.csv", "--out", t / "run"});
  CHECK(r.code == 4);
  CHECK(error_kind_of(r) == "SingularDesign");
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"map", "--out", "/tmp/x"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  const auto v = cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(kToolVersion) != std::string::npos);
}

}  // TEST_SUITE
