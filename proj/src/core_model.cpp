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

#include "mapfront/core_model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mapfront/errors.hpp"

namespace mapfront {

namespace {

constexpr char kBinaryMagic[8] = {'M', 'A', 'P', 'F', 'P', 'V', '0', '1'};

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  require(m.allFinite(), ErrorKind::Validation, std::string(what) + " contains non-finite values");
}

std::uint64_t to_little_endian(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return r;
  }
  return x;
}

}  // namespace

ParameterVector::ParameterVector(std::initializer_list<double> v)
    : values(static_cast<Eigen::Index>(v.size())) {
  Eigen::Index i = 0;
  for (double x : v) values[i++] = x;
}

TaskMatrix::TaskMatrix(Eigen::MatrixXd columns) : columns_(std::move(columns)) {
  require(columns_.cols() >= 1, ErrorKind::Validation, "task matrix needs at least one column");
  require_finite(columns_, "task matrix");
}

TaskMatrix compute_task_vectors(const ParameterVector& pretrained,
                                const std::vector<ParameterVector>& finetuned) {
  require(!finetuned.empty(), ErrorKind::Validation, "no fine-tuned models given");
  require_finite(pretrained.values, "pretrained parameters");
  Eigen::MatrixXd cols(pretrained.size(), static_cast<Eigen::Index>(finetuned.size()));
  for (std::size_t n = 0; n < finetuned.size(); ++n) {
    require(finetuned[n].size() == pretrained.size(), ErrorKind::LengthMismatch,
            "fine-tuned model " + std::to_string(n) + " has length " +
                std::to_string(finetuned[n].size()) + ", expected " +
                std::to_string(pretrained.size()));
    cols.col(static_cast<Eigen::Index>(n)) = finetuned[n].values - pretrained.values;
  }
  return TaskMatrix(std::move(cols));
}

ParameterVector merge_model(const ParameterVector& pretrained, const TaskMatrix& tasks,
                            const Coeffs& c) {
  require(tasks.dimension() == pretrained.size(), ErrorKind::LengthMismatch,
          "task vectors and pretrained parameters differ in length");
  require(c.size() == tasks.task_count(), ErrorKind::LengthMismatch,
          "expected " + std::to_string(tasks.task_count()) + " scaling coefficients, got " +
              std::to_string(c.size()));
  require(c.allFinite(), ErrorKind::Validation, "scaling coefficients must be finite");
  // Column-by-column accumulation keeps c_n = 0 terms exact no-ops.
  Eigen::VectorXd merged = pretrained.values;
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    if (c[n] != 0.0) merged += c[n] * tasks.columns().col(n);
  }
  return ParameterVector(std::move(merged));
}

std::vector<double> norm_ratio(const ParameterVector& pretrained, const TaskMatrix& tasks) {
  require(tasks.dimension() == pretrained.size(), ErrorKind::LengthMismatch,
          "task vectors and pretrained parameters differ in length");
  const double base = pretrained.values.lpNorm<1>();
  require(base > 0.0, ErrorKind::DegeneratePretrained, "pretrained parameters have zero L1 norm");
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(tasks.task_count()));
  for (Eigen::Index n = 0; n < tasks.task_count(); ++n) {
    ratios.push_back(tasks.columns().col(n).lpNorm<1>() / base);
  }
  return ratios;
}

ParameterVector load_parameter_vector(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  if (path.extension() == ".bin") {
    char magic[8];
    std::uint64_t n = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    require(in && std::memcmp(magic, kBinaryMagic, 8) == 0, ErrorKind::ParseError,
            path.string() + ": not a parameter vector file");
    n = to_little_endian(n);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t bits = 0;
      in.read(reinterpret_cast<char*>(&bits), 8);
      require(static_cast<bool>(in), ErrorKind::ParseError, path.string() + ": truncated");
      v[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(to_little_endian(bits));
    }
    require_finite(v, path.string().c_str());
    return ParameterVector(std::move(v));
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  const nlohmann::json& arr = j.is_object() ? j.at("values") : j;
  require(arr.is_array(), ErrorKind::ParseError, path.string() + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    require(arr[i].is_number(), ErrorKind::ParseError, path.string() + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  require_finite(v, path.string().c_str());
  return ParameterVector(std::move(v));
}

void save_parameter_vector(const ParameterVector& v, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  if (path.extension() == ".bin") {
    out.write(kBinaryMagic, 8);
    const std::uint64_t n = to_little_endian(static_cast<std::uint64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(&n), 8);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v.values[i]));
      out.write(reinterpret_cast<const char*>(&bits), 8);
    }
  } else {
    nlohmann::json j = nlohmann::json::object();
    j["values"] = std::vector<double>(v.values.data(), v.values.data() + v.size());
    out << j.dump() << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace mapfront
