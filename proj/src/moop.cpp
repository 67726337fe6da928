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

#include "mapfront/moop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

#include "mapfront/errors.hpp"
#include "mapfront/random.hpp"

namespace mapfront {

std::string to_string(Direction d) { return d == Direction::Minimize ? "minimize" : "maximize"; }

Direction parse_direction(const std::string& s) {
  if (s == "minimize" || s == "min") return Direction::Minimize;
  if (s == "maximize" || s == "max") return Direction::Maximize;
  fail(ErrorKind::Validation, "unknown direction '" + s + "'");
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Amortized:
      return "amortized";
    case Provenance::Grid:
      return "grid";
    case Provenance::Moead:
      return "moead";
    case Provenance::Ingested:
      return "ingested";
    case Provenance::RandomSearch:
      return "random_search";
  }
  return "amortized";
}

Provenance parse_provenance(const std::string& s) {
  for (auto p : {Provenance::Amortized, Provenance::Grid, Provenance::Moead, Provenance::Ingested,
                 Provenance::RandomSearch}) {
    if (to_string(p) == s) return p;
  }
  fail(ErrorKind::Validation, "unknown provenance '" + s + "'");
}

Box Box::unit(Eigen::Index n) { return uniform(n, 0.0, 1.0); }

Box Box::uniform(Eigen::Index n, double lo, double hi) {
  Box b{Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
  b.validate();
  return b;
}

bool Box::contains(const Coeffs& c) const {
  if (c.size() != lower.size()) return false;
  return (c.array() >= lower.array()).all() && (c.array() <= upper.array()).all();
}

void Box::validate() const {
  require(lower.size() == upper.size() && lower.size() >= 1, ErrorKind::Validation,
          "box bounds must have equal, nonzero length");
  require(lower.allFinite() && upper.allFinite(), ErrorKind::Validation,
          "box bounds must be finite");
  require((lower.array() < upper.array()).all(), ErrorKind::Validation,
          "box needs lower < upper in every coordinate");
}

std::size_t ObjectiveSpec::objective_count() const {
  return weights.size() == 0 ? surrogates.size() : static_cast<std::size_t>(weights.rows());
}

void ObjectiveSpec::validate() const {
  box.validate();
  require(!surrogates.empty(), ErrorKind::Validation, "objective spec has no surrogates");
  for (const auto& s : surrogates) {
    require(static_cast<Eigen::Index>(s.task_dimension()) == box.dimension(),
            ErrorKind::LengthMismatch, "surrogate dimension differs from the decision box");
  }
  if (weights.size() != 0) {
    require(static_cast<std::size_t>(weights.cols()) == surrogates.size(),
            ErrorKind::LengthMismatch, "objective weights need one column per surrogate");
  }
  require(directions.size() == objective_count(), ErrorKind::LengthMismatch,
          "one direction per objective required");
}

Eigen::VectorXd ObjectiveSpec::evaluate(const Coeffs& c) const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(surrogates.size()));
  for (std::size_t n = 0; n < surrogates.size(); ++n) {
    s[static_cast<Eigen::Index>(n)] = surrogates[n].predict(c);
  }
  if (weights.size() == 0) return s;
  return weights * s;
}

Eigen::VectorXd to_minimization(const Eigen::VectorXd& f,
                                const std::vector<Direction>& directions) {
  require(static_cast<std::size_t>(f.size()) == directions.size(), ErrorKind::LengthMismatch,
          "objective vector and directions differ in length");
  Eigen::VectorXd out = f;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i] == Direction::Maximize) out[static_cast<Eigen::Index>(i)] = -out[static_cast<Eigen::Index>(i)];
  }
  return out;
}

namespace {

// Dominance on already minimization-normalized vectors.
bool dominates_min(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  bool strict = false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > y[i]) return false;
    if (x[i] < y[i]) strict = true;
  }
  return strict;
}

}  // namespace

bool dominates(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               const std::vector<Direction>& directions) {
  require(x.size() == y.size(), ErrorKind::LengthMismatch, "objective vectors differ in length");
  return dominates_min(to_minimization(x, directions), to_minimization(y, directions));
}

ParetoFront non_dominated_filter(const std::vector<FrontPoint>& points,
                                 const std::vector<Direction>& directions,
                                 Provenance provenance) {
  require(!points.empty(), ErrorKind::EmptyInput, "no points to filter");
  std::vector<Eigen::VectorXd> f;
  std::vector<std::size_t> candidates;
  f.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    f.push_back(to_minimization(points[i].f, directions));
    bool duplicate = false;
    for (std::size_t j : candidates) {
      if (points[j].c.size() == points[i].c.size() && points[j].c == points[i].c) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) candidates.push_back(i);
  }
  // Any dominator precedes its victim lexicographically, so checking each
  // point against the survivors seen so far is exact.
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(f[a].data(), f[a].data() + f[a].size(), f[b].data(),
                                        f[b].data() + f[b].size());
  });
  std::vector<std::size_t> kept;
  for (std::size_t i : candidates) {
    bool dominated = false;
    for (std::size_t k : kept) {
      if (dominates_min(f[k], f[i])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  ParetoFront front;
  front.provenance = provenance;
  front.directions = directions;
  for (std::size_t i : kept) front.points.push_back(points[i]);
  return front;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<Eigen::VectorXd>& f) {
  const std::size_t n = f.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates_min(f[p], f[q])) {
        dominated_by_me[p].push_back(q);
        ++domination_count[q];
      } else if (dominates_min(f[q], f[p])) {
        dominated_by_me[q].push_back(p);
        ++domination_count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (domination_count[p] == 0) fronts[0].push_back(p);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts.back()) {
      for (std::size_t q : dominated_by_me[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

std::vector<Eigen::VectorXd> das_dennis(std::size_t n_objectives, std::size_t partitions) {
  require(n_objectives >= 1, ErrorKind::Validation, "need at least one objective");
  const auto m = static_cast<Eigen::Index>(n_objectives);
  if (n_objectives == 1) return {Eigen::VectorXd::Ones(1)};
  require(partitions >= 1, ErrorKind::Validation, "need at least one partition");
  std::vector<Eigen::VectorXd> out;
  std::vector<std::size_t> counts(n_objectives, 0);
  // Enumerate compositions of `partitions` into n_objectives parts.
  auto recurse = [&](auto&& self, std::size_t axis, std::size_t left) -> void {
    if (axis + 1 == n_objectives) {
      counts[axis] = left;
      Eigen::VectorXd w(m);
      for (std::size_t i = 0; i < n_objectives; ++i) {
        w[static_cast<Eigen::Index>(i)] =
            static_cast<double>(counts[i]) / static_cast<double>(partitions);
      }
      out.push_back(std::move(w));
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      counts[axis] = k;
      self(self, axis + 1, left - k);
    }
  };
  recurse(recurse, 0, partitions);
  return out;
}

std::size_t default_partitions(std::size_t n_objectives) {
  switch (n_objectives) {
    case 1:
      return 1;
    case 2:
      return 99;
    case 3:
      return 12;
    case 4:
      return 7;
    case 5:
      return 5;
    case 6:
      return 4;
    case 7:
    case 8:
      return 3;
    default:
      return 2;
  }
}

namespace {

Eigen::VectorXd random_point(const Box& box, Rng& rng) {
  Eigen::VectorXd x(box.dimension());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
  return x;
}

// Simulated binary crossover, bounded form.
void sbx(Eigen::VectorXd& a, Eigen::VectorXd& b, const Box& box, double eta, Rng& rng) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (rng.uniform() > 0.5) continue;
    if (std::abs(a[i] - b[i]) <= 1e-14) continue;
    const double y1 = std::min(a[i], b[i]);
    const double y2 = std::max(a[i], b[i]);
    const double yl = box.lower[i];
    const double yu = box.upper[i];
    const double r = rng.uniform();
    const double exponent = 1.0 / (eta + 1.0);

    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      return r <= 1.0 / alpha ? std::pow(r * alpha, exponent)
                              : std::pow(1.0 / (2.0 - r * alpha), exponent);
    };
    const double bq1 = spread(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
    const double bq2 = spread(1.0 + 2.0 * (yu - y2) / (y2 - y1));
    double c1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), yl, yu);
    double c2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), yl, yu);
    if (rng.uniform() <= 0.5) std::swap(c1, c2);
    a[i] = c1;
    b[i] = c2;
  }
}

void polynomial_mutation(Eigen::VectorXd& x, const Box& box, double eta, double rate, Rng& rng) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (rng.uniform() >= rate) continue;
    const double yl = box.lower[i];
    const double yu = box.upper[i];
    const double span = yu - yl;
    const double d1 = (x[i] - yl) / span;
    const double d2 = (yu - x[i]) / span;
    const double r = rng.uniform();
    const double power = 1.0 / (eta + 1.0);
    double dq = 0.0;
    if (r < 0.5) {
      const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(v, power) - 1.0;
    } else {
      const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(v, power);
    }
    x[i] = std::clamp(x[i] + dq * span, yl, yu);
  }
}

std::vector<FrontPoint> to_points(const std::vector<Eigen::VectorXd>& x,
                                  const std::vector<Eigen::VectorXd>& f) {
  std::vector<FrontPoint> pts;
  pts.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], f[i]});
  return pts;
}

// Hyperplane intercepts from the extreme points of the translated
// objectives, falling back to the per-axis maxima when degenerate.
Eigen::VectorXd intercepts(const std::vector<Eigen::VectorXd>& translated,
                           const std::vector<std::size_t>& members) {
  const Eigen::Index m = translated[members.front()].size();
  Eigen::MatrixXd extremes(m, m);
  for (Eigen::Index axis = 0; axis < m; ++axis) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = members.front();
    for (std::size_t s : members) {
      double asf = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        asf = std::max(asf, translated[s][i] / (i == axis ? 1.0 : 1e-6));
      }
      if (asf < best) {
        best = asf;
        arg = s;
      }
    }
    extremes.row(axis) = translated[arg].transpose();
  }
  Eigen::VectorXd maxima = Eigen::VectorXd::Zero(m);
  for (std::size_t s : members) maxima = maxima.cwiseMax(translated[s]);

  Eigen::VectorXd a(m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(extremes);
  bool ok = lu.isInvertible();
  if (ok) {
    const Eigen::VectorXd plane = lu.solve(Eigen::VectorXd::Ones(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      a[i] = 1.0 / plane[i];
      if (!std::isfinite(a[i]) || a[i] <= 1e-6) ok = false;
    }
  }
  if (!ok) a = maxima;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(a[i] > 1e-10)) a[i] = 1.0;
  }
  return a;
}

}  // namespace

ParetoFront nsga3_front(const ObjectiveSpec& spec, const Nsga3Params& params) {
  spec.validate();
  const std::size_t n_obj = spec.objective_count();
  const std::size_t partitions =
      params.partitions == 0 ? default_partitions(n_obj) : params.partitions;
  const std::vector<Eigen::VectorXd> refs = das_dennis(n_obj, partitions);
  std::size_t pop_size = params.population;
  if (pop_size == 0) {
    pop_size = std::max<std::size_t>(refs.size(), 20);
    pop_size = (pop_size + 3) / 4 * 4;
  }
  require(pop_size >= refs.size(), ErrorKind::Validation,
          "population " + std::to_string(pop_size) + " is smaller than the " +
              std::to_string(refs.size()) + " reference directions");
  require(pop_size >= 2, ErrorKind::Validation, "population must be at least 2");
  const Box& box = spec.box;
  const double mutation_rate = params.mutation_rate < 0.0
                                   ? 1.0 / static_cast<double>(box.dimension())
                                   : params.mutation_rate;
  Rng rng(params.seed);
  std::size_t evaluations = 0;
  auto objective = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    return to_minimization(spec.evaluate(x), spec.directions);
  };

  std::vector<Eigen::VectorXd> refs_unit;
  for (const auto& r : refs) refs_unit.push_back(r / r.norm());

  std::vector<Eigen::VectorXd> pop_x;
  std::vector<Eigen::VectorXd> pop_f;
  for (std::size_t i = 0; i < pop_size; ++i) {
    pop_x.push_back(random_point(box, rng));
    pop_f.push_back(objective(pop_x.back()));
  }

  for (std::size_t gen = 0; gen < params.generations; ++gen) {
    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<Eigen::VectorXd> all_x = pop_x;
    std::vector<Eigen::VectorXd> all_f = pop_f;
    for (std::size_t k = 0; k < pop_size; k += 2) {
      Eigen::VectorXd a = pop_x[order[k]];
      Eigen::VectorXd b = pop_x[order[(k + 1) % pop_size]];
      if (rng.uniform() < params.crossover_rate) sbx(a, b, box, params.crossover_eta, rng);
      polynomial_mutation(a, box, params.mutation_eta, mutation_rate, rng);
      polynomial_mutation(b, box, params.mutation_eta, mutation_rate, rng);
      all_x.push_back(a);
      all_f.push_back(objective(a));
      if (k + 1 < pop_size) {
        all_x.push_back(b);
        all_f.push_back(objective(b));
      }
    }

    const auto layers = non_dominated_sort(all_f);
    std::vector<std::size_t> chosen;
    std::size_t last = 0;
    for (; last < layers.size(); ++last) {
      if (chosen.size() + layers[last].size() > pop_size) break;
      chosen.insert(chosen.end(), layers[last].begin(), layers[last].end());
    }
    if (chosen.size() < pop_size) {
      std::vector<std::size_t> members = chosen;
      members.insert(members.end(), layers[last].begin(), layers[last].end());

      Eigen::VectorXd ideal = all_f[members.front()];
      for (std::size_t s : members) ideal = ideal.cwiseMin(all_f[s]);
      std::vector<Eigen::VectorXd> translated(all_f.size());
      for (std::size_t s : members) translated[s] = all_f[s] - ideal;
      const Eigen::VectorXd scale = intercepts(translated, members);

      std::vector<std::size_t> niche(all_f.size(), 0);
      std::vector<double> distance(all_f.size(), 0.0);
      for (std::size_t s : members) {
        const Eigen::VectorXd fn = translated[s].cwiseQuotient(scale);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < refs_unit.size(); ++r) {
          const double d = (fn - fn.dot(refs_unit[r]) * refs_unit[r]).norm();
          if (d < best) {
            best = d;
            niche[s] = r;
          }
        }
        distance[s] = best;
      }
      std::vector<std::size_t> rho(refs.size(), 0);
      for (std::size_t s : chosen) ++rho[niche[s]];

      std::vector<std::size_t> pending = layers[last];
      std::vector<bool> excluded(refs.size(), false);
      while (chosen.size() < pop_size) {
        std::size_t min_rho = std::numeric_limits<std::size_t>::max();
        for (std::size_t r = 0; r < refs.size(); ++r) {
          if (!excluded[r]) min_rho = std::min(min_rho, rho[r]);
        }
        std::vector<std::size_t> candidates;
        for (std::size_t r = 0; r < refs.size(); ++r) {
          if (!excluded[r] && rho[r] == min_rho) candidates.push_back(r);
        }
        const std::size_t j = candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
        std::vector<std::size_t> attached;
        for (std::size_t idx = 0; idx < pending.size(); ++idx) {
          if (niche[pending[idx]] == j) attached.push_back(idx);
        }
        if (attached.empty()) {
          excluded[j] = true;
          continue;
        }
        std::size_t pick = attached.front();
        if (rho[j] == 0) {
          for (std::size_t idx : attached) {
            if (distance[pending[idx]] < distance[pending[pick]]) pick = idx;
          }
        } else {
          pick = attached[static_cast<std::size_t>(rng.below(attached.size()))];
        }
        chosen.push_back(pending[pick]);
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
        ++rho[j];
      }
    }
    std::vector<Eigen::VectorXd> next_x;
    std::vector<Eigen::VectorXd> next_f;
    for (std::size_t s : chosen) {
      next_x.push_back(std::move(all_x[s]));
      next_f.push_back(std::move(all_f[s]));
    }
    pop_x = std::move(next_x);
    pop_f = std::move(next_f);
  }

  std::vector<Eigen::VectorXd> f_out;
  for (const auto& x : pop_x) f_out.push_back(spec.evaluate(x));
  ParetoFront front = non_dominated_filter(to_points(pop_x, f_out), spec.directions,
                                           Provenance::Amortized);
  front.evaluations = evaluations;
  return front;
}

namespace {

std::vector<Eigen::VectorXd> decomposition_weights(std::size_t n_obj, std::size_t count) {
  std::vector<Eigen::VectorXd> w;
  if (n_obj == 1) {
    w.assign(count, Eigen::VectorXd::Ones(1));
  } else if (n_obj == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
      Eigen::VectorXd v(2);
      v << t, 1.0 - t;
      w.push_back(v);
    }
  } else {
    std::size_t p = 1;
    while (das_dennis(n_obj, p).size() < count) ++p;
    w = das_dennis(n_obj, p);
    w.resize(count);
  }
  return w;
}

double tchebycheff(const Eigen::VectorXd& f, const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
  double g = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    g = std::max(g, std::max(w[i], 1e-6) * std::abs(f[i] - z[i]));
  }
  return g;
}

void archive_insert(std::vector<FrontPoint>& archive, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& f_min) {
  for (const auto& a : archive) {
    if (dominates_min(a.f, f_min) || (a.c == x)) return;
  }
  std::erase_if(archive, [&](const FrontPoint& a) { return dominates_min(f_min, a.f); });
  archive.push_back({x, f_min});
}

}  // namespace

ParetoFront moead_front(const ObjectiveSpec& spec, const MoeadParams& params) {
  spec.validate();
  require(params.population >= 1, ErrorKind::Validation, "population must be at least 1");
  require(params.neighborhood >= 1, ErrorKind::Validation, "neighborhood must be at least 1");
  const std::size_t n_obj = spec.objective_count();
  const std::size_t pop = params.population;
  const Box& box = spec.box;
  const double mutation_rate = params.mutation_rate < 0.0
                                   ? 1.0 / static_cast<double>(box.dimension())
                                   : params.mutation_rate;
  const auto weights = decomposition_weights(n_obj, pop);
  const std::size_t t = std::min(params.neighborhood, pop);
  std::vector<std::vector<std::size_t>> neighbors(pop);
  for (std::size_t i = 0; i < pop; ++i) {
    std::vector<std::size_t> idx(pop);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return (weights[a] - weights[i]).squaredNorm() < (weights[b] - weights[i]).squaredNorm();
    });
    idx.resize(t);
    neighbors[i] = std::move(idx);
  }

  Rng rng(params.seed);
  std::size_t evaluations = 0;
  auto objective = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    return to_minimization(spec.evaluate(x), spec.directions);
  };
  std::vector<Eigen::VectorXd> x(pop);
  std::vector<Eigen::VectorXd> f(pop);
  std::vector<FrontPoint> archive;
  for (std::size_t i = 0; i < pop; ++i) {
    x[i] = random_point(box, rng);
    f[i] = objective(x[i]);
  }
  Eigen::VectorXd z = f.front();
  for (std::size_t i = 0; i < pop; ++i) {
    z = z.cwiseMin(f[i]);
    archive_insert(archive, x[i], f[i]);
  }

  for (std::size_t gen = 0; gen < params.generations; ++gen) {
    for (std::size_t i = 0; i < pop; ++i) {
      const auto& hood = neighbors[i];
      const std::size_t k = hood[static_cast<std::size_t>(rng.below(hood.size()))];
      std::size_t l = hood[static_cast<std::size_t>(rng.below(hood.size()))];
      if (hood.size() > 1) {
        while (l == k) l = hood[static_cast<std::size_t>(rng.below(hood.size()))];
      }
      Eigen::VectorXd child = x[k];
      Eigen::VectorXd other = x[l];
      sbx(child, other, box, params.crossover_eta, rng);
      polynomial_mutation(child, box, params.mutation_eta, mutation_rate, rng);
      const Eigen::VectorXd fc = objective(child);
      z = z.cwiseMin(fc);
      for (std::size_t j : hood) {
        if (tchebycheff(fc, weights[j], z) <= tchebycheff(f[j], weights[j], z)) {
          x[j] = child;
          f[j] = fc;
        }
      }
      archive_insert(archive, child, fc);
    }
  }

  // Archive entries hold minimization-normalized values; report raw ones.
  std::vector<FrontPoint> pts;
  for (const auto& a : archive) pts.push_back({a.c, spec.evaluate(a.c)});
  ParetoFront front = non_dominated_filter(pts, spec.directions, Provenance::Moead);
  front.evaluations = evaluations;
  return front;
}

ParetoFront grid_search_front(Oracle& oracle, const Box& box, std::size_t points_per_dim,
                              const std::vector<Direction>& directions) {
  box.validate();
  require(points_per_dim >= 2, ErrorKind::Validation, "grid needs at least 2 points per dimension");
  require(box.dimension() == oracle.dimension(), ErrorKind::LengthMismatch,
          "grid box dimension differs from the oracle");
  const auto n = static_cast<std::size_t>(box.dimension());
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    require(total <= std::numeric_limits<std::size_t>::max() / points_per_dim,
            ErrorKind::BudgetExceeded, "grid size overflows");
    total *= points_per_dim;
  }
  oracle.ensure_budget(total);
  const std::size_t before = oracle.eval_count();
  std::vector<FrontPoint> pts;
  pts.reserve(total);
  std::vector<std::size_t> index(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Coeffs c(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = static_cast<Eigen::Index>(i);
      const double t = static_cast<double>(index[i]) / static_cast<double>(points_per_dim - 1);
      c[d] = index[i] + 1 == points_per_dim ? box.upper[d]
                                            : box.lower[d] + t * (box.upper[d] - box.lower[d]);
    }
    pts.push_back({c, oracle.evaluate(c)});
    for (std::size_t i = n; i-- > 0;) {
      if (++index[i] < points_per_dim) break;
      index[i] = 0;
    }
  }
  ParetoFront front = non_dominated_filter(pts, directions, Provenance::Grid);
  front.evaluations = oracle.eval_count() - before;
  return front;
}

ParetoFront random_search_front(Oracle& oracle, const Box& box, std::size_t n_points,
                                const std::vector<Direction>& directions, std::uint64_t seed) {
  box.validate();
  require(n_points >= 1, ErrorKind::Validation, "random search needs at least one point");
  oracle.ensure_budget(n_points);
  Rng rng(seed);
  std::vector<FrontPoint> pts;
  for (std::size_t k = 0; k < n_points; ++k) {
    Coeffs c = random_point(box, rng);
    pts.push_back({c, oracle.evaluate(c)});
  }
  ParetoFront front = non_dominated_filter(pts, directions, Provenance::RandomSearch);
  front.evaluations = n_points;
  return front;
}

}  // namespace mapfront
