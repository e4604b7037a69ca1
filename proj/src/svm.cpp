// Copyright 2026 The rollattr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rollattr/svm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "rollattr/error.hpp"
#include "rollattr/random.hpp"

namespace rollattr {

namespace {

struct SparseEntry {
  std::size_t index;
  double value;
};

using SparseRow = std::vector<SparseEntry>;

std::vector<SparseRow> to_sparse(std::span<const FeatureVector> X) {
  std::vector<SparseRow> rows(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = 0; j < X[i].size(); ++j) {
      if (X[i][j] != 0.0) rows[i].push_back({j, X[i][j]});
    }
  }
  return rows;
}

double sparse_dot(const SparseRow& row, std::span<const double> w) {
  double s = 0.0;
  for (const auto& e : row) s += e.value * w[e.index];
  return s;
}

double squared_norm(std::span<const double> w, double bias) {
  double s = bias * bias;
  for (double x : w) s += x * x;
  return s;
}

void check_binary_inputs(std::span<const FeatureVector> X,
                         std::span<const int> y) {
  if (X.size() != y.size()) {
    throw DataError(fmt::format("{} feature rows but {} labels", X.size(),
                                y.size()));
  }
  if (X.empty()) throw DataError("no training examples");
  const auto dim = X.front().size();
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != dim) {
      throw DataError(fmt::format("row {} has dimension {}, expected {}", i,
                                  X[i].size(), dim));
    }
    if (y[i] == 1) {
      pos = true;
    } else if (y[i] == -1) {
      neg = true;
    } else {
      throw DataError(fmt::format("label {} at row {} is not -1 or +1", y[i],
                                  i));
    }
  }
  if (!pos || !neg) {
    throw DataError("binary SVM needs at least one example of each label");
  }
}

}  // namespace

LinearModel train_binary_svm(std::span<const FeatureVector> X,
                             std::span<const int> y, const SvmOptions& opts,
                             SolverTrace* trace) {
  check_binary_inputs(X, y);
  if (!(opts.C > 0.0) || !(opts.tol > 0.0)) {
    throw ConstraintError("SVM C and tol must be positive");
  }
  const auto n = X.size();
  const auto dim = X.front().size();
  const auto rows = to_sparse(X);
  const double C = opts.C;

  // Diagonal of Q for the bias-augmented rows.
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    qd[i] = 1.0;
    for (const auto& e : rows[i]) qd[i] += e.value * e.value;
  }

  LinearModel m;
  m.weights.assign(dim, 0.0);
  m.C = C;
  m.converged = false;
  std::vector<double> alpha(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(opts.seed);

  double violation = 0.0;
  std::size_t pass = 0;
  while (pass < opts.max_passes) {
    ++pass;
    rng.shuffle(order);
    violation = 0.0;
    for (const auto i : order) {
      const double yi = y[i];
      const double g = yi * (sparse_dot(rows[i], m.weights) + m.bias) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= C) {
        pg = std::max(g, 0.0);
      }
      violation = std::max(violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qd[i], 0.0, C);
      const double delta = (alpha[i] - old) * yi;
      if (delta == 0.0) continue;
      for (const auto& e : rows[i]) m.weights[e.index] += delta * e.value;
      m.bias += delta;
    }
    if (trace) {
      trace->dual_objective.push_back(
          0.5 * squared_norm(m.weights, m.bias) -
          std::accumulate(alpha.begin(), alpha.end(), 0.0));
      trace->primal_objective.push_back(primal_objective(m, X, y));
    }
    if (violation < opts.tol) {
      // Updates made during the pass may have moved other coordinates;
      // confirm optimality against the final w before stopping.
      violation = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double g =
            y[i] * (sparse_dot(rows[i], m.weights) + m.bias) - 1.0;
        double pg = g;
        if (alpha[i] <= 0.0) {
          pg = std::min(g, 0.0);
        } else if (alpha[i] >= C) {
          pg = std::max(g, 0.0);
        }
        violation = std::max(violation, std::abs(pg));
      }
      if (violation < opts.tol) {
        m.converged = true;
        break;
      }
    }
  }
  m.passes = pass;
  if (trace) {
    trace->alpha = alpha;
    trace->final_violation = violation;
  }
  return m;
}

double decision_value(const LinearModel& m, std::span<const double> x) {
  if (x.size() != m.weights.size()) {
    throw DataError(fmt::format("feature dimension {} does not match model "
                                "dimension {}",
                                x.size(), m.weights.size()));
  }
  double s = m.bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += m.weights[j] * x[j];
  return s;
}

double primal_objective(const LinearModel& m, std::span<const FeatureVector> X,
                        std::span<const int> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    loss += std::max(0.0, 1.0 - y[i] * decision_value(m, X[i]));
  }
  return 0.5 * squared_norm(m.weights, m.bias) + m.C * loss;
}

double platt_probability(const PlattParams& p, double f) noexcept {
  const double z = p.A * f + p.B;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

namespace {

struct PlattTargets {
  double hi;
  double lo;
};

PlattTargets platt_targets(std::span<const int> y) {
  double pos = 0.0;
  double neg = 0.0;
  for (int label : y) (label > 0 ? pos : neg) += 1.0;
  return {(pos + 1.0) / (pos + 2.0), 1.0 / (neg + 2.0)};
}

double platt_objective_with(const PlattParams& p, std::span<const double> f,
                            std::span<const int> y, PlattTargets t) {
  double v = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double target = y[i] > 0 ? t.hi : t.lo;
    const double z = p.A * f[i] + p.B;
    if (z >= 0.0) {
      v += target * z + std::log1p(std::exp(-z));
    } else {
      v += (target - 1.0) * z + std::log1p(std::exp(z));
    }
  }
  return v;
}

}  // namespace

double platt_objective(const PlattParams& p, std::span<const double> f,
                       std::span<const int> y) {
  return platt_objective_with(p, f, y, platt_targets(y));
}

PlattParams fit_platt(std::span<const double> f, std::span<const int> y,
                      const PlattOptions& opts) {
  if (f.size() != y.size()) {
    throw DataError(fmt::format("{} decision values but {} labels", f.size(),
                                y.size()));
  }
  double pos = 0.0;
  double neg = 0.0;
  for (int label : y) (label > 0 ? pos : neg) += 1.0;
  if (pos == 0.0 || neg == 0.0) {
    throw DataError("Platt scaling needs both labels");
  }
  const PlattTargets targets = platt_targets(y);

  PlattParams p{0.0, std::log((neg + 1.0) / (pos + 1.0))};
  double fval = platt_objective_with(p, f, y, targets);

  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    double h11 = opts.sigma;
    double h22 = opts.sigma;
    double h21 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double prob = platt_probability(p, f[i]);
      const double d2 = prob * (1.0 - prob);
      h11 += f[i] * f[i] * d2;
      h22 += d2;
      h21 += f[i] * d2;
      const double d1 = (y[i] > 0 ? targets.hi : targets.lo) - prob;
      g1 += f[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < opts.tol && std::abs(g2) < opts.tol) return p;

    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;

    double step = 1.0;
    while (step >= opts.min_step) {
      const PlattParams trial{p.A + step * dA, p.B + step * dB};
      const double trial_val = platt_objective_with(trial, f, y, targets);
      if (trial_val < fval + 1e-4 * step * gd) {
        p = trial;
        fval = trial_val;
        break;
      }
      step /= 2.0;
    }
    // No descent possible along the Newton direction: the iterate is already
    // optimal to working precision.
    if (step < opts.min_step) return p;
  }
  throw PlattConvergenceError(
      fmt::format("Platt scaling did not converge in {} iterations",
                  opts.max_iter),
      p);
}

bool CalibratedModel::converged() const noexcept {
  return std::all_of(models.begin(), models.end(),
                     [](const LinearModel& m) { return m.converged; });
}

namespace {

std::vector<int> one_vs_rest(std::span<const AuthorId> y, const AuthorId& cls,
                             std::span<const std::size_t> subset) {
  std::vector<int> out;
  out.reserve(subset.size());
  for (auto i : subset) out.push_back(y[i] == cls ? 1 : -1);
  return out;
}

}  // namespace

CalibratedModel train_multiclass(std::span<const FeatureVector> X,
                                 std::span<const AuthorId> y,
                                 const SvmOptions& opts) {
  if (X.size() != y.size()) {
    throw DataError(fmt::format("{} feature rows but {} labels", X.size(),
                                y.size()));
  }
  std::map<AuthorId, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  if (by_class.size() < 2) {
    throw DataError("multiclass training needs at least two classes");
  }
  for (const auto& [cls, idx] : by_class) {
    if (idx.size() < 2) {
      throw DataError(fmt::format("class '{}' has {} example(s); at least 2 "
                                  "are required",
                                  cls, idx.size()));
    }
  }

  // Stratified folds: each class's members are shuffled and dealt round-robin,
  // so any class with >= 2 members appears in every training split.
  std::vector<std::size_t> fold(y.size());
  {
    Rng rng(splitmix64(opts.seed ^ 0x5f0d5f0d5f0d5f0dULL));
    std::size_t offset = 0;
    for (auto& [cls, idx] : by_class) {
      auto shuffled = idx;
      rng.shuffle(shuffled);
      for (std::size_t r = 0; r < shuffled.size(); ++r) {
        fold[shuffled[r]] = (r + offset) % kCalibrationFolds;
      }
      offset += shuffled.size();
    }
  }

  CalibratedModel out;
  for (const auto& [cls, idx] : by_class) out.classes.push_back(cls);
  const std::size_t n_models = out.classes.size() == 2 ? 1 : out.classes.size();

  std::vector<std::size_t> all(y.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  for (std::size_t k = 0; k < n_models; ++k) {
    const auto& cls = out.classes[k];
    std::vector<double> oof(y.size(), 0.0);
    for (std::size_t f = 0; f < kCalibrationFolds; ++f) {
      std::vector<std::size_t> train_idx;
      std::vector<std::size_t> held_idx;
      for (auto i : all) (fold[i] == f ? held_idx : train_idx).push_back(i);
      if (held_idx.empty()) continue;
      std::vector<FeatureVector> Xf;
      Xf.reserve(train_idx.size());
      for (auto i : train_idx) Xf.push_back(X[i]);
      // Rescale C so that C * (training size) matches the final model; with
      // many bounded duals the decision scale grows with that product, and
      // the calibration must see the scale the final model will produce.
      SvmOptions fo = opts;
      fo.C = opts.C * static_cast<double>(y.size()) /
             static_cast<double>(train_idx.size());
      fo.seed = splitmix64(opts.seed + 1000 * (k + 1) + f + 1);
      const auto m = train_binary_svm(Xf, one_vs_rest(y, cls, train_idx), fo);
      for (auto i : held_idx) oof[i] = decision_value(m, X[i]);
    }
    out.platt.push_back(fit_platt(oof, one_vs_rest(y, cls, all)));

    SvmOptions full = opts;
    full.seed = splitmix64(opts.seed + 1000 * (k + 1));
    out.models.push_back(
        train_binary_svm(X, one_vs_rest(y, cls, all), full));
  }
  return out;
}

std::vector<double> predict_proba(const CalibratedModel& m,
                                  std::span<const double> x) {
  if (m.binary()) {
    const double p = platt_probability(m.platt[0], decision_value(m.models[0], x));
    return {p, 1.0 - p};
  }
  std::vector<double> p(m.classes.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = platt_probability(m.platt[k], decision_value(m.models[k], x));
    sum += p[k];
  }
  if (!(sum > 0.0)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::size_t argmax(std::span<const double> p) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

}  // namespace rollattr
