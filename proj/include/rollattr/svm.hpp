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

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rollattr/corpus.hpp"
#include "rollattr/features.hpp"

namespace rollattr {

struct SvmOptions {
  double C = 1.0;
  double tol = 1e-4;               // max |projected gradient| at stop
  std::size_t max_passes = 10000;  // outer passes over the data
  std::uint64_t seed = 0;          // coordinate order shuffle
};

// w.x + b. The bias is learned as the weight of a constant feature 1, so it
// is regularized together with w.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double C = 1.0;
  bool converged = true;
  std::size_t passes = 0;
};

// Optional diagnostics from the dual solver.
struct SolverTrace {
  std::vector<double> alpha;
  std::vector<double> dual_objective;    // after each pass
  std::vector<double> primal_objective;  // after each pass
  double final_violation = 0.0;
};

// L1-loss linear SVM by dual coordinate descent (no shrinking). Labels are
// -1/+1; at least one of each. Returns converged=false when the pass cap is
// hit. Throws DataError on dimension mismatch or missing labels.
LinearModel train_binary_svm(std::span<const FeatureVector> X,
                             std::span<const int> y, const SvmOptions& opts,
                             SolverTrace* trace = nullptr);

double decision_value(const LinearModel& m, std::span<const double> x);

// (1/2)(|w|^2 + b^2) + C * sum of hinge losses.
double primal_objective(const LinearModel& m, std::span<const FeatureVector> X,
                        std::span<const int> y);

struct PlattParams {
  double A = 0.0;
  double B = 0.0;
};

struct PlattOptions {
  std::size_t max_iter = 100;
  double tol = 1e-5;  // on the gradient of the negative log-likelihood
  double min_step = 1e-10;
  double sigma = 1e-12;  // Hessian ridge
};

class PlattConvergenceError : public std::runtime_error {
 public:
  PlattConvergenceError(const std::string& what, PlattParams last)
      : std::runtime_error(what), last_(last) {}
  PlattParams last_iterate() const noexcept { return last_; }

 private:
  PlattParams last_;
};

// P(y = +1 | f) = 1 / (1 + exp(A f + B)), numerically stable.
double platt_probability(const PlattParams& p, double f) noexcept;

// Negative log-likelihood with smoothed targets (N+ + 1)/(N+ + 2) and
// 1/(N- + 2); the quantity fit_platt minimizes.
double platt_objective(const PlattParams& p, std::span<const double> f,
                       std::span<const int> y);

// Newton's method with backtracking line search on platt_objective. Throws
// PlattConvergenceError after max_iter iterations.
PlattParams fit_platt(std::span<const double> f, std::span<const int> y,
                      const PlattOptions& opts = {});

// One-vs-rest linear SVMs with per-class Platt calibration. With two classes
// a single (model, calibration) pair for classes[0] is stored and the other
// class gets the complement probability.
struct CalibratedModel {
  std::vector<AuthorId> classes;  // sorted
  std::vector<LinearModel> models;
  std::vector<PlattParams> platt;
  std::uint64_t feature_hash = 0;

  bool binary() const noexcept { return models.size() == 1; }
  bool converged() const noexcept;
};

inline constexpr std::size_t kCalibrationFolds = 3;

// Platt parameters are fitted on out-of-fold decision values from a
// stratified 3-fold split; the final per-class models use all data. Throws
// DataError with fewer than 2 classes or a class with fewer than 2 examples.
CalibratedModel train_multiclass(std::span<const FeatureVector> X,
                                 std::span<const AuthorId> y,
                                 const SvmOptions& opts);

// Distribution over m.classes summing to 1.
std::vector<double> predict_proba(const CalibratedModel& m,
                                  std::span<const double> x);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> p) noexcept;

}  // namespace rollattr
