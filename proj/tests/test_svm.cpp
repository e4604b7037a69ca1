#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rollattr/error.hpp"
#include "rollattr/model_io.hpp"
#include "rollattr/random.hpp"
#include "rollattr/svm.hpp"

using namespace rollattr;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Classic perceptron on bias-augmented rows; returns true if it finds a
// separating hyperplane within the epoch budget.
bool perceptron_separable(const std::vector<FeatureVector>& X,
                          const std::vector<int>& y) {
  std::vector<double> w(X.front().size() + 1, 0.0);
  for (int epoch = 0; epoch < 10000; ++epoch) {
    bool clean = true;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double s = w.back();
      for (std::size_t j = 0; j < X[i].size(); ++j) s += w[j] * X[i][j];
      if (y[i] * s <= 0.0) {
        clean = false;
        for (std::size_t j = 0; j < X[i].size(); ++j) w[j] += y[i] * X[i][j];
        w.back() += y[i];
      }
    }
    if (clean) return true;
  }
  return false;
}

struct Problem {
  std::vector<FeatureVector> X;
  std::vector<int> y;
};

Problem separable_problem(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<double> normal(dim);
  for (auto& v : normal) v = rng.uniform() * 2.0 - 1.0;
  Problem p;
  auto one_sided = [&] {
    return std::find(p.y.begin(), p.y.end(), 1) == p.y.end() ||
           std::find(p.y.begin(), p.y.end(), -1) == p.y.end();
  };
  while (p.X.size() < n || one_sided()) {
    if (p.X.size() == n) {
      p.X.clear();
      p.y.clear();
    }
    FeatureVector x(dim);
    for (auto& v : x) v = rng.uniform() * 4.0 - 2.0;
    const double s = dot(normal, x) + 0.1;
    if (std::abs(s) < 0.3) continue;  // keep a margin
    p.X.push_back(x);
    p.y.push_back(s > 0 ? 1 : -1);
  }
  return p;
}

double sigmoid_nll(double A, double B, const std::vector<double>& f,
                   const std::vector<int>& y) {
  return platt_objective(PlattParams{A, B}, f, y);
}

// Coarse-to-fine grid search over (A, B).
PlattParams grid_platt(const std::vector<double>& f, const std::vector<int>& y) {
  double ca = 0.0;
  double cb = 0.0;
  double half = 20.0;
  for (int level = 0; level < 40; ++level) {
    double best = sigmoid_nll(ca, cb, f, y);
    double ba = ca;
    double bb = cb;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const double a = ca + half * i / 10.0;
        const double b = cb + half * j / 10.0;
        const double v = sigmoid_nll(a, b, f, y);
        if (v < best) {
          best = v;
          ba = a;
          bb = b;
        }
      }
    }
    ca = ba;
    cb = bb;
    half *= 0.5;
  }
  return {ca, cb};
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("two symmetric points give the analytic solution") {
  const std::vector<FeatureVector> X{{1.0}, {-1.0}};
  const std::vector<int> y{1, -1};
  SvmOptions o;
  o.C = 10.0;
  o.tol = 1e-10;
  auto m = train_binary_svm(X, y, o);
  CHECK(m.converged);
  CHECK(m.weights[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(m.bias == doctest::Approx(0.0).epsilon(1e-8));

  // Both duals want 1/2; with C below that they sit at the bound.
  o.C = 0.25;
  m = train_binary_svm(X, y, o);
  CHECK(m.weights[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(m.bias) < 1e-8);
}

TEST_CASE("separable problems are fit exactly") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = separable_problem(rng, 30, 5);
    REQUIRE(perceptron_separable(p.X, p.y));
    SvmOptions o;
    o.C = 1000.0;
    o.seed = static_cast<std::uint64_t>(trial);
    const auto m = train_binary_svm(p.X, p.y, o);
    CHECK(m.converged);
    for (std::size_t i = 0; i < p.X.size(); ++i) {
      CHECK(p.y[i] * decision_value(m, p.X[i]) > 0.0);
    }
  }
}

TEST_CASE("decision value is an affine dot product") {
  Rng rng(3);
  LinearModel m;
  m.weights.resize(7);
  for (auto& v : m.weights) v = rng.uniform() - 0.5;
  m.bias = 0.3;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(7);
    for (auto& v : x) v = rng.uniform();
    double s = 0.3;
    for (std::size_t j = 0; j < 7; ++j) s += m.weights[j] * x[j];
    CHECK(decision_value(m, x) == doctest::Approx(s).epsilon(1e-12));
  }
  CHECK_THROWS_AS(decision_value(m, std::vector<double>(3)), DataError);
}

TEST_CASE("identical points with opposite labels") {
  const std::vector<FeatureVector> X{{0.5, 0.5}, {0.5, 0.5}};
  const std::vector<int> y{1, -1};
  const auto m = train_binary_svm(X, y, SvmOptions{});
  CHECK(std::abs(decision_value(m, X[0])) < 1e-6);

  // With a tiny pass budget the solver reports that it stopped early.
  std::vector<FeatureVector> Xs;
  std::vector<int> ys;
  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    Xs.push_back({rng.uniform(), rng.uniform()});
    ys.push_back(rng.uniform() < 0.5 ? 1 : -1);
  }
  ys[0] = 1;
  ys[1] = -1;
  SvmOptions o;
  o.C = 1e4;
  o.max_passes = 1;
  const auto capped = train_binary_svm(Xs, ys, o);
  CHECK_FALSE(capped.converged);
  CHECK(capped.passes == 1);
}

TEST_CASE("dual iterates stay feasible and the dual decreases") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<FeatureVector> X;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
      FeatureVector x(4);
      for (auto& v : x) v = rng.uniform();
      X.push_back(x);
      y.push_back(x[0] + 0.3 * rng.uniform() > 0.6 ? 1 : -1);
    }
    y[0] = 1;
    y[1] = -1;
    SvmOptions o;
    o.C = 2.0;
    o.seed = static_cast<std::uint64_t>(trial);
    SolverTrace tr;
    const auto m = train_binary_svm(X, y, o, &tr);
    REQUIRE(m.converged);
    CHECK(tr.final_violation < o.tol);

    // w and b recomputed from the duals.
    std::vector<double> w(4, 0.0);
    double b = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      CHECK(tr.alpha[i] >= 0.0);
      CHECK(tr.alpha[i] <= o.C);
      for (std::size_t j = 0; j < 4; ++j) w[j] += tr.alpha[i] * y[i] * X[i][j];
      b += tr.alpha[i] * y[i];
    }
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(m.weights[j] == doctest::Approx(w[j]).epsilon(1e-9));
    }
    CHECK(m.bias == doctest::Approx(b).epsilon(1e-9));

    for (std::size_t k = 1; k < tr.dual_objective.size(); ++k) {
      CHECK(tr.dual_objective[k] <= tr.dual_objective[k - 1] + 1e-12);
    }
    for (std::size_t k = 0; k < tr.dual_objective.size(); ++k) {
      CHECK(tr.primal_objective[k] >= -tr.dual_objective[k] - 1e-9);
    }
    const double gap = tr.primal_objective.back() + tr.dual_objective.back();
    CHECK(gap <= 1e-2 * std::max(1.0, tr.primal_objective.back()));
  }
}

TEST_CASE("bad SVM inputs are rejected") {
  const std::vector<FeatureVector> X{{1.0}, {2.0}};
  CHECK_THROWS_AS(train_binary_svm(X, std::vector<int>{1, 1}, SvmOptions{}),
                  DataError);
  CHECK_THROWS_AS(train_binary_svm(X, std::vector<int>{1, 0}, SvmOptions{}),
                  DataError);
  CHECK_THROWS_AS(train_binary_svm(X, std::vector<int>{1}, SvmOptions{}),
                  DataError);
  SvmOptions o;
  o.C = 0.0;
  CHECK_THROWS_AS(train_binary_svm(X, std::vector<int>{1, -1}, o),
                  ConstraintError);
}

TEST_CASE("Platt fit matches a grid search") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f;
    std::vector<int> y;
    const double scale = 0.5 + 3.0 * rng.uniform();
    for (int i = 0; i < 80; ++i) {
      const int label = rng.uniform() < 0.4 ? 1 : -1;
      f.push_back(label * scale * 0.5 + (rng.uniform() - 0.5) * 3.0);
      y.push_back(label);
    }
    y[0] = 1;
    y[1] = -1;
    const auto fitted = fit_platt(f, y);
    const auto grid = grid_platt(f, y);
    CHECK(fitted.A == doctest::Approx(grid.A).epsilon(1e-3));
    CHECK(fitted.B == doctest::Approx(grid.B).epsilon(1e-3));
    CHECK(platt_objective(fitted, f, y) <=
          platt_objective(grid, f, y) + 1e-9);
  }
}

TEST_CASE("symmetric scores give a zero offset") {
  std::vector<double> f;
  std::vector<int> y;
  for (int i = 1; i <= 25; ++i) {
    const double v = 0.1 * i;
    f.push_back(v);
    y.push_back(i % 5 == 0 ? -1 : 1);
    f.push_back(-v);
    y.push_back(i % 5 == 0 ? 1 : -1);
  }
  const auto p = fit_platt(f, y);
  CHECK(p.A < 0.0);
  CHECK(std::abs(p.B) < 1e-6);
}

TEST_CASE("uninformative scores give the smoothed prior") {
  std::vector<double> f(30, 0.7);
  std::vector<int> y(30, -1);
  for (int i = 0; i < 10; ++i) y[i] = 1;
  const auto p = fit_platt(f, y);
  const double prior = (10.0 * (11.0 / 12.0) + 20.0 * (1.0 / 22.0)) / 30.0;
  CHECK(platt_probability(p, 0.7) == doctest::Approx(prior).epsilon(1e-6));
}

TEST_CASE("Platt rejects a single label") {
  CHECK_THROWS_AS(fit_platt(std::vector<double>{1.0, 2.0},
                            std::vector<int>{1, 1}),
                  DataError);
}

TEST_CASE("Platt probability is stable at extremes") {
  const PlattParams p{-1.0, 0.0};
  CHECK(platt_probability(p, 1000.0) == doctest::Approx(1.0));
  CHECK(platt_probability(p, -1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(platt_probability(p, 1e300)));
  CHECK(platt_probability(p, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("two-class model gives complementary probabilities") {
  std::vector<FeatureVector> X;
  std::vector<AuthorId> y;
  Rng rng(1);
  for (int i = 0; i < 40; ++i) {
    const bool a = i % 2 == 0;
    X.push_back({(a ? 1.0 : -1.0) + rng.uniform() - 0.5, rng.uniform()});
    y.push_back(a ? "A" : "B");
  }
  const auto m = train_multiclass(X, y, SvmOptions{});
  REQUIRE(m.binary());
  CHECK(m.classes == std::vector<AuthorId>{"A", "B"});
  const auto p = predict_proba(m, std::vector<double>{1.0, 0.5});
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
  CHECK(p[0] > 0.8);

  // Probability of the first class rises monotonically along its axis.
  double prev = -1.0;
  for (int i = -20; i <= 20; ++i) {
    const auto q = predict_proba(m, std::vector<double>{0.1 * i, 0.5});
    CHECK(q[0] >= prev);
    prev = q[0];
  }
}

TEST_CASE("three classes agree with nearest neighbour on clusters") {
  const std::vector<std::vector<double>> centres{{0, 0}, {4, 0}, {0, 4}};
  const std::vector<AuthorId> names{"A", "B", "C"};
  Rng rng(2);
  std::vector<FeatureVector> X;
  std::vector<AuthorId> y;
  for (int i = 0; i < 90; ++i) {
    const auto c = static_cast<std::size_t>(i % 3);
    X.push_back({centres[c][0] + rng.uniform() - 0.5,
                 centres[c][1] + rng.uniform() - 0.5});
    y.push_back(names[c]);
  }
  const auto m = train_multiclass(X, y, SvmOptions{});
  CHECK(m.models.size() == 3);
  int agree = 0;
  for (int t = 0; t < 100; ++t) {
    const auto c = static_cast<std::size_t>(t % 3);
    const std::vector<double> q{centres[c][0] + rng.uniform() - 0.5,
                                centres[c][1] + rng.uniform() - 0.5};
    std::size_t nn = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double d = std::pow(X[i][0] - q[0], 2) + std::pow(X[i][1] - q[1], 2);
      if (d < best) {
        best = d;
        nn = i;
      }
    }
    const auto p = predict_proba(m, q);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) ==
          doctest::Approx(1.0));
    if (m.classes[argmax(p)] == y[nn]) ++agree;
  }
  CHECK(agree == 100);
}

TEST_CASE("identical rows across three classes give uniform output") {
  std::vector<FeatureVector> X(9, FeatureVector{0.2, 0.2});
  std::vector<AuthorId> y{"A", "B", "C", "A", "B", "C", "A", "B", "C"};
  const auto m = train_multiclass(X, y, SvmOptions{});
  const auto p = predict_proba(m, X[0]);
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("calibrated probabilities track empirical frequencies") {
  Rng rng(8);
  auto draw = [&](std::vector<FeatureVector>& X, std::vector<AuthorId>& y,
                  int n) {
    for (int i = 0; i < n; ++i) {
      // Equal-variance Gaussians: the true posterior is a sigmoid.
      const bool a = rng.uniform() < 0.5;
      const double z = std::sqrt(-2.0 * std::log(1.0 - rng.uniform())) *
                       std::cos(2.0 * std::numbers::pi * rng.uniform());
      X.push_back({(a ? 0.5 : -0.5) + z});
      y.push_back(a ? "A" : "B");
    }
  };
  std::vector<FeatureVector> X;
  std::vector<AuthorId> y;
  draw(X, y, 600);
  const auto m = train_multiclass(X, y, SvmOptions{});
  std::vector<FeatureVector> Xt;
  std::vector<AuthorId> yt;
  draw(Xt, yt, 4000);
  double sum_p = 0.0;
  double hits = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < Xt.size(); ++i) {
    const double p = predict_proba(m, Xt[i])[0];
    if (p > 0.6 && p < 0.9) {
      sum_p += p;
      hits += yt[i] == "A" ? 1.0 : 0.0;
      ++count;
    }
  }
  REQUIRE(count > 200);
  CHECK(std::abs(sum_p / count - hits / count) < 0.08);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(std::vector<double>{0.2, 0.4, 0.4}) == 1);
  CHECK(argmax(std::vector<double>{0.5, 0.5}) == 0);
}

TEST_CASE("model files round-trip") {
  Rng rng(4);
  std::vector<FeatureVector> X;
  std::vector<AuthorId> y;
  for (int i = 0; i < 60; ++i) {
    const auto c = i % 3;
    X.push_back({c + rng.uniform(), rng.uniform(), -c + rng.uniform()});
    y.push_back(std::string(1, static_cast<char>('A' + c)));
  }
  auto m = train_multiclass(X, y, SvmOptions{});
  m.feature_hash = 0xfedcba9876543210ULL;
  std::stringstream ss;
  save_model(ss, m);
  const auto back = load_model(ss);
  CHECK(back.classes == m.classes);
  CHECK(back.feature_hash == m.feature_hash);
  for (std::size_t t = 0; t < X.size(); ++t) {
    const auto a = predict_proba(m, X[t]);
    const auto b = predict_proba(back, X[t]);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  }

  std::istringstream bad("{\"format\": \"something-else\"}");
  CHECK_THROWS_AS(load_model(bad), DataError);
  std::istringstream junk("not json");
  CHECK_THROWS_AS(load_model(junk), DataError);
}

}  // TEST_SUITE
