// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "rollattr/error.hpp"
#include "rollattr/prosody.hpp"
#include "rollattr/report.hpp"
#include "rollattr/rolling.hpp"
#include "rollattr/svm.hpp"
#include "rollattr/synth.hpp"

using namespace rollattr;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split_csv_record(line));
  }
  return rows;
}

int cli(const std::string& args) {
  const auto cmd = fmt::format("\"{}\" {} > /dev/null", ROLLATTR_CLI, args);
  return std::system(cmd.c_str());
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

// --- criterion 1 -----------------------------------------------------------

Verdict rhythm_examples() {
  const auto lex = StressLexicon::load(ROLLATTR_TEST_DATA "/sample_lines.lex");
  auto scan = [&](const std::string& text) {
    const auto p = annotate_line(tokenize(text), lex);
    return p ? rhythmic_type(*p).key : std::string("<unknown>");
  };
  const auto a = scan("The view of earthly glory: men might say");
  const auto b = scan("Till this time pomp was single, but now married");
  return {a == "0101010101" && b == "00110100110", a + " " + b};
}

// --- criterion 2 -----------------------------------------------------------

AuthorProfile small_profile(const std::string& name, const std::string& stem,
                            const std::string& rhythm) {
  AuthorProfile p;
  p.name = name;
  for (int i = 0; i < 15; ++i) {
    p.vocabulary.emplace_back(stem + static_cast<char>('a' + i), 1.0 + i % 3);
  }
  p.rhythms = {{rhythm, 1.0}, {"0101010101", 0.3}};
  p.normalize();
  return p;
}

Verdict window_algebra() {
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 300; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t d = 1; d <= k; ++d) {
        const bool valid = k < n && d < n - k;
        if (!valid) {
          // Sample the rejected region; exceptions are slow.
          if ((n + k + d) % 13 != 0) continue;
          try {
            (void)enumerate_windows(n, k, d);
            ++mismatches;
          } catch (const ConstraintError&) {
          }
          ++checked;
          continue;
        }
        std::vector<LineSpan> expect;
        for (std::size_t off = 0; off + k <= n; ++off) {
          if (off % d == 0 && off < n - k) expect.push_back({off + 1, off + k});
        }
        mismatches += enumerate_windows(n, k, d) != expect;
        ++checked;
      }
    }
  }

  Rng rng(21);
  std::vector<Play> plays;
  for (int i = 0; i < 2; ++i) {
    plays.push_back(generate_play(small_profile("A", "ka", "1101010101"),
                                  "A" + std::to_string(i), 5, 20, rng));
    plays.push_back(generate_play(small_profile("B", "mo", "0100110101"),
                                  "B" + std::to_string(i), 5, 20, rng));
  }
  auto target = generate_play(small_profile("A", "ka", "1101010101"), "T", 6,
                              50, rng);
  target.author_label.reset();
  for (auto& s : target.scenes) s.author_label.reset();
  plays.push_back(target);
  const auto c = make_corpus(std::move(plays));
  RollingConfig cfg;  // k = 100, d = 5, 30 iterations
  cfg.master_seed = 1;
  const auto r = rolling_attribute(c, "T", cfg);
  std::size_t interior = 0;
  std::size_t interior_ok = 0;
  for (const auto& g : r.groups) {
    if (g.first_line > 100 && g.last_line <= 200) {
      ++interior;
      interior_ok += g.n_classifications == 600;
    }
  }
  return {mismatches == 0 && interior > 0 && interior == interior_ok,
          fmt::format("{} (n,k,d) triples, {} mismatches; {}/{} interior "
                      "groups classified 600 times",
                      checked, mismatches, interior_ok, interior)};
}

// --- criterion 3 -----------------------------------------------------------

Verdict accuracy_arithmetic() {
  RollingResult r;
  r.authors = {"A", "B"};
  std::vector<AuthorId> truth;
  for (int g = 0; g < 4412; ++g) {
    GroupResult gr;
    gr.group_index = static_cast<std::size_t>(g + 1);
    gr.mean_prob = {0.8, 0.2};
    r.groups.push_back(gr);
    truth.push_back(g % 441 == 0 && g < 4410 ? "B" : "A");
  }
  const double acc = 1.0 - misattribution_rate(r, truth);
  return {std::abs(acc - 0.9977) < 1e-4, fmt::format("accuracy {:.6f}", acc)};
}

// --- criterion 4 -----------------------------------------------------------

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

Verdict svm_correctness() {
  SvmOptions o;
  o.C = 10.0;
  const std::vector<FeatureVector> two{{1.0, 0.0}, {-1.0, 0.0}};
  const auto m = train_binary_svm(two, std::vector<int>{1, -1}, o);
  const double err = std::max({std::abs(m.weights[0] - 1.0),
                               std::abs(m.weights[1]), std::abs(m.bias)});
  bool ok = err < 1e-3;

  Rng rng(2024);
  int separable = 0;
  int perfect = 0;
  int feasible = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> normal(5);
    for (auto& v : normal) v = rng.uniform() * 2.0 - 1.0;
    std::vector<FeatureVector> X;
    std::vector<int> y;
    int positives = 0;
    while (X.size() < 40 || positives == 0 ||
           positives == static_cast<int>(X.size())) {
      if (X.size() == 40) {
        X.clear();
        y.clear();
        positives = 0;
      }
      FeatureVector x(5);
      double s = 0.2;
      for (std::size_t j = 0; j < 5; ++j) {
        x[j] = rng.uniform() * 2.0 - 1.0;
        s += normal[j] * x[j];
      }
      if (std::abs(s) < 0.2) continue;
      X.push_back(x);
      y.push_back(s > 0 ? 1 : -1);
      positives += s > 0;
    }
    if (!perceptron_separable(X, y)) continue;
    ++separable;
    SvmOptions so;
    so.C = 1000.0;
    so.seed = static_cast<std::uint64_t>(t);
    SolverTrace tr;
    const auto model = train_binary_svm(X, y, so, &tr);
    int right = 0;
    double worst = 0.0;
    bool bounds = true;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double f = decision_value(model, X[i]);
      right += y[i] * f > 0.0;
      const double g = y[i] * f - 1.0;
      const double a = tr.alpha[i];
      bounds &= a >= 0.0 && a <= so.C;
      double pg = g;
      if (a <= 0.0) pg = std::min(g, 0.0);
      if (a >= so.C) pg = std::max(g, 0.0);
      worst = std::max(worst, std::abs(pg));
    }
    perfect += right == static_cast<int>(X.size());
    feasible += bounds && worst < so.tol;
  }
  ok = ok && separable == 50 && perfect == 50 && feasible == 50;
  return {ok, fmt::format("two-point error {:.2e}; {}/50 separable, {}/50 "
                          "perfect, {}/50 feasible",
                          err, separable, perfect, feasible)};
}

// --- criterion 5 -----------------------------------------------------------

PlattParams grid_platt(const std::vector<double>& f, const std::vector<int>& y) {
  double ca = 0.0;
  double cb = 0.0;
  double half = 20.0;
  for (int level = 0; level < 40; ++level) {
    double best = platt_objective({ca, cb}, f, y);
    double ba = ca;
    double bb = cb;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const PlattParams p{ca + half * i / 10.0, cb + half * j / 10.0};
        const double v = platt_objective(p, f, y);
        if (v < best) {
          best = v;
          ba = p.A;
          bb = p.B;
        }
      }
    }
    ca = ba;
    cb = bb;
    half *= 0.5;
  }
  return {ca, cb};
}

Verdict platt_correctness() {
  Rng rng(77);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> f;
    std::vector<int> y;
    const auto n = 15 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) {
      const int label = rng.uniform() < 0.5 ? 1 : -1;
      f.push_back(label * (0.2 + rng.uniform()) + (rng.uniform() - 0.5) * 2.5);
      y.push_back(label);
    }
    y[0] = 1;
    y[1] = -1;
    const auto a = fit_platt(f, y);
    const auto b = grid_platt(f, y);
    worst = std::max({worst, std::abs(a.A - b.A), std::abs(a.B - b.B)});
  }
  std::vector<double> f;
  std::vector<int> y;
  for (int i = 1; i <= 20; ++i) {
    f.push_back(0.1 * i);
    y.push_back(i % 4 == 0 ? -1 : 1);
    f.push_back(-0.1 * i);
    y.push_back(i % 4 == 0 ? 1 : -1);
  }
  const double sym_b = std::abs(fit_platt(f, y).B);
  return {worst < 1e-3 && sym_b < 1e-6,
          fmt::format("max |diff| vs grid {:.2e}; symmetric |B| {:.2e}", worst,
                      sym_b)};
}

// --- criteria 6 to 8 -------------------------------------------------------

struct PipelineRun {
  fs::path dir;
  bool cv_ok = false;
  bool roll_ok = false;
};

void run_crossval(const fs::path& root, PipelineRun& r, int jobs) {
  r.cv_ok = cli(fmt::format(
                "--jobs {} crossval --corpus {} --modes combined --iterations "
                "30 --seed 2026 --out {}",
                jobs, quoted(root / "moderate" / "corpus.tsv"),
                quoted(r.dir / "cv"))) == 0;
}

void run_rolling(const fs::path& root, PipelineRun& r, int jobs) {
  r.roll_ok = cli(fmt::format(
                  "--jobs {} rolling --corpus {} --target M1 --k 100 --d 5 "
                  "--iterations 30 --seed 2026 --truth {} --out {}",
                  jobs, quoted(root / "boundary" / "corpus.tsv"),
                  quoted(root / "boundary" / "truth_M1.tsv"),
                  quoted(r.dir / "roll"))) == 0;
}

Verdict pipeline_recovery(const PipelineRun& run) {
  if (!run.cv_ok) return {false, "CLI run failed"};
  const auto rows = read_csv(run.dir / "cv" / "votes_combined.csv");
  if (rows.empty()) return {false, "no votes"};
  const auto& header = rows.front();
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t scenes = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& truth = row[3];
    if (truth == "?") continue;
    ++scenes;
    for (std::size_t c = 4; c + 1 < row.size(); ++c) {
      const auto votes = std::stoul(row[c]);
      total += votes;
      if (header[c] == truth) correct += votes;
    }
  }
  const double acc = total ? static_cast<double>(correct) / total : 0.0;
  return {acc >= 0.95 && scenes == 160,
          fmt::format("{} scenes x 30 iterations, accuracy {:.4f}", scenes,
                      acc)};
}

Verdict rolling_recovery(const PipelineRun& run, const fs::path& root) {
  if (!run.roll_ok) return {false, "CLI run failed"};
  const auto curve = read_csv(run.dir / "roll" / "rolling_combined.csv");
  std::map<int, std::string> truth;
  std::ifstream in(root / "boundary" / "truth_M1.tsv");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    truth[std::stoi(line.substr(0, tab))] = line.substr(tab + 1);
  }
  if (curve.size() < 2) return {false, "empty curve"};
  std::vector<double> mid;
  std::vector<double> avg;
  std::size_t right = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const int first = std::stoi(curve[i][1]);
    const int last = std::stoi(curve[i][2]);
    const double p1 = std::stod(curve[i][3]);
    const double p2 = -std::stod(curve[i][4]);
    std::map<std::string, int> tally;
    for (int l = first; l <= last; ++l) ++tally[truth.at(l)];
    const std::string majority = tally["A"] >= tally["B"] ? "A" : "B";
    right += (p1 >= p2 ? "A" : "B") == majority;
    mid.push_back(0.5 * (first + last));
    avg.push_back(std::stod(curve[i][5]));
  }
  std::vector<double> crossings;
  for (std::size_t g = 0; g + 1 < avg.size(); ++g) {
    if ((avg[g] < 0.0) != (avg[g + 1] < 0.0)) {
      crossings.push_back(mid[g] + (mid[g + 1] - mid[g]) * avg[g] /
                                       (avg[g] - avg[g + 1]));
    }
  }
  const double acc = static_cast<double>(right) / static_cast<double>(avg.size());
  bool near = !crossings.empty();
  std::string where;
  for (double x : crossings) {
    near = near && std::abs(x - 301.0) <= 10.0;
    where += fmt::format(" {:.1f}", x);
  }
  return {near && acc >= 0.97,
          fmt::format("crossings at{}; group accuracy {:.4f} over {} groups",
                      where.empty() ? " none" : where, acc, avg.size())};
}

Verdict determinism(const PipelineRun& a, const PipelineRun& b) {
  if (!a.cv_ok || !a.roll_ok || !b.cv_ok || !b.roll_ok) {
    return {false, "CLI run failed"};
  }
  std::size_t files = 0;
  std::size_t same = 0;
  for (const auto* rel :
       {"cv/votes_combined.csv", "cv/accuracy.csv", "roll/rolling_combined.csv",
        "roll/rolling_summary.csv"}) {
    ++files;
    const auto x = slurp(a.dir / rel);
    same += !x.empty() && x == slurp(b.dir / rel);
  }
  return {files == same,
          fmt::format("{}/{} CSV files byte-identical for --jobs 1 and 3",
                      same, files)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name,
                    const std::function<Verdict()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    failures += !v.pass;
    std::cout << fmt::format("{} [{}] {}: {} ({:.1f} s)\n",
                             v.pass ? "PASS" : "FAIL", id, name, v.detail,
                             secs)
              << std::flush;
  };

  report(1, "rhythmic type encoding", rhythm_examples);
  report(2, "window algebra", window_algebra);
  report(3, "accuracy arithmetic", accuracy_arithmetic);
  report(4, "SVM correctness", svm_correctness);
  report(5, "Platt correctness", platt_correctness);

  const auto root = fs::temp_directory_path() / "rollattr_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  // Scene attribution uses moderately separated profiles; the boundary
  // test uses a more distinct pair.
  auto synth_into = [&](const char* profiles, const char* dir) {
    return cli(fmt::format("synth --profiles {} --seed 2026 --out {}",
                           quoted(fs::path(ROLLATTR_TEST_DATA) / profiles),
                           quoted(root / dir)));
  };
  const int synth = synth_into("synth_two_authors.json", "moderate") +
                    synth_into("synth_boundary.json", "boundary");
  PipelineRun serial{root / "jobs1"};
  PipelineRun threaded{root / "jobs3"};
  report(6, "pipeline recovery", [&] {
    if (synth != 0) return Verdict{false, "synth failed"};
    run_crossval(root, serial, 1);
    return pipeline_recovery(serial);
  });
  report(7, "rolling boundary recovery", [&] {
    if (synth != 0) return Verdict{false, "synth failed"};
    run_rolling(root, serial, 1);
    return rolling_recovery(serial, root);
  });
  report(8, "determinism", [&] {
    if (synth != 0) return Verdict{false, "synth failed"};
    run_crossval(root, threaded, 3);
    run_rolling(root, threaded, 3);
    return determinism(serial, threaded);
  });

  std::cout << (failures == 0 ? "all criteria passed\n"
                              : fmt::format("{} criteria failed\n", failures));
  return failures == 0 ? 0 : 1;
}
