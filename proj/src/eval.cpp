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

#include "rollattr/eval.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "rollattr/error.hpp"
#include "rollattr/parallel.hpp"
#include "rollattr/report.hpp"

namespace rollattr {

std::size_t VoteRow::total() const noexcept {
  std::size_t n = 0;
  for (const auto& [author, count] : votes) n += count;
  return n;
}

AuthorId VoteRow::majority() const {
  AuthorId best;
  std::size_t best_count = 0;
  for (const auto& [author, count] : votes) {
    if (best.empty() || count > best_count) {
      best = author;
      best_count = count;
    }
  }
  return best;
}

std::vector<Segment> balance_classes(std::span<const Segment> samples,
                                     Rng& rng) {
  std::map<AuthorId, std::size_t> counts;
  for (const auto& s : samples) {
    if (!s.label) {
      throw DataError(fmt::format("segment {} {} has no author label",
                                  s.play_id, s.descriptor));
    }
    ++counts[*s.label];
  }
  if (counts.empty()) return {};
  std::size_t target = samples.size();
  for (const auto& [author, n] : counts) target = std::min(target, n);

  // Selection sampling per author: visit members in order, keep each with
  // probability (still needed) / (still unseen).
  std::map<AuthorId, std::size_t> seen;
  std::map<AuthorId, std::size_t> kept;
  std::vector<Segment> out;
  out.reserve(target * counts.size());
  for (const auto& s : samples) {
    const auto& a = *s.label;
    const std::size_t remaining = counts[a] - seen[a]++;
    const std::size_t needed = target - kept[a];
    if (rng.below(remaining) < needed) {
      ++kept[a];
      out.push_back(s);
    }
  }
  return out;
}

IterationModel train_iteration(std::span<const Segment> pool,
                               const TrainSettings& settings,
                               std::uint64_t seed,
                               std::vector<Segment>* balanced_out) {
  Rng rng(seed);
  auto balanced = balance_classes(pool, rng);
  IterationModel im;
  im.spec = build_feature_spec(balanced, settings.top_words,
                               settings.top_rhythms, settings.mode);
  std::vector<FeatureVector> X;
  std::vector<AuthorId> y;
  X.reserve(balanced.size());
  y.reserve(balanced.size());
  for (const auto& s : balanced) {
    X.push_back(vectorize(s, im.spec));
    y.push_back(*s.label);
  }
  SvmOptions svm = settings.svm;
  svm.seed = splitmix64(seed ^ 0x7a3c9e15d2b48f61ULL);
  im.model = train_multiclass(X, y, svm);
  im.model.feature_hash = im.spec.hash();
  if (balanced_out) *balanced_out = std::move(balanced);
  return im;
}

namespace {

void check_authors_present(const Corpus& c, std::size_t min_lines) {
  std::map<AuthorId, std::size_t> scenes;
  for (const auto& a : c.authors) scenes[a] = 0;
  for (const auto& p : c.plays) {
    if (!p.author_label) continue;
    for (const auto& s : p.scenes) {
      if (s.lines.size() >= min_lines) ++scenes[*p.author_label];
    }
  }
  for (const auto& [author, n] : scenes) {
    if (n == 0) {
      throw DataError(fmt::format("author '{}' has no scenes with at least {} "
                                  "lines",
                                  author, min_lines));
    }
  }
}

std::vector<Segment> training_pool(const Corpus& c, const std::string& exclude,
                                   std::size_t min_lines) {
  std::vector<Segment> pool;
  for (const auto& p : c.plays) {
    if (!p.author_label || p.play_id == exclude) continue;
    auto part = segment_scenes(p, min_lines);
    std::move(part.begin(), part.end(), std::back_inserter(pool));
  }
  std::set<AuthorId> authors;
  for (const auto& s : pool) authors.insert(*s.label);
  if (authors.size() < 2) {
    throw DataError(fmt::format("training pool without play '{}' has {} "
                                "author(s); at least 2 are required",
                                exclude, authors.size()));
  }
  return pool;
}

struct TaskResult {
  std::vector<AuthorId> predicted;  // per target scene
  std::size_t ties = 0;
  std::size_t unconverged = 0;
};

VoteTable classify_plays(const Corpus& c, const std::vector<const Play*>& targets,
                         const EvalConfig& cfg) {
  if (cfg.iterations < 1) throw ConstraintError("iterations must be >= 1");
  check_authors_present(c, cfg.min_lines);

  struct Target {
    const Play* play;
    std::vector<Segment> pool;
    std::vector<Segment> scenes;
  };
  std::vector<Target> work;
  for (const auto* p : targets) {
    work.push_back({p, training_pool(c, p->play_id, cfg.min_lines),
                    segment_scenes(*p, cfg.min_lines)});
  }

  const TrainSettings settings{cfg.top_words, cfg.top_rhythms, cfg.mode,
                               cfg.svm};
  const std::size_t n_tasks = work.size() * cfg.iterations;
  std::vector<TaskResult> results(n_tasks);
  parallel_for(n_tasks, cfg.jobs, [&](std::size_t task) {
    const auto& t = work[task / cfg.iterations];
    const std::size_t iteration = task % cfg.iterations;
    const auto seed =
        derive_seed(cfg.master_seed, t.play->play_id, iteration);
    std::vector<Segment> balanced;
    const auto im = train_iteration(t.pool, settings, seed,
                                    cfg.on_train ? &balanced : nullptr);
    if (cfg.on_train) cfg.on_train(t.play->play_id, balanced);

    TaskResult& r = results[task];
    for (const auto& m : im.model.models) r.unconverged += !m.converged;
    for (const auto& scene : t.scenes) {
      const auto p = predict_proba(im.model, vectorize(scene, im.spec));
      const auto best = argmax(p);
      r.ties += std::count(p.begin(), p.end(), p[best]) > 1;
      r.predicted.push_back(im.model.classes[best]);
    }
  });

  VoteTable table;
  table.mode = cfg.mode;
  table.iterations = cfg.iterations;
  table.authors.assign(c.authors.begin(), c.authors.end());
  for (std::size_t w = 0; w < work.size(); ++w) {
    const auto& t = work[w];
    const std::size_t first_row = table.rows.size();
    for (const auto& scene : t.scenes) {
      VoteRow row{t.play->play_id, scene.act, scene.scene, scene.label, {}};
      for (const auto& a : table.authors) row.votes[a] = 0;
      table.rows.push_back(std::move(row));
    }
    std::size_t correct = 0;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
      const auto& r = results[w * cfg.iterations + it];
      table.ties += r.ties;
      table.unconverged_fits += r.unconverged;
      for (std::size_t s = 0; s < r.predicted.size(); ++s) {
        auto& row = table.rows[first_row + s];
        ++row.votes[r.predicted[s]];
        correct += row.truth && *row.truth == r.predicted[s];
      }
    }
    if (t.play->author_label && !t.scenes.empty()) {
      table.accuracy[t.play->play_id] =
          static_cast<double>(correct) /
          static_cast<double>(t.scenes.size() * cfg.iterations);
    }
  }
  return table;
}

}  // namespace

VoteTable leave_one_play_out(const Corpus& c, const EvalConfig& cfg) {
  std::vector<const Play*> targets;
  for (const auto& p : c.plays) {
    if (p.author_label) targets.push_back(&p);
  }
  if (targets.size() < 2) {
    throw DataError("cross-validation needs at least two labeled plays");
  }
  return classify_plays(c, targets, cfg);
}

VoteTable attribute_scenes(const Corpus& c, const std::string& target_play,
                           const EvalConfig& cfg) {
  return classify_plays(c, {&c.at(target_play)}, cfg);
}

void write_vote_csv(std::ostream& out, const VoteTable& t) {
  out << "play_id,act,scene,truth";
  for (const auto& a : t.authors) out << ',' << csv_field(a);
  out << ",majority\n";
  for (const auto& row : t.rows) {
    out << csv_field(row.play_id) << ',' << row.act << ',' << row.scene << ','
        << csv_field(row.truth.value_or("?"));
    for (const auto& a : t.authors) out << ',' << row.votes.at(a);
    out << ',' << csv_field(row.majority()) << '\n';
  }
}

void write_accuracy_csv(std::ostream& out, std::span<const VoteTable> tables,
                        const Corpus& c) {
  out << "play_id,author";
  for (const auto& t : tables) out << ',' << to_string(t.mode);
  out << '\n';
  for (const auto& p : c.plays) {
    if (!p.author_label) continue;
    out << csv_field(p.play_id) << ',' << csv_field(*p.author_label);
    for (const auto& t : tables) {
      auto it = t.accuracy.find(p.play_id);
      out << ',' << (it == t.accuracy.end() ? std::string("") : format_real(it->second));
    }
    out << '\n';
  }
}

}  // namespace rollattr
