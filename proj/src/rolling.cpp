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

#include "rollattr/rolling.hpp"

#include <algorithm>
#include <istream>
#include <map>

#include <fmt/format.h>

#include "rollattr/error.hpp"
#include "rollattr/parallel.hpp"
#include "rollattr/random.hpp"

namespace rollattr {

void check_window_constraints(std::size_t n, std::size_t k, std::size_t d) {
  if (k < 1) throw ConstraintError("window constraint k >= 1 violated (k = 0)");
  if (d < 1) throw ConstraintError("window constraint d >= 1 violated (d = 0)");
  if (!(k < n)) {
    throw ConstraintError(fmt::format(
        "window constraint k < n violated (k = {}, n = {}); choose a smaller "
        "window length",
        k, n));
  }
  if (!(d <= k)) {
    throw ConstraintError(fmt::format(
        "window constraint d <= k violated (d = {}, k = {})", d, k));
  }
  if (!(d < n - k)) {
    throw ConstraintError(fmt::format(
        "window constraint d < n - k violated (d = {}, n - k = {})", d,
        n - k));
  }
}

std::vector<LineSpan> enumerate_windows(std::size_t n, std::size_t k,
                                        std::size_t d) {
  check_window_constraints(n, k, d);
  std::vector<LineSpan> out;
  out.reserve((n - k + d - 1) / d);
  for (std::size_t i = 0; i < n - k; i += d) out.push_back({i + 1, i + k});
  return out;
}

SignedPoint RollingResult::signed_point(std::size_t g) const {
  const auto& p = groups.at(g).mean_prob;
  SignedPoint s;
  s.primary = p.at(primary);
  s.secondary = -p.at(secondary);
  s.average = 0.5 * (s.primary + s.secondary);
  return s;
}

std::vector<SignedPoint> RollingResult::signed_curve() const {
  std::vector<SignedPoint> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) out.push_back(signed_point(g));
  return out;
}

namespace {

std::size_t author_position(const std::vector<AuthorId>& authors,
                            const AuthorId& a) {
  auto it = std::find(authors.begin(), authors.end(), a);
  if (it == authors.end()) {
    throw DataError(fmt::format("author '{}' is not among the trained classes",
                                a));
  }
  return static_cast<std::size_t>(it - authors.begin());
}

}  // namespace

RollingResult rolling_attribute(const Corpus& c, const std::string& target_play,
                                const RollingConfig& cfg) {
  if (cfg.iterations < 1) throw ConstraintError("iterations must be >= 1");
  const Play& play = c.at(target_play);
  const auto lines = play.lines();
  const std::size_t n = lines.size();
  const auto windows = enumerate_windows(n, cfg.k, cfg.d);

  std::vector<Segment> pool;
  for (const auto& p : c.plays) {
    if (!p.author_label || p.play_id == target_play) continue;
    auto part = segment_scenes(p, cfg.min_lines);
    std::move(part.begin(), part.end(), std::back_inserter(pool));
  }
  if (pool.empty()) {
    throw DataError(fmt::format("no labeled training scenes besides '{}'",
                                target_play));
  }

  std::vector<Segment> window_segments;
  window_segments.reserve(windows.size());
  for (const auto& w : windows) {
    Segment s;
    s.lines.assign(lines.begin() + (w.first - 1), lines.begin() + w.last);
    s.play_id = target_play;
    s.descriptor = fmt::format("{}-{}", lines[w.first - 1]->index_in_play,
                               lines[w.last - 1]->index_in_play);
    window_segments.push_back(std::move(s));
  }

  const TrainSettings settings{cfg.top_words, cfg.top_rhythms, cfg.mode,
                               cfg.svm};
  struct IterationOutput {
    std::vector<AuthorId> classes;
    std::vector<std::vector<double>> probs;  // per window
  };
  std::vector<IterationOutput> outputs(cfg.iterations);
  parallel_for(cfg.iterations, cfg.jobs, [&](std::size_t it) {
    const auto seed = derive_seed(cfg.master_seed, target_play, it);
    const auto im = train_iteration(pool, settings, seed);
    auto& o = outputs[it];
    o.classes = im.model.classes;
    o.probs.reserve(window_segments.size());
    for (const auto& s : window_segments) {
      o.probs.push_back(predict_proba(im.model, vectorize(s, im.spec)));
    }
  });

  RollingResult r;
  r.play_id = target_play;
  r.mode = cfg.mode;
  r.authors = outputs.front().classes;
  for (const auto& o : outputs) {
    if (o.classes != r.authors) {
      throw DataError("ensemble members disagree on the author set");
    }
  }
  r.primary = cfg.primary ? author_position(r.authors, *cfg.primary) : 0;
  if (cfg.secondary) {
    r.secondary = author_position(r.authors, *cfg.secondary);
  } else {
    r.secondary = r.primary == 0 ? 1 : 0;
  }

  const std::size_t d = cfg.d;
  const std::size_t n_groups = (n + d - 1) / d;
  const std::size_t n_authors = r.authors.size();
  std::vector<std::vector<double>> sums(n_groups,
                                        std::vector<double>(n_authors, 0.0));
  std::vector<std::size_t> counts(n_groups, 0);
  for (const auto& o : outputs) {
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const std::size_t g_first = (windows[w].first - 1) / d;
      const std::size_t g_last = (windows[w].last - 1) / d;
      for (std::size_t g = g_first; g <= g_last; ++g) {
        for (std::size_t a = 0; a < n_authors; ++a) sums[g][a] += o.probs[w][a];
        ++counts[g];
      }
    }
  }
  for (std::size_t g = 0; g < n_groups; ++g) {
    if (counts[g] == 0) continue;
    GroupResult gr;
    gr.group_index = g + 1;
    gr.first_line = lines[g * d]->index_in_play;
    gr.last_line = lines[std::min(n, (g + 1) * d) - 1]->index_in_play;
    gr.mean_prob = sums[g];
    for (auto& v : gr.mean_prob) v /= static_cast<double>(counts[g]);
    gr.n_classifications = counts[g];
    r.groups.push_back(std::move(gr));
  }
  return r;
}

double misattribution_rate(const RollingResult& r,
                           std::span<const AuthorId> truth) {
  if (truth.size() != r.groups.size()) {
    throw DataError(fmt::format("{} truth labels for {} groups", truth.size(),
                                r.groups.size()));
  }
  if (r.groups.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    wrong += r.authors[argmax(r.groups[g].mean_prob)] != truth[g];
  }
  return static_cast<double>(wrong) / static_cast<double>(r.groups.size());
}

std::vector<AuthorId> group_truth(const RollingResult& r, const Play& play,
                                  std::span<const AuthorId> line_labels) {
  const auto lines = play.lines();
  if (line_labels.size() != lines.size()) {
    throw DataError(fmt::format("{} line labels for {} lines",
                                line_labels.size(), lines.size()));
  }
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    position[lines[i]->index_in_play] = i;
  }
  std::vector<AuthorId> out;
  out.reserve(r.groups.size());
  for (const auto& g : r.groups) {
    const auto first = position.at(g.first_line);
    const auto last = position.at(g.last_line);
    std::map<AuthorId, std::size_t> tally;
    for (auto i = first; i <= last; ++i) ++tally[line_labels[i]];
    AuthorId best = line_labels[first];
    for (const auto& [label, count] : tally) {
      if (count > tally[best]) best = label;
    }
    out.push_back(best);
  }
  return out;
}

std::vector<double> zero_crossings(const RollingResult& r) {
  std::vector<double> out;
  const auto curve = r.signed_curve();
  auto mid = [&](std::size_t g) {
    return 0.5 * (r.groups[g].first_line + r.groups[g].last_line);
  };
  for (std::size_t g = 0; g + 1 < curve.size(); ++g) {
    const double a = curve[g].average;
    const double b = curve[g + 1].average;
    if (a == 0.0) {
      out.push_back(mid(g));
    } else if ((a < 0.0) != (b < 0.0) && b != 0.0) {
      out.push_back(mid(g) + (mid(g + 1) - mid(g)) * a / (a - b));
    }
  }
  if (!curve.empty() && curve.back().average == 0.0) {
    out.push_back(mid(curve.size() - 1));
  }
  return out;
}

std::vector<Boundary> parse_boundaries(std::istream& in) {
  std::vector<Boundary> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(line_no, 1, "expected 'line_index<TAB>label'");
    }
    Boundary b;
    try {
      std::size_t used = 0;
      const std::string idx(line.substr(0, tab));
      b.line_index = std::stoi(idx, &used);
      if (used != idx.size()) throw std::invalid_argument(idx);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, 1, "line_index is not an integer");
    }
    b.label = std::string(line.substr(tab + 1));
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Boundary> scene_boundaries(const Play& play) {
  std::vector<Boundary> out;
  for (const auto& s : play.scenes) {
    out.push_back({s.lines.front().index_in_play,
                   fmt::format("{}.{}", s.act, s.scene)});
  }
  return out;
}

}  // namespace rollattr
