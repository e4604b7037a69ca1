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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rollattr/corpus.hpp"
#include "rollattr/eval.hpp"
#include "rollattr/features.hpp"
#include "rollattr/svm.hpp"

namespace rollattr {

inline constexpr std::size_t kDefaultWindowLines = 100;
inline constexpr std::size_t kDefaultStepLines = 5;

struct RollingConfig {
  std::size_t k = kDefaultWindowLines;  // window length in lines
  std::size_t d = kDefaultStepLines;    // step, also the group size
  std::size_t iterations = kDefaultIterations;
  std::uint64_t master_seed = 0;
  std::size_t top_words = kDefaultTopWords;
  std::size_t top_rhythms = kDefaultTopRhythms;
  FeatureMode mode = FeatureMode::kCombined;
  SvmOptions svm;
  std::size_t min_lines = kDefaultMinLines;  // for training scenes
  std::size_t jobs = 1;
  // Authors drawn above / below the axis. Default: first two classes.
  std::optional<AuthorId> primary;
  std::optional<AuthorId> secondary;
};

// 1-based inclusive positions in the play's line sequence.
struct LineSpan {
  std::size_t first = 0;
  std::size_t last = 0;

  friend bool operator==(const LineSpan&, const LineSpan&) = default;
};

// Throws ConstraintError naming the first violated inequality among
// k < n, d < n - k, d <= k, k >= 1, d >= 1.
void check_window_constraints(std::size_t n, std::size_t k, std::size_t d);

// Windows [i+1, i+k] for i = 0, d, 2d, ... while i < n - k.
std::vector<LineSpan> enumerate_windows(std::size_t n, std::size_t k,
                                        std::size_t d);

struct GroupResult {
  std::size_t group_index = 0;  // 1-based run of d lines
  int first_line = 0;           // line_index values from the corpus
  int last_line = 0;
  std::vector<double> mean_prob;  // over RollingResult::authors
  std::size_t n_classifications = 0;
};

struct SignedPoint {
  double primary = 0.0;     // p(primary)
  double secondary = 0.0;   // -p(secondary)
  double average = 0.0;     // (primary + secondary) / 2
};

struct RollingResult {
  std::string play_id;
  FeatureMode mode = FeatureMode::kCombined;
  std::vector<AuthorId> authors;
  std::size_t primary = 0;
  std::size_t secondary = 1;
  std::vector<GroupResult> groups;

  SignedPoint signed_point(std::size_t g) const;
  std::vector<SignedPoint> signed_curve() const;
};

// Ensemble of cfg.iterations models trained on the other labeled plays,
// applied to every window of the target play; each d-line group gets the
// mean distribution over all (window, iteration) pairs whose window overlaps
// it. Groups no window reaches (the tail after the last window) are omitted.
RollingResult rolling_attribute(const Corpus& c, const std::string& target_play,
                                const RollingConfig& cfg);

// Fraction of groups whose argmax author differs from truth[g].
double misattribution_rate(const RollingResult& r,
                           std::span<const AuthorId> truth);

// Per-group truth from per-line labels (indexed by play position, 0-based):
// the majority label of the group's lines, ties to the earliest line's label.
std::vector<AuthorId> group_truth(const RollingResult& r,
                                  const Play& play,
                                  std::span<const AuthorId> line_labels);

// Line positions (corpus line_index units) where the average signed curve
// changes sign, linearly interpolated between group midpoints.
std::vector<double> zero_crossings(const RollingResult& r);

struct Boundary {
  int line_index = 0;
  std::string label;
};

// `line_index<TAB>label` lines; '#' comments.
std::vector<Boundary> parse_boundaries(std::istream& in);
// Scene starts of a play, labeled "act.scene".
std::vector<Boundary> scene_boundaries(const Play& play);

// group_index,first_line,last_line,p_author1,p_author2_negated,average
void write_curve_csv(std::ostream& out, const RollingResult& r);

struct CurveRow {
  std::size_t group_index = 0;
  int first_line = 0;
  int last_line = 0;
  double p_author1 = 0.0;
  double p_author2_negated = 0.0;
  double average = 0.0;
};
std::vector<CurveRow> read_curve_csv(std::istream& in);

// Signed authorship plot. The first result also gets its two per-author
// curves; every result gets an average curve styled by mode (combined solid,
// rhythm dashed, words dotted).
void write_curve_svg(std::ostream& out, std::span<const RollingResult> results,
                     std::span<const Boundary> boundaries);

}  // namespace rollattr
