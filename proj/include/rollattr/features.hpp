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
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rollattr/corpus.hpp"

namespace rollattr {

enum class FeatureMode { kWords, kRhythm, kCombined };

std::string_view to_string(FeatureMode m) noexcept;
FeatureMode parse_feature_mode(std::string_view s);  // throws DataError

// A run of lines to classify: a whole scene or a rolling window. Lines point
// into a Corpus that must outlive the segment.
struct Segment {
  std::vector<const VerseLine*> lines;
  std::optional<AuthorId> label;
  std::string play_id;
  std::string descriptor;  // "act.scene" or "first-last"
  int act = 0;             // scene segments only
  int scene = 0;
};

// Induced vocabularies. Order is by count descending, then bytewise
// ascending; the vector layout is the word block followed by the rhythm block.
class FeatureSpec {
 public:
  FeatureSpec() = default;
  FeatureSpec(std::vector<std::string> words,
              std::vector<std::string> rhythm_types, FeatureMode mode);

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::string>& rhythm_types() const noexcept {
    return rhythm_types_;
  }
  FeatureMode mode() const noexcept { return mode_; }
  std::size_t dimension() const noexcept {
    return words_.size() + rhythm_types_.size();
  }

  // Position of a word / rhythmic type in its block, or -1.
  int word_index(const std::string& w) const;
  int rhythm_index(const std::string& r) const;

  // Column names with "w:" / "r:" prefixes.
  std::vector<std::string> feature_names() const;
  // Stable content hash stored alongside serialized models.
  std::uint64_t hash() const noexcept;

 private:
  std::vector<std::string> words_;
  std::vector<std::string> rhythm_types_;
  FeatureMode mode_ = FeatureMode::kCombined;
  std::unordered_map<std::string, int> word_pos_;
  std::unordered_map<std::string, int> rhythm_pos_;
};

using FeatureVector = std::vector<double>;

inline constexpr std::size_t kDefaultTopWords = 500;
inline constexpr std::size_t kDefaultTopRhythms = 500;

// Top-W words and top-R rhythmic types over the training segments. Blocks not
// used by `mode` are left empty. Throws DataError on an empty training set.
FeatureSpec build_feature_spec(std::span<const Segment> train,
                               std::size_t top_words, std::size_t top_rhythms,
                               FeatureMode mode);

// Relative frequencies: word entries over the segment's token count, rhythm
// entries over its stress-annotated line count.
FeatureVector vectorize(const Segment& s, const FeatureSpec& spec);

// One labeled segment per scene with at least min_lines lines, corpus order.
std::vector<Segment> segment_scenes(const Corpus& c, std::size_t min_lines);
std::vector<Segment> segment_scenes(const Play& p, std::size_t min_lines);

// Feature matrix CSV: play_id,segment,label,<feature names...>
void write_feature_csv(std::ostream& out, std::span<const Segment> segments,
                       const FeatureSpec& spec);

}  // namespace rollattr
