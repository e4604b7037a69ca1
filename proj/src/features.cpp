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

#include "rollattr/features.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "rollattr/error.hpp"
#include "rollattr/random.hpp"
#include "rollattr/report.hpp"

namespace rollattr {

std::string_view to_string(FeatureMode m) noexcept {
  switch (m) {
    case FeatureMode::kWords:
      return "words";
    case FeatureMode::kRhythm:
      return "rhythm";
    case FeatureMode::kCombined:
      return "combined";
  }
  return "combined";
}

FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "words") return FeatureMode::kWords;
  if (s == "rhythm") return FeatureMode::kRhythm;
  if (s == "combined") return FeatureMode::kCombined;
  throw DataError(fmt::format(
      "unknown feature mode '{}' (expected words, rhythm or combined)", s));
}

FeatureSpec::FeatureSpec(std::vector<std::string> words,
                         std::vector<std::string> rhythm_types,
                         FeatureMode mode)
    : words_(std::move(words)),
      rhythm_types_(std::move(rhythm_types)),
      mode_(mode) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!word_pos_.emplace(words_[i], static_cast<int>(i)).second) {
      throw DataError(fmt::format("duplicate word feature '{}'", words_[i]));
    }
  }
  for (std::size_t i = 0; i < rhythm_types_.size(); ++i) {
    if (!rhythm_pos_.emplace(rhythm_types_[i], static_cast<int>(i)).second) {
      throw DataError(
          fmt::format("duplicate rhythm feature '{}'", rhythm_types_[i]));
    }
  }
}

int FeatureSpec::word_index(const std::string& w) const {
  auto it = word_pos_.find(w);
  return it == word_pos_.end() ? -1 : it->second;
}

int FeatureSpec::rhythm_index(const std::string& r) const {
  auto it = rhythm_pos_.find(r);
  return it == rhythm_pos_.end() ? -1 : it->second;
}

std::vector<std::string> FeatureSpec::feature_names() const {
  std::vector<std::string> names;
  names.reserve(dimension());
  for (const auto& w : words_) names.push_back("w:" + w);
  for (const auto& r : rhythm_types_) names.push_back("r:" + r);
  return names;
}

std::uint64_t FeatureSpec::hash() const noexcept {
  std::uint64_t h = fnv1a(to_string(mode_));
  for (const auto& name : feature_names()) {
    h = splitmix64(h ^ fnv1a(name));
  }
  return h;
}

namespace {

std::vector<std::string> top_k(const std::map<std::string, std::size_t>& counts,
                               std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(),
                                                         counts.end());
  const auto n = std::min(k, items.size());
  std::partial_sort(items.begin(), items.begin() + n, items.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(items[i].first));
  return out;
}

}  // namespace

FeatureSpec build_feature_spec(std::span<const Segment> train,
                               std::size_t top_words, std::size_t top_rhythms,
                               FeatureMode mode) {
  if (train.empty()) {
    throw DataError("cannot induce features from an empty training set");
  }
  if (top_words < 1 || top_rhythms < 1) {
    throw ConstraintError("top-words and top-rhythms must be >= 1");
  }
  std::map<std::string, std::size_t> word_counts;
  std::map<std::string, std::size_t> rhythm_counts;
  for (const auto& seg : train) {
    for (const auto* line : seg.lines) {
      if (mode != FeatureMode::kRhythm) {
        for (const auto& t : line->tokens) ++word_counts[t];
      }
      if (mode != FeatureMode::kWords && line->stress) {
        ++rhythm_counts[line->stress->to_string()];
      }
    }
  }
  return FeatureSpec(top_k(word_counts, top_words),
                     top_k(rhythm_counts, top_rhythms), mode);
}

FeatureVector vectorize(const Segment& s, const FeatureSpec& spec) {
  const auto n_words = spec.words().size();
  FeatureVector v(spec.dimension(), 0.0);
  std::size_t tokens = 0;
  std::size_t annotated = 0;
  for (const auto* line : s.lines) {
    tokens += line->tokens.size();
    if (n_words > 0) {
      for (const auto& t : line->tokens) {
        const int i = spec.word_index(t);
        if (i >= 0) v[i] += 1.0;
      }
    }
    if (line->stress) {
      ++annotated;
      if (!spec.rhythm_types().empty()) {
        const int j = spec.rhythm_index(line->stress->to_string());
        if (j >= 0) v[n_words + j] += 1.0;
      }
    }
  }
  if (tokens > 0) {
    for (std::size_t i = 0; i < n_words; ++i) v[i] /= tokens;
  }
  if (annotated > 0) {
    for (std::size_t j = n_words; j < v.size(); ++j) v[j] /= annotated;
  }
  return v;
}

std::vector<Segment> segment_scenes(const Play& p, std::size_t min_lines) {
  std::vector<Segment> out;
  for (const auto& scene : p.scenes) {
    if (scene.lines.size() < min_lines) continue;
    Segment seg;
    seg.lines.reserve(scene.lines.size());
    for (const auto& l : scene.lines) seg.lines.push_back(&l);
    seg.label = scene.author_label;
    seg.play_id = p.play_id;
    seg.descriptor = fmt::format("{}.{}", scene.act, scene.scene);
    seg.act = scene.act;
    seg.scene = scene.scene;
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<Segment> segment_scenes(const Corpus& c, std::size_t min_lines) {
  std::vector<Segment> out;
  for (const auto& p : c.plays) {
    auto part = segment_scenes(p, min_lines);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

void write_feature_csv(std::ostream& out, std::span<const Segment> segments,
                       const FeatureSpec& spec) {
  out << "play_id,segment,label";
  for (const auto& name : spec.feature_names()) out << ',' << csv_field(name);
  out << '\n';
  for (const auto& seg : segments) {
    out << csv_field(seg.play_id) << ',' << csv_field(seg.descriptor) << ','
        << csv_field(seg.label.value_or("?"));
    for (double x : vectorize(seg, spec)) out << ',' << format_real(x);
    out << '\n';
  }
}

}  // namespace rollattr
