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

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rollattr/stress.hpp"

namespace rollattr {

using AuthorId = std::string;

// Act 0 holds the prologue (scene 0) and the epilogue (scene 99).
inline constexpr int kPrologueScene = 0;
inline constexpr int kEpilogueScene = 99;

struct VerseLine {
  std::string play_id;
  int act = 0;
  int scene = 0;
  int index_in_play = 1;
  std::string text;
  std::vector<std::string> tokens;
  std::optional<StressPattern> stress;
};

struct Scene {
  int act = 0;
  int scene = 0;
  std::vector<VerseLine> lines;
  std::optional<AuthorId> author_label;
};

struct Play {
  std::string play_id;
  std::optional<AuthorId> author_label;
  std::vector<Scene> scenes;

  std::size_t line_count() const noexcept;
  // Lines in play order across scene boundaries.
  std::vector<const VerseLine*> lines() const;
};

struct Corpus {
  std::vector<Play> plays;
  std::set<AuthorId> authors;

  const Play* find(std::string_view play_id) const noexcept;
  const Play& at(std::string_view play_id) const;  // throws DataError
};

// Lowercased maximal letter runs; an apostrophe between two letters stays
// inside the token. Everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

// Reads the 7-column corpus TSV:
//   play_id  author  act  scene  line_index  text  stress
// author is '?' when unknown, stress is '-' when unannotated, lines starting
// with '#' are comments. Throws ParseError with 1-based line/column.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::string& path);

// Inverse of parse_corpus. Throws DataError if a field cannot be represented.
void write_corpus(std::ostream& out, const Corpus& c);

// Builds a Corpus from plays, filling the author set and checking invariants.
Corpus make_corpus(std::vector<Play> plays);

struct SceneRef {
  std::string play_id;
  int act = 0;
  int scene = 0;
  std::size_t line_count = 0;

  friend bool operator==(const SceneRef&, const SceneRef&) = default;
};

struct ValidationReport {
  std::vector<SceneRef> excluded_scenes;
  std::vector<std::string> unlabeled_plays;
  std::size_t unannotated_lines = 0;
  std::size_t total_lines = 0;
  // Unannotated lines are only a problem when no lexicon can fill them in.
  bool lexicon_configured = false;

  bool clean() const noexcept {
    return excluded_scenes.empty() &&
           (lexicon_configured || unannotated_lines == 0);
  }
};

ValidationReport validate_corpus(const Corpus& c, std::size_t min_lines,
                                 bool lexicon_configured = false);

}  // namespace rollattr
