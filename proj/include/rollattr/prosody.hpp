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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rollattr/corpus.hpp"
#include "rollattr/stress.hpp"

namespace rollattr {

// Word -> stress bits, loaded from `token<TAB>bits` lines. Entries with the
// single bit "0" form the function-word set.
class StressLexicon {
 public:
  StressLexicon() = default;

  static StressLexicon parse(std::istream& in);
  static StressLexicon load(const std::string& path);

  // Throws DataError on a malformed bit string.
  void add(const std::string& token, std::string_view bits);

  const StressPattern* find(const std::string& token) const;
  bool is_function_word(const std::string& token) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::unordered_map<std::string, StressPattern> entries_;
};

// Orthographic vowel-group count, used only to decide whether a word missing
// from the lexicon is a monosyllable.
std::size_t estimate_syllables(const std::string& token);

// Stress of a tokenized line. Lexicon entries win; function words are 0;
// unlisted monosyllables are 1; an unlisted polysyllable makes the whole line
// unknown (nullopt). Throws DataError past 32 syllables.
std::optional<StressPattern> annotate_line(std::span<const std::string> tokens,
                                           const StressLexicon& lex);

struct AnnotationStats {
  std::size_t annotated = 0;
  std::size_t unknown = 0;
  std::size_t preexisting = 0;
};

// Copy of c with missing stress filled from the lexicon. Precomputed stress
// is kept as-is.
Corpus annotate_corpus(const Corpus& c, const StressLexicon& lex,
                       AnnotationStats* stats = nullptr);

}  // namespace rollattr
