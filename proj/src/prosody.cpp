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

#include "rollattr/prosody.hpp"

#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "rollattr/error.hpp"

namespace rollattr {

std::optional<StressPattern> StressPattern::try_parse(
    std::string_view bits) noexcept {
  if (bits.empty() || bits.size() > kMaxSyllables) return std::nullopt;
  StressPattern p;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      p.bits_ |= std::uint32_t{1} << i;
    } else if (bits[i] != '0') {
      return std::nullopt;
    }
  }
  p.length_ = static_cast<std::uint8_t>(bits.size());
  return p;
}

StressPattern StressPattern::parse(std::string_view bits) {
  if (auto p = try_parse(bits)) return *p;
  throw DataError(fmt::format(
      "'{}' is not a stress bit string of length 1..{}", bits, kMaxSyllables));
}

void StressPattern::push_back(bool stressed) {
  if (length_ >= kMaxSyllables) {
    throw DataError(fmt::format("line exceeds {} syllables", kMaxSyllables));
  }
  if (stressed) bits_ |= std::uint32_t{1} << length_;
  ++length_;
}

std::string StressPattern::to_string() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

RhythmicType rhythmic_type(const StressPattern& p) { return {p.to_string()}; }

StressLexicon StressLexicon::parse(std::istream& in) {
  StressLexicon lex;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 ||
        line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(line_no, 1, "expected 'token<TAB>stress_bits'");
    }
    const auto bits = line.substr(tab + 1);
    const auto tokens = tokenize(line.substr(0, tab));
    if (tokens.size() != 1) {
      throw ParseError(line_no, 1,
                       fmt::format("'{}' is not a single word token",
                                   line.substr(0, tab)));
    }
    if (!StressPattern::try_parse(bits)) {
      throw ParseError(line_no, 2,
                       fmt::format("'{}' is not a stress bit string", bits));
    }
    lex.add(tokens.front(), bits);
  }
  return lex;
}

StressLexicon StressLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open lexicon '{}'", path));
  return parse(in);
}

void StressLexicon::add(const std::string& token, std::string_view bits) {
  entries_.insert_or_assign(token, StressPattern::parse(bits));
}

const StressPattern* StressLexicon::find(const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

bool StressLexicon::is_function_word(const std::string& token) const {
  const auto* p = find(token);
  return p && p->size() == 1 && !(*p)[0];
}

std::size_t estimate_syllables(const std::string& token) {
  auto vowel = [](unsigned char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' ||
           c == 'y' || c >= 0x80;
  };
  std::size_t groups = 0;
  bool in_group = false;
  for (unsigned char c : token) {
    // Non-ASCII bytes are treated as vowels.
    const bool v = vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const auto n = token.size();
  // Silent final e ("time"), but not syllabic "-le" ("single").
  if (groups > 1 && n >= 2 && token[n - 1] == 'e' && !vowel(token[n - 2]) &&
      !(n >= 3 && token[n - 2] == 'l' && !vowel(token[n - 3]))) {
    --groups;
  }
  return groups == 0 ? 1 : groups;
}

std::optional<StressPattern> annotate_line(std::span<const std::string> tokens,
                                           const StressLexicon& lex) {
  StressPattern out;
  auto append = [&](bool stressed) {
    if (out.size() >= StressPattern::kMaxSyllables) {
      throw DataError(fmt::format("line exceeds {} syllables",
                                  StressPattern::kMaxSyllables));
    }
    out.push_back(stressed);
  };
  for (const auto& tok : tokens) {
    if (const auto* entry = lex.find(tok)) {
      for (std::size_t i = 0; i < entry->size(); ++i) append((*entry)[i]);
    } else if (estimate_syllables(tok) == 1) {
      append(true);
    } else {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

Corpus annotate_corpus(const Corpus& c, const StressLexicon& lex,
                       AnnotationStats* stats) {
  Corpus out = c;
  AnnotationStats local;
  for (auto& play : out.plays) {
    for (auto& scene : play.scenes) {
      for (auto& line : scene.lines) {
        if (line.stress) {
          ++local.preexisting;
          continue;
        }
        if (line.tokens.empty()) {
          ++local.unknown;
          continue;
        }
        line.stress = annotate_line(line.tokens, lex);
        ++(line.stress ? local.annotated : local.unknown);
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace rollattr
