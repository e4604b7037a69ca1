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

#include "rollattr/corpus.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "rollattr/error.hpp"

namespace rollattr {

ParseError::ParseError(std::size_t line, std::size_t column,
                       const std::string& what)
    : DataError(fmt::format("line {}, column {}: {}", line, column, what)),
      line_(line),
      column_(column) {}

namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one UTF-8 sequence at s[i], advancing i. Malformed input yields
// U+FFFD and consumes one byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kInvalid;
  }
  if (i + len > s.size()) {
    ++i;
    return kInvalid;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Latin, Greek and Cyrillic letters. Other scripts are treated as separators.
bool is_letter(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
  if (c >= 0xC0 && c <= 0x24F) return c != 0xD7 && c != 0xF7;
  if (c >= 0x370 && c <= 0x3FF) return c != 0x37E && c != 0x387;
  if (c >= 0x400 && c <= 0x4FF) return c < 0x482 || c > 0x489;
  if (c >= 0x1E00 && c <= 0x1EFF) return true;
  return false;
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 32;
  if (c >= 0x100 && c <= 0x137) return c | 1;
  if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if ((c >= 0x1E00 && c <= 0x1E95) || (c >= 0x1EA0 && c <= 0x1EFF)) {
    return c | 1;
  }
  return c;
}

bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2019; }

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

int parse_int(std::string_view field, int min_value, std::size_t line,
              std::size_t column, const char* name) {
  int value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(line, column,
                     fmt::format("{} '{}' is not an integer", name, field));
  }
  if (value < min_value) {
    throw ParseError(line, column,
                     fmt::format("{} {} is below {}", name, value, min_value));
  }
  return value;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  // An apostrophe seen right after a letter, not yet known to be internal.
  bool pending_apostrophe = false;

  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
    pending_apostrophe = false;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = decode_utf8(text, i);
    if (is_letter(c)) {
      if (pending_apostrophe) {
        current.push_back('\'');
        pending_apostrophe = false;
      }
      append_utf8(current, to_lower(c));
    } else if (is_apostrophe(c) && !current.empty() && !pending_apostrophe) {
      pending_apostrophe = true;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::size_t Play::line_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : scenes) n += s.lines.size();
  return n;
}

std::vector<const VerseLine*> Play::lines() const {
  std::vector<const VerseLine*> out;
  out.reserve(line_count());
  for (const auto& s : scenes) {
    for (const auto& l : s.lines) out.push_back(&l);
  }
  return out;
}

const Play* Corpus::find(std::string_view play_id) const noexcept {
  for (const auto& p : plays) {
    if (p.play_id == play_id) return &p;
  }
  return nullptr;
}

const Play& Corpus::at(std::string_view play_id) const {
  if (const auto* p = find(play_id)) return *p;
  throw DataError(fmt::format("play '{}' not found in corpus", play_id));
}

Corpus parse_corpus(std::istream& in) {
  std::vector<Play> plays;
  std::unordered_map<std::string, std::size_t> play_index;
  std::unordered_set<int> seen_indices;
  std::map<std::pair<int, int>, bool> seen_scenes;
  int prev_index = 0;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_tabs(line);
    if (fields.size() != 7) {
      throw ParseError(line_no, std::min<std::size_t>(fields.size(), 7) + 1,
                       fmt::format("expected 7 tab-separated fields, got {}",
                                   fields.size()));
    }
    const auto play_id = fields[0];
    const auto author = fields[1];
    if (play_id.empty()) throw ParseError(line_no, 1, "empty play_id");
    if (author.empty()) throw ParseError(line_no, 2, "empty author");
    const int act = parse_int(fields[2], 0, line_no, 3, "act");
    const int scene = parse_int(fields[3], 0, line_no, 4, "scene");
    const int index = parse_int(fields[4], 1, line_no, 5, "line_index");

    std::optional<StressPattern> stress;
    if (fields[6] != "-") {
      stress = StressPattern::try_parse(fields[6]);
      if (!stress) {
        throw ParseError(line_no, 7,
                         fmt::format("stress '{}' is not a bit string of "
                                     "length 1..{}",
                                     fields[6], StressPattern::kMaxSyllables));
      }
    }

    std::optional<AuthorId> label;
    if (author != "?") label = AuthorId(author);

    const std::string pid(play_id);
    auto it = play_index.find(pid);
    if (it == play_index.end()) {
      play_index.emplace(pid, plays.size());
      plays.push_back(Play{pid, label, {}});
      seen_indices.clear();
      seen_scenes.clear();
      prev_index = 0;
    } else if (it->second + 1 != plays.size()) {
      throw ParseError(line_no, 1,
                       fmt::format("records of play '{}' are not contiguous",
                                   pid));
    }
    Play& play = plays.back();
    if (play.author_label != label) {
      throw ParseError(line_no, 2,
                       fmt::format("author '{}' disagrees with earlier records "
                                   "of play '{}'",
                                   author, pid));
    }
    if (!seen_indices.insert(index).second) {
      throw ParseError(line_no, 5,
                       fmt::format("duplicate line_index {} in play '{}'",
                                   index, pid));
    }
    if (prev_index != 0 && index != prev_index + 1) {
      throw ParseError(line_no, 5,
                       fmt::format("line_index {} does not follow {}", index,
                                   prev_index));
    }
    prev_index = index;

    if (play.scenes.empty() || play.scenes.back().act != act ||
        play.scenes.back().scene != scene) {
      if (seen_scenes.count({act, scene})) {
        throw ParseError(line_no, 4,
                         fmt::format("scene {}.{} of play '{}' reappears after "
                                     "another scene",
                                     act, scene, pid));
      }
      seen_scenes[{act, scene}] = true;
      play.scenes.push_back(Scene{act, scene, {}, label});
    }

    VerseLine vl;
    vl.play_id = pid;
    vl.act = act;
    vl.scene = scene;
    vl.index_in_play = index;
    vl.text = std::string(fields[5]);
    vl.tokens = tokenize(vl.text);
    vl.stress = stress;
    play.scenes.back().lines.push_back(std::move(vl));
  }
  return make_corpus(std::move(plays));
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open corpus '{}'", path));
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& c) {
  out << "# play_id\tauthor\tact\tscene\tline_index\ttext\tstress\n";
  for (const auto& play : c.plays) {
    const std::string author = play.author_label.value_or("?");
    for (const auto& scene : play.scenes) {
      for (const auto& l : scene.lines) {
        if (l.text.find_first_of("\t\r\n") != std::string::npos) {
          throw DataError(fmt::format(
              "line {} of play '{}' contains a tab or newline",
              l.index_in_play, play.play_id));
        }
        out << play.play_id << '\t' << author << '\t' << l.act << '\t'
            << l.scene << '\t' << l.index_in_play << '\t' << l.text << '\t'
            << (l.stress ? l.stress->to_string() : std::string("-")) << '\n';
      }
    }
  }
}

Corpus make_corpus(std::vector<Play> plays) {
  Corpus c;
  std::unordered_set<std::string> ids;
  for (const auto& play : plays) {
    if (!ids.insert(play.play_id).second) {
      throw DataError(fmt::format("duplicate play '{}'", play.play_id));
    }
    std::map<std::pair<int, int>, bool> keys;
    for (const auto& scene : play.scenes) {
      if (scene.lines.empty()) {
        throw DataError(fmt::format("scene {}.{} of play '{}' has no lines",
                                    scene.act, scene.scene, play.play_id));
      }
      if (!keys.emplace(std::pair{scene.act, scene.scene}, true).second) {
        throw DataError(fmt::format("duplicate scene {}.{} in play '{}'",
                                    scene.act, scene.scene, play.play_id));
      }
      for (const auto& l : scene.lines) {
        if (l.play_id != play.play_id) {
          throw DataError(fmt::format("line {} belongs to '{}', not '{}'",
                                      l.index_in_play, l.play_id,
                                      play.play_id));
        }
      }
    }
    if (play.author_label) c.authors.insert(*play.author_label);
  }
  c.plays = std::move(plays);
  return c;
}

ValidationReport validate_corpus(const Corpus& c, std::size_t min_lines,
                                 bool lexicon_configured) {
  if (min_lines < 1) throw ConstraintError("min_lines must be >= 1");
  ValidationReport r;
  r.lexicon_configured = lexicon_configured;
  for (const auto& play : c.plays) {
    if (!play.author_label) r.unlabeled_plays.push_back(play.play_id);
    for (const auto& scene : play.scenes) {
      if (scene.lines.size() < min_lines) {
        r.excluded_scenes.push_back(
            {play.play_id, scene.act, scene.scene, scene.lines.size()});
      }
      for (const auto& l : scene.lines) {
        ++r.total_lines;
        if (!l.stress) ++r.unannotated_lines;
      }
    }
  }
  return r;
}

}  // namespace rollattr
