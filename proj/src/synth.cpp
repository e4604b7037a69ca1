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

#include "rollattr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "rollattr/error.hpp"

namespace rollattr {

namespace {

class DiscreteSampler {
 public:
  explicit DiscreteSampler(const WeightedItems& items) {
    double acc = 0.0;
    cumulative_.reserve(items.size());
    for (const auto& [item, w] : items) {
      acc += w;
      cumulative_.push_back(acc);
    }
  }

  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

double standard_normal(Rng& rng) {
  // Box-Muller; 1 - uniform() is in (0, 1].
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string pseudo_word(std::size_t i) {
  static constexpr std::string_view kConsonants = "bdfghklmnprstvwz";
  static constexpr std::string_view kVowels = "aeiou";
  const std::size_t n_syl = kConsonants.size() * kVowels.size();
  auto syllable = [&](std::size_t s) {
    return std::string{kConsonants[s / kVowels.size()],
                       kVowels[s % kVowels.size()]};
  };
  std::string w = syllable(i % n_syl) + syllable((i / n_syl) % n_syl);
  for (std::size_t rest = i / (n_syl * n_syl); rest > 0; rest /= n_syl) {
    w += syllable(rest % n_syl);
  }
  return w;
}

void normalize_items(WeightedItems& items, const char* what,
                     const AuthorId& name) {
  if (items.empty()) {
    throw DataError(fmt::format("profile '{}' has an empty {} distribution",
                                name, what));
  }
  double total = 0.0;
  for (const auto& [item, w] : items) {
    if (!std::isfinite(w) || w <= 0.0) {
      throw DataError(fmt::format("profile '{}': {} weight of '{}' must be "
                                  "positive and finite",
                                  name, what, item));
    }
    total += w;
  }
  for (auto& [item, w] : items) w /= total;
}

}  // namespace

void AuthorProfile::normalize() {
  normalize_items(vocabulary, "vocabulary", name);
  normalize_items(rhythms, "rhythm", name);
  for (const auto& [pattern, w] : rhythms) {
    if (!StressPattern::try_parse(pattern)) {
      throw DataError(fmt::format("profile '{}': '{}' is not a stress pattern",
                                  name, pattern));
    }
  }
  for (const auto& [word, w] : vocabulary) {
    const auto t = tokenize(word);
    if (t.size() != 1 || t.front() != word) {
      throw DataError(fmt::format("profile '{}': '{}' is not a single "
                                  "lowercase token",
                                  name, word));
    }
  }
  if (min_tokens < 1 || min_tokens > max_tokens) {
    throw DataError(fmt::format("profile '{}': line length range [{}, {}] is "
                                "invalid",
                                name, min_tokens, max_tokens));
  }
}

AuthorProfile zipf_profile(AuthorId name, std::size_t vocab_size,
                           std::size_t n_rhythms, Rng& rng) {
  AuthorProfile p;
  p.name = std::move(name);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    p.vocabulary.emplace_back(pseudo_word(i), 1.0 / static_cast<double>(i + 1));
  }
  std::set<std::string> seen;
  while (seen.size() < n_rhythms) {
    const std::size_t len = 10 + rng.below(2);
    std::string bits(len, '0');
    for (auto& b : bits) b = rng.below(2) ? '1' : '0';
    if (seen.insert(bits).second) {
      p.rhythms.emplace_back(bits, 1.0 / static_cast<double>(seen.size()));
    }
  }
  p.normalize();
  return p;
}

AuthorProfile perturbed_profile(const AuthorProfile& base, AuthorId name,
                                double spread, Rng& rng) {
  AuthorProfile p = base;
  p.name = std::move(name);
  for (auto& [item, w] : p.vocabulary) w *= std::exp(spread * standard_normal(rng));
  for (auto& [item, w] : p.rhythms) w *= std::exp(spread * standard_normal(rng));
  p.normalize();
  return p;
}

AuthorProfile mix_profiles(const AuthorProfile& a, const AuthorProfile& b,
                           double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DataError(fmt::format("mixing coefficient {} outside [0, 1]",
                                lambda));
  }
  auto mix = [&](const WeightedItems& x, const WeightedItems& y) {
    std::map<std::string, double> acc;
    for (const auto& [item, w] : x) acc[item] += (1.0 - lambda) * w;
    for (const auto& [item, w] : y) acc[item] += lambda * w;
    WeightedItems out;
    for (const auto& [item, w] : acc) {
      if (w > 0.0) out.emplace_back(item, w);
    }
    return out;
  };
  AuthorProfile p;
  p.name = a.name;
  p.vocabulary = mix(a.vocabulary, b.vocabulary);
  p.rhythms = mix(a.rhythms, b.rhythms);
  p.min_tokens = a.min_tokens;
  p.max_tokens = a.max_tokens;
  p.normalize();
  return p;
}

namespace {

VerseLine sample_line(const AuthorProfile& p, const DiscreteSampler& words,
                      const DiscreteSampler& rhythms, Rng& rng) {
  VerseLine l;
  const std::size_t n_tokens =
      p.min_tokens + rng.below(p.max_tokens - p.min_tokens + 1);
  for (std::size_t t = 0; t < n_tokens; ++t) {
    const auto& w = p.vocabulary[words.sample(rng)].first;
    if (t) l.text += ' ';
    l.text += w;
    l.tokens.push_back(w);
  }
  l.stress = StressPattern::parse(p.rhythms[rhythms.sample(rng)].first);
  return l;
}

void check_profile(const AuthorProfile& p) {
  if (p.vocabulary.empty() || p.rhythms.empty()) {
    throw DataError(fmt::format("profile '{}' has an empty distribution",
                                p.name));
  }
}

}  // namespace

Play generate_play(const AuthorProfile& p, const std::string& play_id,
                   std::size_t scenes, std::size_t lines_per_scene, Rng& rng) {
  check_profile(p);
  if (scenes < 1 || lines_per_scene < 1) {
    throw DataError("scenes and lines_per_scene must be >= 1");
  }
  const DiscreteSampler words(p.vocabulary);
  const DiscreteSampler rhythms(p.rhythms);
  Play play{play_id, p.name, {}};
  int index = 1;
  for (std::size_t s = 0; s < scenes; ++s) {
    Scene scene{static_cast<int>(s / 5 + 1), static_cast<int>(s % 5 + 1), {},
                p.name};
    for (std::size_t i = 0; i < lines_per_scene; ++i) {
      VerseLine l = sample_line(p, words, rhythms, rng);
      l.play_id = play_id;
      l.act = scene.act;
      l.scene = scene.scene;
      l.index_in_play = index++;
      scene.lines.push_back(std::move(l));
    }
    play.scenes.push_back(std::move(scene));
  }
  return play;
}

MixedPlay generate_mixed_play(const AuthorProfile& a, const AuthorProfile& b,
                              const std::vector<std::size_t>& switch_lines,
                              std::size_t total_lines,
                              std::size_t lines_per_scene,
                              const std::string& play_id, Rng& rng) {
  check_profile(a);
  check_profile(b);
  if (total_lines < 1 || lines_per_scene < 1) {
    throw DataError("total_lines and lines_per_scene must be >= 1");
  }
  for (std::size_t i = 0; i < switch_lines.size(); ++i) {
    if (i > 0 && switch_lines[i] <= switch_lines[i - 1]) {
      throw DataError("switch lines must be strictly ascending");
    }
    if (switch_lines[i] <= 1 || switch_lines[i] >= total_lines) {
      throw DataError(fmt::format("switch line {} outside (1, {})",
                                  switch_lines[i], total_lines));
    }
  }
  const DiscreteSampler words_a(a.vocabulary), rhythms_a(a.rhythms);
  const DiscreteSampler words_b(b.vocabulary), rhythms_b(b.rhythms);

  MixedPlay out;
  out.play.play_id = play_id;
  std::size_t next_switch = 0;
  bool use_b = false;
  for (std::size_t line = 1; line <= total_lines; ++line) {
    if (next_switch < switch_lines.size() && line == switch_lines[next_switch]) {
      use_b = !use_b;
      ++next_switch;
    }
    const std::size_t s = (line - 1) / lines_per_scene;
    if (out.play.scenes.size() <= s) {
      out.play.scenes.push_back(Scene{static_cast<int>(s / 5 + 1),
                                      static_cast<int>(s % 5 + 1),
                                      {},
                                      std::nullopt});
    }
    VerseLine l = use_b ? sample_line(b, words_b, rhythms_b, rng)
                        : sample_line(a, words_a, rhythms_a, rng);
    l.play_id = play_id;
    l.act = out.play.scenes.back().act;
    l.scene = out.play.scenes.back().scene;
    l.index_in_play = static_cast<int>(line);
    out.play.scenes.back().lines.push_back(std::move(l));
    out.line_truth.push_back(use_b ? b.name : a.name);
  }
  return out;
}

namespace {

using nlohmann::json;

WeightedItems items_from_json(const json& j) {
  WeightedItems out;
  for (const auto& [key, value] : j.items()) {
    out.emplace_back(key, value.get<double>());
  }
  return out;
}

}  // namespace

SynthOutput synthesize(std::istream& config, std::uint64_t seed) {
  try {
    const json doc = json::parse(config);
    std::map<AuthorId, AuthorProfile> profiles;
    for (const auto& jp : doc.at("profiles")) {
      AuthorProfile p;
      const auto name = jp.at("name").get<std::string>();
      if (jp.contains("generate")) {
        const auto& g = jp.at("generate");
        const auto base_seed = g.value("base_seed", std::uint64_t{1});
        Rng base_rng(base_seed);
        const auto base = zipf_profile(name, g.value("vocab_size", 400),
                                       g.value("rhythms", 40), base_rng);
        Rng rng(jp.value("seed", derive_seed(base_seed, name, 1)));
        p = perturbed_profile(base, name, g.value("spread", 0.5), rng);
      } else {
        p.name = name;
        p.vocabulary = items_from_json(jp.at("vocabulary"));
        p.rhythms = items_from_json(jp.at("rhythms"));
      }
      if (jp.contains("line_length")) {
        const auto range = jp.at("line_length").get<std::vector<std::size_t>>();
        if (range.size() != 2) throw DataError("line_length needs [min, max]");
        p.min_tokens = range[0];
        p.max_tokens = range[1];
      }
      p.normalize();
      if (!profiles.emplace(name, std::move(p)).second) {
        throw DataError(fmt::format("duplicate profile '{}'", name));
      }
    }
    auto profile = [&](const std::string& name) -> const AuthorProfile& {
      auto it = profiles.find(name);
      if (it == profiles.end()) {
        throw DataError(fmt::format("unknown profile '{}'", name));
      }
      return it->second;
    };

    SynthOutput out;
    std::vector<Play> plays;
    for (const auto& jp : doc.value("plays", json::array())) {
      const auto id = jp.at("id").get<std::string>();
      Rng rng(derive_seed(seed, id, 0));
      plays.push_back(generate_play(profile(jp.at("author").get<std::string>()),
                                    id, jp.at("scenes").get<std::size_t>(),
                                    jp.at("lines_per_scene").get<std::size_t>(),
                                    rng));
    }
    for (const auto& jm : doc.value("mixed", json::array())) {
      const auto id = jm.at("id").get<std::string>();
      const auto authors = jm.at("authors").get<std::vector<std::string>>();
      if (authors.size() != 2) {
        throw DataError(fmt::format("mixed play '{}' needs exactly two authors",
                                    id));
      }
      Rng rng(derive_seed(seed, id, 0));
      auto mixed = generate_mixed_play(
          profile(authors[0]), profile(authors[1]),
          jm.value("switch_lines", std::vector<std::size_t>{}),
          jm.at("total_lines").get<std::size_t>(),
          jm.value("lines_per_scene", std::size_t{50}), id, rng);
      out.truth.emplace_back(id, std::move(mixed.line_truth));
      plays.push_back(std::move(mixed.play));
    }
    out.corpus = make_corpus(std::move(plays));
    return out;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed synth config: {}", e.what()));
  }
}

void write_truth(std::ostream& out, const Play& play,
                 const std::vector<AuthorId>& line_truth) {
  const auto lines = play.lines();
  if (lines.size() != line_truth.size()) {
    throw DataError(fmt::format("{} truth labels for {} lines",
                                line_truth.size(), lines.size()));
  }
  out << "# line_index\tauthor\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out << lines[i]->index_in_play << '\t' << line_truth[i] << '\n';
  }
}

}  // namespace rollattr
