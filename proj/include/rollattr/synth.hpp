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
#include <string>
#include <utility>
#include <vector>

#include "rollattr/corpus.hpp"
#include "rollattr/random.hpp"

namespace rollattr {

using WeightedItems = std::vector<std::pair<std::string, double>>;

// Generative author model: i.i.d. tokens and one stress pattern per line.
struct AuthorProfile {
  AuthorId name;
  WeightedItems vocabulary;
  WeightedItems rhythms;  // '0'/'1' pattern strings
  std::size_t min_tokens = 6;
  std::size_t max_tokens = 10;

  // Rescales both distributions to sum to 1. Throws DataError on empty
  // support, non-positive or non-finite weights, bad patterns, or
  // min_tokens > max_tokens.
  void normalize();
};

// Zipf-weighted profile over `vocab_size` pseudo-words and `n_rhythms`
// distinct stress patterns.
AuthorProfile zipf_profile(AuthorId name, std::size_t vocab_size,
                           std::size_t n_rhythms, Rng& rng);

// Same support as base, each weight scaled by exp(spread * z), z ~ N(0,1).
// spread is the distance dial: 0 copies base.
AuthorProfile perturbed_profile(const AuthorProfile& base, AuthorId name,
                                double spread, Rng& rng);

// (1 - lambda) * a + lambda * b over the union of supports; named after a.
AuthorProfile mix_profiles(const AuthorProfile& a, const AuthorProfile& b,
                           double lambda);

// Fully labeled play, scenes grouped five per act.
Play generate_play(const AuthorProfile& p, const std::string& play_id,
                   std::size_t scenes, std::size_t lines_per_scene, Rng& rng);

struct MixedPlay {
  Play play;                         // author label unknown ("?")
  std::vector<AuthorId> line_truth;  // per line, play order
};

// Authorship alternates a, b, a, ... starting at each switch line (1-based,
// strictly ascending, each in (1, total_lines)).
MixedPlay generate_mixed_play(const AuthorProfile& a, const AuthorProfile& b,
                              const std::vector<std::size_t>& switch_lines,
                              std::size_t total_lines,
                              std::size_t lines_per_scene,
                              const std::string& play_id, Rng& rng);

// Corpus synthesis from a JSON config:
// {
//   "profiles": [
//     {"name": "A", "vocabulary": {"word": 2.0, ...},
//      "rhythms": {"0101010101": 1.0, ...}, "line_length": [6, 10]},
//     {"name": "B", "generate": {"base_seed": 1, "vocab_size": 400,
//      "rhythms": 40, "spread": 0.5}, "line_length": [6, 10]}
//   ],
//   "plays": [{"id": "A1", "author": "A", "scenes": 20,
//              "lines_per_scene": 30}],
//   "mixed": [{"id": "M1", "authors": ["A", "B"], "switch_lines": [301],
//              "total_lines": 600, "lines_per_scene": 50}]
// }
// Generated profiles sharing a base_seed share their base distribution;
// "seed" (default: derived from the name) drives the perturbation.
struct SynthOutput {
  Corpus corpus;
  std::vector<std::pair<std::string, std::vector<AuthorId>>> truth;
};
SynthOutput synthesize(std::istream& config, std::uint64_t seed);

// line_index<TAB>author per line of a mixed play.
void write_truth(std::ostream& out, const Play& play,
                 const std::vector<AuthorId>& line_truth);

}  // namespace rollattr
