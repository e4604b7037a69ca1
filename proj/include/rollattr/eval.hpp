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
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rollattr/corpus.hpp"
#include "rollattr/features.hpp"
#include "rollattr/random.hpp"
#include "rollattr/svm.hpp"

namespace rollattr {

inline constexpr std::size_t kDefaultIterations = 30;
inline constexpr std::size_t kDefaultMinLines = 10;

struct EvalConfig {
  std::size_t iterations = kDefaultIterations;
  std::size_t top_words = kDefaultTopWords;
  std::size_t top_rhythms = kDefaultTopRhythms;
  FeatureMode mode = FeatureMode::kCombined;
  SvmOptions svm;
  std::size_t min_lines = kDefaultMinLines;
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;
  // Test hook, called once per trained model with the held-out play and the
  // balanced training segments. Must be thread-safe when jobs > 1.
  std::function<void(const std::string&, std::span<const Segment>)> on_train;
};

struct VoteRow {
  std::string play_id;
  int act = 0;
  int scene = 0;
  std::optional<AuthorId> truth;
  std::map<AuthorId, std::size_t> votes;

  std::size_t total() const noexcept;
  // Author with most votes; ties go to the lexicographically first.
  AuthorId majority() const;
};

struct VoteTable {
  FeatureMode mode = FeatureMode::kCombined;
  std::size_t iterations = 0;
  std::vector<AuthorId> authors;
  std::vector<VoteRow> rows;                // corpus order
  std::map<std::string, double> accuracy;  // labeled held-out plays only
  std::size_t ties = 0;             // argmax ties resolved by author order
  std::size_t unconverged_fits = 0;  // SVMs that hit the pass cap
};

// Subsamples every author down to the smallest author's count. Selection is
// uniform without replacement and keeps the input order. Unlabeled samples
// are rejected with DataError.
std::vector<Segment> balance_classes(std::span<const Segment> samples,
                                     Rng& rng);

// One ensemble member: the balanced pool's feature spec and model.
struct IterationModel {
  FeatureSpec spec;
  CalibratedModel model;
};

struct TrainSettings {
  std::size_t top_words = kDefaultTopWords;
  std::size_t top_rhythms = kDefaultTopRhythms;
  FeatureMode mode = FeatureMode::kCombined;
  SvmOptions svm;
};

// Balance, induce features on the balanced pool, train. Deterministic in seed.
IterationModel train_iteration(std::span<const Segment> pool,
                               const TrainSettings& settings,
                               std::uint64_t seed,
                               std::vector<Segment>* balanced_out = nullptr);

// Every labeled play in turn is held out and its scenes classified by models
// trained on the scenes of all other labeled plays.
VoteTable leave_one_play_out(const Corpus& c, const EvalConfig& cfg);

// Classifies the scenes of one (possibly unlabeled) play with models trained
// on all other labeled plays.
VoteTable attribute_scenes(const Corpus& c, const std::string& target_play,
                           const EvalConfig& cfg);

// play_id,act,scene,truth,<author votes...>,majority
void write_vote_csv(std::ostream& out, const VoteTable& t);

// play_id,author,<one accuracy column per table, in the given order>
void write_accuracy_csv(std::ostream& out, std::span<const VoteTable> tables,
                        const Corpus& c);

}  // namespace rollattr
