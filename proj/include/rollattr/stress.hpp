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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rollattr {

// Stressed (1) / unstressed (0) syllables of one verse line, first syllable
// first. At most 32 syllables.
class StressPattern {
 public:
  static constexpr std::size_t kMaxSyllables = 32;

  StressPattern() = default;

  // Parses a '0'/'1' string of length 1..32; throws DataError otherwise.
  static StressPattern parse(std::string_view bits);
  // Same as parse but returns nullopt instead of throwing.
  static std::optional<StressPattern> try_parse(std::string_view bits) noexcept;

  // Appends one syllable; throws DataError past kMaxSyllables.
  void push_back(bool stressed);

  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }
  bool operator[](std::size_t i) const noexcept { return (bits_ >> i) & 1U; }

  std::string to_string() const;

  friend bool operator==(const StressPattern&, const StressPattern&) = default;

 private:
  std::uint32_t bits_ = 0;
  std::uint8_t length_ = 0;
};

// Categorical versification feature: the pattern's '0'/'1' rendering.
struct RhythmicType {
  std::string key;

  friend auto operator<=>(const RhythmicType&, const RhythmicType&) = default;
};

RhythmicType rhythmic_type(const StressPattern& p);

}  // namespace rollattr
