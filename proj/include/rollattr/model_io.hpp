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

#include "rollattr/svm.hpp"

namespace rollattr {

inline constexpr int kModelFormatVersion = 1;

// JSON document:
// {"format":"rollattr-model","version":1,"classes":[...],
//  "feature_hash":"<16 hex digits>",
//  "models":[{"class":..,"weights":[..],"bias":..,"C":..,
//             "converged":..,"platt":{"A":..,"B":..}}]}
// Doubles are written with round-trip precision.
void save_model(std::ostream& out, const CalibratedModel& m);
CalibratedModel load_model(std::istream& in);  // throws DataError

}  // namespace rollattr
