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

// Deterministic text output helpers shared by the CSV and SVG writers.

#include <string>
#include <string_view>
#include <vector>

namespace rollattr {

// Nine significant digits, "%.9g".
std::string format_real(double x);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

// Splits one CSV record (no embedded newlines) honoring double quotes.
std::vector<std::string> split_csv_record(std::string_view line);

}  // namespace rollattr
