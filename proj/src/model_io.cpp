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

#include "rollattr/model_io.hpp"

#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "rollattr/error.hpp"

namespace rollattr {

using nlohmann::json;

void save_model(std::ostream& out, const CalibratedModel& m) {
  json doc;
  doc["format"] = "rollattr-model";
  doc["version"] = kModelFormatVersion;
  doc["classes"] = m.classes;
  doc["feature_hash"] = fmt::format("{:016x}", m.feature_hash);
  json models = json::array();
  for (std::size_t k = 0; k < m.models.size(); ++k) {
    const auto& lm = m.models[k];
    models.push_back({{"class", m.classes[k]},
                      {"weights", lm.weights},
                      {"bias", lm.bias},
                      {"C", lm.C},
                      {"converged", lm.converged},
                      {"platt", {{"A", m.platt[k].A}, {"B", m.platt[k].B}}}});
  }
  doc["models"] = std::move(models);
  out << doc.dump(1) << '\n';
}

CalibratedModel load_model(std::istream& in) {
  try {
    const json doc = json::parse(in);
    if (doc.at("format") != "rollattr-model") {
      throw DataError("not a rollattr model document");
    }
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError(fmt::format("unsupported model version {}", version));
    }
    CalibratedModel m;
    m.classes = doc.at("classes").get<std::vector<AuthorId>>();
    m.feature_hash =
        std::stoull(doc.at("feature_hash").get<std::string>(), nullptr, 16);
    for (const auto& jm : doc.at("models")) {
      LinearModel lm;
      lm.weights = jm.at("weights").get<std::vector<double>>();
      lm.bias = jm.at("bias").get<double>();
      lm.C = jm.at("C").get<double>();
      lm.converged = jm.at("converged").get<bool>();
      m.models.push_back(std::move(lm));
      m.platt.push_back(
          {jm.at("platt").at("A").get<double>(), jm.at("platt").at("B").get<double>()});
    }
    const bool shape_ok =
        m.classes.size() >= 2 &&
        (m.models.size() == m.classes.size() ||
         (m.classes.size() == 2 && m.models.size() == 1));
    if (!shape_ok) {
      throw DataError(fmt::format("{} models for {} classes", m.models.size(),
                                  m.classes.size()));
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed model document: {}", e.what()));
  } catch (const std::logic_error&) {
    throw DataError("malformed feature_hash in model document");
  }
}

}  // namespace rollattr
