// Copyright 2026 The Privsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privsynth/metrics/embedding.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"
#include "privsynth/metrics/summation.h"

namespace privsynth::metrics {
namespace {

absl::Status CheckShape(const EmbeddingVector& v) {
  if (v.dimension <= 0 || static_cast<size_t>(v.dimension) != v.values.size()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("embedding from '", v.provider_id,
                                  "' declares dimension ", v.dimension,
                                  " but has ", v.values.size(), " values"));
  }
  return absl::OkStatus();
}

absl::Status CheckCompatible(const std::vector<EmbeddingVector>& p,
                             const std::vector<EmbeddingVector>& q) {
  if (p.empty() || q.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "SIM needs non-empty embedding sets");
  }
  const EmbeddingVector& first = p.front();
  for (const auto* set : {&p, &q}) {
    for (const auto& v : *set) {
      PRIVSYNTH_RETURN_IF_ERROR(CheckShape(v));
      if (v.provider_id != first.provider_id ||
          v.dimension != first.dimension) {
        return MakeError(
            ErrorKind::kIncompatibleEmbeddings,
            absl::StrCat("embedding ", v.provider_id, "/", v.dimension,
                         " does not match ", first.provider_id, "/",
                         first.dimension));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> Cosine(const EmbeddingVector& a,
                              const EmbeddingVector& b) {
  PRIVSYNTH_RETURN_IF_ERROR(CheckShape(a));
  PRIVSYNTH_RETURN_IF_ERROR(CheckShape(b));
  if (a.provider_id != b.provider_id || a.dimension != b.dimension) {
    return MakeError(ErrorKind::kIncompatibleEmbeddings,
                     absl::StrCat("cannot compare ", a.provider_id, "/",
                                  a.dimension, " with ", b.provider_id, "/",
                                  b.dimension));
  }
  CompensatedSum dot;
  CompensatedSum norm_a;
  CompensatedSum norm_b;
  for (size_t i = 0; i < a.values.size(); ++i) {
    dot.Add(a.values[i] * b.values[i]);
    norm_a.Add(a.values[i] * a.values[i]);
    norm_b.Add(b.values[i] * b.values[i]);
  }
  if (norm_a.Total() <= 0.0 || norm_b.Total() <= 0.0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "cosine similarity of a zero embedding");
  }
  const double cosine =
      dot.Total() / (std::sqrt(norm_a.Total()) * std::sqrt(norm_b.Total()));
  return std::clamp(cosine, -1.0, 1.0);
}

absl::StatusOr<double> Sim(const std::vector<EmbeddingVector>& p,
                           const std::vector<EmbeddingVector>& q,
                           SimMode mode) {
  PRIVSYNTH_RETURN_IF_ERROR(CheckCompatible(p, q));
  CompensatedSum sum;
  size_t pairs = 0;
  if (mode == SimMode::kMatched) {
    if (p.size() != q.size()) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("matched SIM needs equal set sizes, got ",
                                    p.size(), " and ", q.size()));
    }
    for (size_t i = 0; i < p.size(); ++i) {
      PRIVSYNTH_ASSIGN_OR_RETURN(double c, Cosine(p[i], q[i]));
      sum.Add(c);
      ++pairs;
    }
  } else {
    for (const auto& a : p) {
      for (const auto& b : q) {
        PRIVSYNTH_ASSIGN_OR_RETURN(double c, Cosine(a, b));
        sum.Add(c);
        ++pairs;
      }
    }
  }
  return sum.Total() / static_cast<double>(pairs);
}

absl::StatusOr<PromptSimilarity> PromptSim(
    const EmbeddingVector& prompt,
    const std::vector<EmbeddingVector>& private_images,
    const EmbeddingVector& baseline) {
  PromptSimilarity out;
  PRIVSYNTH_ASSIGN_OR_RETURN(out.value, Sim({prompt}, private_images));
  PRIVSYNTH_ASSIGN_OR_RETURN(out.baseline, Sim({baseline}, private_images));
  return out;
}

Json EmbeddingTableToJson(const EmbeddingTable& table) {
  Json doc = Json::object();
  for (const auto& [name, v] : table) {
    doc[name] = {{"provider_id", v.provider_id},
                 {"dimension", v.dimension},
                 {"values", v.values}};
  }
  return doc;
}

absl::StatusOr<EmbeddingTable> EmbeddingTableFromJson(const Json& doc) {
  if (!doc.is_object()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     "embedding file: expected an object");
  }
  EmbeddingTable table;
  for (const auto& [name, record] : doc.items()) {
    EmbeddingVector v;
    PRIVSYNTH_ASSIGN_OR_RETURN(v.provider_id,
                               GetString(record, "provider_id", name));
    PRIVSYNTH_ASSIGN_OR_RETURN(int64_t dimension,
                               GetInt(record, "dimension", name));
    v.dimension = static_cast<int>(dimension);
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* values,
                               GetArray(record, "values", name));
    for (size_t i = 0; i < values->size(); ++i) {
      if (!(*values)[i].is_number()) {
        return MakeError(ErrorKind::kSchemaViolation,
                         absl::StrCat(IndexPath(JoinPath(name, "values"), i),
                                      ": expected a number"));
      }
      v.values.push_back((*values)[i].get<double>());
    }
    if (static_cast<size_t>(v.dimension) != v.values.size()) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(name, ": dimension ", v.dimension,
                                    " but ", v.values.size(), " values"));
    }
    table.emplace(name, std::move(v));
  }
  return table;
}

absl::Status WriteEmbeddingFile(const std::filesystem::path& path,
                                const EmbeddingTable& table) {
  return WriteJsonFile(path, EmbeddingTableToJson(table));
}

absl::StatusOr<EmbeddingTable> ReadEmbeddingFile(
    const std::filesystem::path& path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(path));
  return EmbeddingTableFromJson(doc);
}

std::vector<EmbeddingVector> SelectByPrefix(const EmbeddingTable& table,
                                            std::string_view prefix) {
  std::vector<EmbeddingVector> out;
  for (auto it = table.lower_bound(std::string(prefix)); it != table.end();
       ++it) {
    if (!absl::StartsWith(it->first, absl::string_view(prefix.data(),
                                                       prefix.size()))) {
      break;
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace privsynth::metrics
