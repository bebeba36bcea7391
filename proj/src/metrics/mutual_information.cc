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

#include "privsynth/metrics/mutual_information.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "privsynth/common/json_util.h"
#include "privsynth/common/parallel.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/imaging/png_io.h"
#include "privsynth/metrics/summation.h"

namespace privsynth::metrics {

namespace fs = std::filesystem;
using imaging::RasterImage;
using sanitizer::SegmentRole;

Histogram256 Histogram256::Of(const RasterImage& image) {
  const RasterImage gray = imaging::ToGrayscale(image);
  Histogram256 histogram;
  for (uint8_t value : gray.samples()) ++histogram.counts[value];
  histogram.total = gray.samples().size();
  return histogram;
}

double EntropyBits(const RasterImage& image) {
  const Histogram256 histogram = Histogram256::Of(image);
  const double n = static_cast<double>(histogram.total);
  CompensatedSum sum;
  for (uint64_t count : histogram.counts) {
    if (count == 0) continue;
    const double c = static_cast<double>(count);
    sum.Add(c / n * std::log2(n / c));
  }
  return sum.Total();
}

absl::StatusOr<double> ImageMiBits(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("MI needs equal sizes, got ", a.width(), "x",
                                  a.height(), " and ", b.width(), "x",
                                  b.height()));
  }
  const RasterImage ga = imaging::ToGrayscale(a);
  const RasterImage gb = imaging::ToGrayscale(b);
  std::vector<uint64_t> joint(256 * 256, 0);
  std::array<uint64_t, 256> count_a{};
  std::array<uint64_t, 256> count_b{};
  const auto& sa = ga.samples();
  const auto& sb = gb.samples();
  for (size_t i = 0; i < sa.size(); ++i) {
    ++joint[static_cast<size_t>(sa[i]) * 256 + sb[i]];
    ++count_a[sa[i]];
    ++count_b[sb[i]];
  }
  const double n = static_cast<double>(sa.size());
  CompensatedSum sum;
  for (int u = 0; u < 256; ++u) {
    if (count_a[u] == 0) continue;
    for (int v = 0; v < 256; ++v) {
      const uint64_t c = joint[static_cast<size_t>(u) * 256 + v];
      if (c == 0) continue;
      const double cuv = static_cast<double>(c);
      const double ratio = cuv * n / (static_cast<double>(count_a[u]) *
                                      static_cast<double>(count_b[v]));
      sum.Add(cuv / n * std::log2(ratio));
    }
  }
  // Exact independence can come out as -1e-17.
  return std::max(0.0, sum.Total());
}

absl::StatusOr<ReferenceSet> ReferenceSet::Build(
    const sanitizer::UserRequest& request,
    const std::vector<sanitizer::ReferenceImage>& images,
    const sanitizer::SegmentationManifest& manifest) {
  ReferenceSet refs;
  refs.request = request;
  for (size_t i = 0; i < images.size(); ++i) {
    const auto* entry = manifest.Find(images[i].name);
    if (entry == nullptr) {
      return MakeError(ErrorKind::kIncompleteSegmentation,
                       absl::StrCat("image ", i, ": no manifest entry for ",
                                    images[i].name));
    }
    auto segments = sanitizer::SplitSegments(images[i].image, *entry, request);
    if (!segments.ok()) {
      return Annotate(segments.status(), absl::StrCat("image ", i));
    }
    Entry out{images[i].name, {}};
    for (auto& segment : *segments) {
      out.canvases.emplace(segment.role, std::move(segment.canvas));
    }
    refs.entries.push_back(std::move(out));
  }
  return refs;
}

absl::Status ReferenceSet::Write(const fs::path& dir) const {
  const int targets = request.target_count();
  Json images = Json::array();
  for (const auto& entry : entries) {
    Json roles = Json::object();
    const std::string stem = fs::path(entry.name).stem().string();
    for (const auto& [role, canvas] : entry.canvases) {
      const std::string key = sanitizer::RoleKey(role, targets);
      const std::string file = absl::StrCat(key, "/", stem, ".png");
      PRIVSYNTH_RETURN_IF_ERROR(imaging::WritePng(dir / file, canvas));
      roles[key] = file;
    }
    images.push_back({{"name", entry.name}, {"roles", roles}});
  }
  return WriteJsonFile(dir / "refs.json",
                       Json{{"request", sanitizer::RequestToJson(request)},
                            {"images", images}});
}

absl::StatusOr<ReferenceSet> ReferenceSet::Read(const fs::path& dir) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(dir / "refs.json"));
  ReferenceSet refs;
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* request, GetObject(doc, "request", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(refs.request,
                             sanitizer::RequestFromJson(*request, "request"));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* images, GetArray(doc, "images", ""));
  for (size_t i = 0; i < images->size(); ++i) {
    const std::string path = IndexPath("images", i);
    Entry entry;
    PRIVSYNTH_ASSIGN_OR_RETURN(entry.name, GetString((*images)[i], "name", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* roles,
                               GetObject((*images)[i], "roles", path));
    for (const auto& [key, file] : roles->items()) {
      auto role = sanitizer::ParseRoleKey(key);
      if (!role.ok() || !file.is_string()) {
        return MakeError(ErrorKind::kSchemaViolation,
                         absl::StrCat(JoinPath(JoinPath(path, "roles"), key),
                                      ": bad role entry"));
      }
      PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage canvas,
                                 imaging::ReadPng(dir / file.get<std::string>()));
      entry.canvases.emplace(*role, std::move(canvas));
    }
    refs.entries.push_back(std::move(entry));
  }
  return refs;
}

absl::StatusOr<double> NormalizedMi(const ReferenceSet& refs,
                                    const sanitizer::SanitizedBundle& bundle,
                                    SegmentRole role,
                                    const MiOptions& options) {
  const size_t n = refs.entries.size();
  if (n == 0) {
    return MakeError(ErrorKind::kInvalidArgument, "empty reference set");
  }
  if (bundle.entries.size() != n) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("reference set has ", n,
                                  " images, bundle has ",
                                  bundle.entries.size()));
  }
  std::vector<double> terms(n, 0.0);
  PRIVSYNTH_RETURN_IF_ERROR(
      ParallelFor(n, options.parallelism, [&](size_t i) -> absl::Status {
        const auto& ref = refs.entries[i];
        const auto& entry = bundle.entries[i];
        if (ref.name != entry.image_name) {
          return MakeError(ErrorKind::kInvalidArgument,
                           absl::StrCat("image ", i, ": reference '", ref.name,
                                        "' vs bundle '", entry.image_name,
                                        "'"));
        }
        auto it = ref.canvases.find(role);
        if (it == ref.canvases.end()) {
          return MakeError(
              ErrorKind::kInvalidArgument,
              absl::StrCat("image ", i, ": no reference canvas for role ",
                           sanitizer::RoleKey(role,
                                              refs.request.target_count())));
        }
        const double entropy = EntropyBits(it->second);
        if (entropy <= 0.0) {
          return MakeError(
              ErrorKind::kDegenerateReference,
              absl::StrCat("image ", i, " (", ref.name, "): reference canvas "
                           "for role ",
                           sanitizer::RoleKey(role, refs.request.target_count()),
                           " is constant"));
        }
        PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage rendered,
                                   sanitizer::RenderBundleCanvas(entry));
        auto mi = ImageMiBits(it->second, rendered);
        if (!mi.ok()) return Annotate(mi.status(), absl::StrCat("image ", i));
        terms[i] = *mi / entropy;
        return absl::OkStatus();
      }));
  CompensatedSum sum;
  for (double term : terms) sum.Add(term);
  return std::clamp(sum.Total() / static_cast<double>(n), 0.0, 1.0);
}

}  // namespace privsynth::metrics
