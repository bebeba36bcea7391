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

#include "privsynth/orchestrator/dataset.h"

#include <cmath>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/png_io.h"

namespace privsynth::orchestrator {

namespace fs = std::filesystem;
using imaging::BitMask;
using imaging::RasterImage;

namespace {

std::string MaskKey(int target_index) {
  return absl::StrCat("t", target_index + 1);
}

absl::StatusOr<int> ParseMaskKey(const std::string& key,
                                 const std::string& path) {
  int index = 0;
  if (key.size() < 2 || key[0] != 't' ||
      !absl::SimpleAtoi(absl::string_view(key).substr(1), &index) ||
      index < 1) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(path, ": bad mask key '", key, "'"));
  }
  return index - 1;
}

Json ProvenanceToJson(const SampleProvenance& p) {
  return Json{{"prompt", p.prompt},
              {"background_prompt", p.background_prompt},
              {"strategy", p.strategy},
              {"seed", p.seed},
              {"source", p.source}};
}

absl::StatusOr<SampleProvenance> ProvenanceFromJson(const Json& doc,
                                                    const std::string& path) {
  SampleProvenance p;
  PRIVSYNTH_ASSIGN_OR_RETURN(p.prompt, GetString(doc, "prompt", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(p.background_prompt,
                             GetString(doc, "background_prompt", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(p.strategy, GetString(doc, "strategy", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(p.seed, GetUint(doc, "seed", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(p.source, GetString(doc, "source", path));
  return p;
}

Json HeaderToJson(const SyntheticDataset& dataset) {
  return Json{{"task", std::string(sanitizer::TaskKindName(dataset.task))},
              {"classes", dataset.class_names},
              {"preference", dataset.preference},
              {"plan", dataset.plan},
              {"seed", dataset.seed}};
}

absl::Status HeaderFromJson(const Json& doc, SyntheticDataset& dataset) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string task, GetString(doc, "task", ""));
  auto kind = sanitizer::ParseTaskKind(task);
  if (!kind.ok()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("task: ", ToStd(kind.status().message())));
  }
  dataset.task = *kind;
  PRIVSYNTH_ASSIGN_OR_RETURN(dataset.class_names,
                             GetStringArray(doc, "classes", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(dataset.preference,
                             GetString(doc, "preference", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(dataset.plan, GetString(doc, "plan", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(dataset.seed, GetUint(doc, "seed", ""));
  return absl::OkStatus();
}

absl::StatusOr<int> ClassIdOf(const SyntheticDataset& dataset,
                              const std::string& name,
                              const std::string& path) {
  for (size_t i = 0; i < dataset.class_names.size(); ++i) {
    if (dataset.class_names[i] == name) return static_cast<int>(i);
  }
  return MakeError(ErrorKind::kSchemaViolation,
                   absl::StrCat(path, ": unknown class '", name, "'"));
}

absl::Status CheckBoxes(const SyntheticDataset& dataset,
                        const SyntheticSample& sample,
                        const std::string& path) {
  for (const auto& b : sample.boxes) {
    if (b.class_id < 0 ||
        b.class_id >= static_cast<int>(dataset.class_names.size()) ||
        b.box.x < 0 || b.box.y < 0 || b.box.w < 1 || b.box.h < 1 ||
        b.box.x + b.box.w > sample.image.width() ||
        b.box.y + b.box.h > sample.image.height()) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(path, ": box out of range"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

std::vector<size_t> SyntheticDataset::ClassCounts() const {
  std::vector<size_t> counts(class_names.size(), 0);
  for (const auto& sample : samples) {
    if (task == sanitizer::TaskKind::kClassification) {
      if (sample.class_id >= 0 &&
          sample.class_id < static_cast<int>(counts.size())) {
        ++counts[sample.class_id];
      }
    } else {
      for (const auto& box : sample.boxes) {
        if (box.class_id >= 0 && box.class_id < static_cast<int>(counts.size())) {
          ++counts[box.class_id];
        }
      }
    }
  }
  return counts;
}

std::vector<std::string> ClassNamesFor(const sanitizer::UserRequest& request) {
  if (request.task_kind == sanitizer::TaskKind::kDetection &&
      request.label_classes.empty()) {
    return request.target_objects;
  }
  return request.label_classes;
}

RasterImage SampleRoleCanvas(const SyntheticSample& sample,
                             sanitizer::SegmentRole role) {
  const int w = sample.image.width();
  const int h = sample.image.height();
  BitMask mask(w, h);
  if (role.is_target()) {
    auto it = sample.target_masks.find(role.target_index);
    if (it != sample.target_masks.end()) mask = it->second;
  } else {
    BitMask covered(w, h);
    for (const auto& [index, target] : sample.target_masks) {
      covered = *covered.Union(target);
    }
    mask = covered.Complement();
  }
  auto canvas = imaging::ApplyMask(sample.image, mask);
  return canvas.ok() ? *canvas : RasterImage(w, h, sample.image.format());
}

std::string FormatYoloLabel(const LabeledBox& box, int image_width,
                            int image_height) {
  const double cx = (box.box.x + box.box.w / 2.0) / image_width;
  const double cy = (box.box.y + box.box.h / 2.0) / image_height;
  return absl::StrFormat("%d %.6f %.6f %.6f %.6f", box.class_id, cx, cy,
                         static_cast<double>(box.box.w) / image_width,
                         static_cast<double>(box.box.h) / image_height);
}

absl::StatusOr<LabeledBox> ParseYoloLabel(std::string_view line,
                                          int image_width, int image_height) {
  std::vector<absl::string_view> fields =
      absl::StrSplit(absl::string_view(line.data(), line.size()), ' ',
                     absl::SkipEmpty());
  double values[4];
  LabeledBox out;
  if (fields.size() != 5 || !absl::SimpleAtoi(fields[0], &out.class_id)) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("bad label line '", ToStd(line), "'"));
  }
  for (int i = 0; i < 4; ++i) {
    if (!absl::SimpleAtod(fields[i + 1], &values[i])) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat("bad label line '", ToStd(line), "'"));
    }
  }
  const int w = static_cast<int>(std::lround(values[2] * image_width));
  const int h = static_cast<int>(std::lround(values[3] * image_height));
  out.box = {static_cast<int>(std::lround(values[0] * image_width - w / 2.0)),
             static_cast<int>(std::lround(values[1] * image_height - h / 2.0)),
             w, h};
  return out;
}

absl::Status WriteDataset(const SyntheticDataset& dataset, const fs::path& dir) {
  std::error_code ec;
  for (const char* sub : {"images", "masks", "labels"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) {
      return MakeError(ErrorKind::kIo,
                       absl::StrCat("cannot create ", (dir / sub).string(),
                                    ": ", ec.message()));
    }
  }
  Json samples = Json::array();
  const bool detection = dataset.task == sanitizer::TaskKind::kDetection;
  for (size_t i = 0; i < dataset.samples.size(); ++i) {
    const SyntheticSample& sample = dataset.samples[i];
    const std::string stem = absl::StrFormat("%05d", i);
    const std::string file = absl::StrCat("images/", stem, ".png");
    PRIVSYNTH_RETURN_IF_ERROR(imaging::WritePng(dir / file, sample.image));
    Json masks = Json::object();
    for (const auto& [index, mask] : sample.target_masks) {
      const std::string mask_file =
          absl::StrCat("masks/", stem, "_", MaskKey(index), ".png");
      PRIVSYNTH_RETURN_IF_ERROR(imaging::WriteMaskPng(dir / mask_file, mask));
      masks[MaskKey(index)] = mask_file;
    }
    Json record = {{"file", file},
                   {"masks", masks},
                   {"provenance", ProvenanceToJson(sample.provenance)}};
    if (detection) {
      std::string lines;
      for (const auto& box : sample.boxes) {
        absl::StrAppend(&lines,
                        FormatYoloLabel(box, sample.image.width(),
                                        sample.image.height()),
                        "\n");
      }
      const std::string label_file = absl::StrCat("labels/", stem, ".txt");
      PRIVSYNTH_RETURN_IF_ERROR(WriteTextFile(dir / label_file, lines));
      record["labels"] = label_file;
    } else {
      record["label"] = dataset.class_names.at(sample.class_id);
    }
    samples.push_back(std::move(record));
  }
  Json doc = HeaderToJson(dataset);
  doc["samples"] = std::move(samples);
  return WriteJsonFile(dir / "dataset.json", doc);
}

absl::StatusOr<SyntheticDataset> ReadDataset(const fs::path& dir) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(dir / "dataset.json"));
  SyntheticDataset dataset;
  PRIVSYNTH_RETURN_IF_ERROR(HeaderFromJson(doc, dataset));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* samples, GetArray(doc, "samples", ""));
  for (size_t i = 0; i < samples->size(); ++i) {
    const Json& record = (*samples)[i];
    const std::string path = IndexPath("samples", i);
    SyntheticSample sample;
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string file, GetString(record, "file", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(sample.image, imaging::ReadPng(dir / file));
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* masks,
                               GetObject(record, "masks", path));
    for (const auto& [key, value] : masks->items()) {
      PRIVSYNTH_ASSIGN_OR_RETURN(int index, ParseMaskKey(key, path));
      if (!value.is_string()) {
        return MakeError(ErrorKind::kSchemaViolation,
                         absl::StrCat(path, ".masks.", key, ": expected a path"));
      }
      PRIVSYNTH_ASSIGN_OR_RETURN(
          BitMask mask, imaging::ReadMaskPng(dir / value.get<std::string>()));
      sample.target_masks.emplace(index, std::move(mask));
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* provenance,
                               GetObject(record, "provenance", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(
        sample.provenance,
        ProvenanceFromJson(*provenance, JoinPath(path, "provenance")));
    if (dataset.task == sanitizer::TaskKind::kDetection) {
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string label_file,
                                 GetString(record, "labels", path));
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string text,
                                 ReadTextFile(dir / label_file));
      for (absl::string_view line : absl::StrSplit(text, '\n', absl::SkipEmpty())) {
        auto box = ParseYoloLabel(ToStd(line), sample.image.width(),
                                  sample.image.height());
        if (!box.ok()) return Annotate(box.status(), label_file);
        sample.boxes.push_back(*box);
      }
      PRIVSYNTH_RETURN_IF_ERROR(CheckBoxes(dataset, sample, path));
    } else {
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string label,
                                 GetString(record, "label", path));
      PRIVSYNTH_ASSIGN_OR_RETURN(sample.class_id,
                                 ClassIdOf(dataset, label, path));
    }
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

absl::StatusOr<Json> DatasetToJson(const SyntheticDataset& dataset) {
  Json samples = Json::array();
  for (const auto& sample : dataset.samples) {
    Json masks = Json::object();
    for (const auto& [index, mask] : sample.target_masks) {
      PRIVSYNTH_ASSIGN_OR_RETURN(
          masks[MaskKey(index)],
          imaging::EncodePngBase64(imaging::MaskToImage(mask)));
    }
    Json boxes = Json::array();
    for (const auto& b : sample.boxes) {
      boxes.push_back({{"class_id", b.class_id},
                       {"x", b.box.x},
                       {"y", b.box.y},
                       {"w", b.box.w},
                       {"h", b.box.h}});
    }
    Json record = {{"masks", masks},
                   {"objects", boxes},
                   {"class_id", sample.class_id},
                   {"provenance", ProvenanceToJson(sample.provenance)}};
    PRIVSYNTH_ASSIGN_OR_RETURN(record["png_base64"],
                               imaging::EncodePngBase64(sample.image));
    samples.push_back(std::move(record));
  }
  Json doc = HeaderToJson(dataset);
  doc["samples"] = std::move(samples);
  return doc;
}

absl::StatusOr<SyntheticDataset> DatasetFromJson(const Json& doc) {
  if (!doc.is_object()) {
    return MakeError(ErrorKind::kSchemaViolation, "dataset: expected an object");
  }
  SyntheticDataset dataset;
  PRIVSYNTH_RETURN_IF_ERROR(HeaderFromJson(doc, dataset));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* samples, GetArray(doc, "samples", ""));
  for (size_t i = 0; i < samples->size(); ++i) {
    const Json& record = (*samples)[i];
    const std::string path = IndexPath("samples", i);
    SyntheticSample sample;
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string data,
                               GetString(record, "png_base64", path));
    auto image = imaging::DecodePngBase64(data);
    if (!image.ok()) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(path, ".png_base64: ",
                                    ToStd(image.status().message())));
    }
    sample.image = std::move(*image);
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* masks,
                               GetObject(record, "masks", path));
    for (const auto& [key, value] : masks->items()) {
      PRIVSYNTH_ASSIGN_OR_RETURN(int index, ParseMaskKey(key, path));
      auto mask = value.is_string()
                      ? imaging::DecodePngBase64(value.get<std::string>())
                      : absl::StatusOr<RasterImage>(MakeError(
                            ErrorKind::kSchemaViolation, "expected a string"));
      if (!mask.ok()) {
        return MakeError(ErrorKind::kSchemaViolation,
                         absl::StrCat(path, ".masks.", key, ": ",
                                      ToStd(mask.status().message())));
      }
      sample.target_masks.emplace(index, imaging::ImageToMask(*mask));
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(int64_t class_id,
                               GetInt(record, "class_id", path));
    sample.class_id = static_cast<int>(class_id);
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* boxes,
                               GetArray(record, "objects", path));
    for (size_t j = 0; j < boxes->size(); ++j) {
      const std::string box_path = IndexPath(JoinPath(path, "objects"), j);
      LabeledBox b;
      PRIVSYNTH_ASSIGN_OR_RETURN(int64_t cls,
                                 GetInt((*boxes)[j], "class_id", box_path));
      PRIVSYNTH_ASSIGN_OR_RETURN(int64_t x, GetInt((*boxes)[j], "x", box_path));
      PRIVSYNTH_ASSIGN_OR_RETURN(int64_t y, GetInt((*boxes)[j], "y", box_path));
      PRIVSYNTH_ASSIGN_OR_RETURN(int64_t w, GetInt((*boxes)[j], "w", box_path));
      PRIVSYNTH_ASSIGN_OR_RETURN(int64_t h, GetInt((*boxes)[j], "h", box_path));
      b.class_id = static_cast<int>(cls);
      b.box = {static_cast<int>(x), static_cast<int>(y), static_cast<int>(w),
               static_cast<int>(h)};
      sample.boxes.push_back(b);
    }
    if (dataset.task == sanitizer::TaskKind::kClassification &&
        (sample.class_id < 0 ||
         sample.class_id >= static_cast<int>(dataset.class_names.size()))) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(path, ".class_id: out of range"));
    }
    PRIVSYNTH_RETURN_IF_ERROR(CheckBoxes(dataset, sample, path));
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* provenance,
                               GetObject(record, "provenance", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(
        sample.provenance,
        ProvenanceFromJson(*provenance, JoinPath(path, "provenance")));
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

}  // namespace privsynth::orchestrator
