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

#include "privsynth/experiment/corpus.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "privsynth/common/json_util.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/imaging/png_io.h"
#include "privsynth/mock/world.h"

namespace privsynth::experiment {

using imaging::BitMask;
using imaging::RasterImage;
using mock::Rgb;
using sanitizer::SegmentRole;
using sanitizer::TaskKind;

namespace {

Rgb IdentityColor(uint64_t seed) {
  return mock::WordColor(absl::StrCat("identity-", seed));
}

// A room: textured wall plus two flat-ish pieces of furniture.
RasterImage Room(int w, int h, uint64_t seed, const Rgb& wall) {
  RasterImage room = mock::Texture(w, h, DeriveSeed(seed, {0}), wall, 0.45);
  for (uint64_t k = 1; k <= 2; ++k) {
    const uint64_t s = DeriveSeed(seed, {k});
    const int bw = w / 4 + static_cast<int>(s % (w / 4));
    const int bh = h / 5 + static_cast<int>((s >> 8) % (h / 4));
    const int bx = static_cast<int>((s >> 16) % (w - bw));
    const int by = h - bh - static_cast<int>((s >> 24) % (h / 6));
    BitMask block(w, h);
    for (int y = by; y < by + bh; ++y) {
      for (int x = bx; x < bx + bw; ++x) block.set(x, y, true);
    }
    const Rgb shade = mock::Mix(wall, {40, 30, 20}, 0.3 + 0.25 * k);
    room = *imaging::Composite(
        mock::Texture(w, h, DeriveSeed(s, {5}), shade, 0.2), block, room);
  }
  return room;
}

struct Scene {
  RasterImage image;
  BitMask target;
};

Scene MakeScene(const CorpusOptions& options, uint64_t seed, const Rgb& wall,
                const Rgb& target_color) {
  const int w = options.width;
  const int h = options.height;
  Scene scene;
  scene.image = Room(w, h, DeriveSeed(seed, {1}), wall);
  // Shrink the blob for detection so it reads as an object in a room.
  BitMask blob = mock::BlobMask(w, h, DeriveSeed(seed, {2}));
  if (options.task == TaskKind::kDetection) {
    const imaging::PixelBox box = imaging::TightBox(blob);
    const BitMask small = imaging::ResizeNearest(imaging::Crop(blob, box),
                                                 std::max(1, box.w / 2),
                                                 std::max(1, box.h / 2));
    const uint64_t s = DeriveSeed(seed, {3});
    const int ox = static_cast<int>(s % (w - small.width() + 1));
    const int oy = static_cast<int>((s >> 20) % (h - small.height() + 1));
    blob = BitMask(w, h);
    for (int y = 0; y < small.height(); ++y) {
      for (int x = 0; x < small.width(); ++x) {
        if (small.at(x, y)) blob.set(ox + x, oy + y, true);
      }
    }
  }
  scene.target = blob;
  scene.image = *imaging::Composite(
      mock::Texture(w, h, DeriveSeed(seed, {4}), target_color, 0.35), blob,
      scene.image);
  return scene;
}

}  // namespace

sanitizer::UserRequest CorpusRequest(TaskKind task) {
  sanitizer::UserRequest request;
  if (task == TaskKind::kClassification) {
    request.target_objects = {"dog"};
    request.background = "a living room";
    request.training_objective = "classify what my dog is doing";
    request.label_classes = {"eating", "sitting", "sleeping", "playing"};
  } else {
    request.target_objects = {"pill bottle"};
    request.background = "a bedroom";
    request.training_objective = "detect my pill bottle";
    request.task_kind = TaskKind::kDetection;
  }
  return request;
}

absl::StatusOr<Corpus> MakeCorpus(const CorpusOptions& options) {
  if (options.reference_images <= 0 || options.test_images <= 0 ||
      options.width < 16 || options.height < 16) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "corpus needs images and at least 16x16 pixels");
  }
  Corpus corpus;
  corpus.request = CorpusRequest(options.task);
  const auto& request = corpus.request;
  const Rgb wall = mock::Mix(mock::ConceptColor(request.background),
                             IdentityColor(DeriveSeed(options.seed, {1})), 0.6);
  const Rgb identity = mock::Mix(mock::ConceptColor(request.target_objects[0]),
                                 IdentityColor(DeriveSeed(options.seed, {2})),
                                 0.6);
  const int classes = static_cast<int>(request.label_classes.size());
  auto target_color = [&](int class_id) {
    if (class_id < 0) return identity;
    return mock::Mix(identity,
                     mock::WordColor(request.label_classes[class_id]), 0.4);
  };

  for (int i = 0; i < options.reference_images; ++i) {
    const int class_id = classes > 0 ? i % classes : -1;
    const Scene scene = MakeScene(
        options, DeriveSeed(options.seed, {10, static_cast<uint64_t>(i)}),
        wall, target_color(class_id));
    const std::string name = absl::StrFormat("ref_%03d.png", i);
    corpus.images.push_back({name, scene.image});
    corpus.manifest.entries.push_back(
        {name, {{SegmentRole::Target(0), scene.target, 0.95}}});
  }

  auto& test = corpus.test_set;
  test.task = options.task;
  test.class_names = orchestrator::ClassNamesFor(request);
  test.preference = "real";
  test.seed = options.seed;
  const int total =
      classes > 0 ? options.test_images * classes : options.test_images;
  for (int k = 0; k < total; ++k) {
    const int class_id = classes > 0 ? k / options.test_images : -1;
    const uint64_t seed =
        DeriveSeed(options.seed, {20, static_cast<uint64_t>(k)});
    const Scene scene =
        MakeScene(options, seed, wall, target_color(class_id));
    orchestrator::SyntheticSample sample;
    sample.image = scene.image;
    sample.class_id = class_id;
    sample.target_masks[0] = scene.target;
    if (classes == 0) {
      sample.boxes.push_back({0, imaging::TightBox(scene.target)});
    }
    sample.provenance.seed = seed;
    sample.provenance.source = "real";
    test.samples.push_back(std::move(sample));
  }
  return corpus;
}

absl::Status WriteCorpus(const Corpus& corpus,
                         const std::filesystem::path& dir) {
  PRIVSYNTH_RETURN_IF_ERROR(
      WriteJsonFile(dir / "request.json", sanitizer::RequestToJson(corpus.request)));
  for (const auto& image : corpus.images) {
    PRIVSYNTH_RETURN_IF_ERROR(
        imaging::WritePng(dir / "images" / image.name, image.image));
  }
  PRIVSYNTH_RETURN_IF_ERROR(sanitizer::WriteManifest(
      corpus.manifest, dir / "manifest.json", corpus.request.target_count()));
  return orchestrator::WriteDataset(corpus.test_set, dir / "test");
}

absl::StatusOr<sanitizer::UserRequest> ReadRequestFile(
    const std::filesystem::path& path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(path));
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::UserRequest request,
                             sanitizer::RequestFromJson(doc));
  PRIVSYNTH_RETURN_IF_ERROR(sanitizer::ValidateRequest(request));
  return request;
}

absl::StatusOr<Corpus> ReadCorpus(const std::filesystem::path& dir) {
  Corpus corpus;
  PRIVSYNTH_ASSIGN_OR_RETURN(corpus.request,
                             ReadRequestFile(dir / "request.json"));
  PRIVSYNTH_ASSIGN_OR_RETURN(corpus.manifest,
                             sanitizer::ReadManifest(dir / "manifest.json"));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      corpus.images,
      sanitizer::LoadReferenceImages(dir / "images", corpus.manifest));
  if (std::filesystem::exists(dir / "test")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(corpus.test_set,
                               orchestrator::ReadDataset(dir / "test"));
  }
  return corpus;
}

}  // namespace privsynth::experiment
