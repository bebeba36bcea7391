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

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/imaging/png_io.h"
#include "privsynth/sanitizer/manifest.h"
#include "privsynth/sanitizer/preference.h"
#include "privsynth/sanitizer/request.h"
#include "privsynth/sanitizer/sanitize.h"
#include "privsynth/sanitizer/wire.h"

namespace privsynth::sanitizer {
namespace {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;

UserRequest DogRequest() {
  UserRequest request;
  request.target_objects = {"dog"};
  request.background = "bedroom";
  request.training_objective = "classify the dog's posture";
  request.label_classes = {"sitting", "standing", "running", "lying"};
  return request;
}

UserRequest TwoTargetRequest() {
  UserRequest request;
  request.target_objects = {"bottle", "photo frame"};
  request.background = "bedroom";
  request.training_objective = "detect bottles and frames";
  request.task_kind = TaskKind::kDetection;
  return request;
}

RasterImage RandomImage(std::mt19937_64& rng, int w, int h) {
  RasterImage image(w, h, PixelFormat::kRgb8);
  std::uniform_int_distribution<int> byte(1, 255);
  for (auto& s : image.mutable_samples()) s = static_cast<uint8_t>(byte(rng));
  return image;
}

BitMask RectMask(int w, int h, int x0, int y0, int x1, int y1) {
  BitMask mask(w, h);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) mask.set(x, y, true);
  }
  return mask;
}

struct Fixture {
  std::vector<ReferenceImage> images;
  SegmentationManifest manifest;
};

// N random images; target i occupies its own horizontal band.
Fixture MakeFixture(int n, int targets, uint64_t seed, int w = 24, int h = 24) {
  std::mt19937_64 rng(seed);
  Fixture fixture;
  for (int i = 0; i < n; ++i) {
    const std::string name = "img" + std::to_string(i) + ".png";
    fixture.images.push_back({name, RandomImage(rng, w, h)});
    ManifestEntry entry{name, {}};
    for (int t = 0; t < targets; ++t) {
      entry.segments.push_back(
          {SegmentRole::Target(t),
           RectMask(w, h, 2 + i % 3, 2 + t * 8, w - 3, 8 + t * 8), 0.9});
    }
    fixture.manifest.entries.push_back(std::move(entry));
  }
  return fixture;
}

PrivacyPreference Pref(std::string_view text) {
  auto preference = PrivacyPreference::Parse(text);
  EXPECT_TRUE(preference.ok()) << preference.status();
  return *preference;
}

TEST(LevelTest, FormatParseRoundTrip) {
  for (const char* text : {"L0", "L1:canny", "L1:pose", "L1:layout_box", "L2",
                           "L2@5", "L1:canny@10"}) {
    auto level = ParseLevel(text);
    ASSERT_TRUE(level.ok()) << text << " " << level.status();
    EXPECT_EQ(FormatLevel(*level), text);
  }
  auto bare = ParseLevel("L1");
  ASSERT_TRUE(bare.ok());
  EXPECT_EQ(bare->feature, FeatureKind::kCanny);
}

TEST(LevelTest, RejectsInvalidCombinations) {
  EXPECT_FALSE(ParseLevel("L0@5").ok());
  EXPECT_FALSE(ParseLevel("L2:canny").ok());
  EXPECT_FALSE(ParseLevel("L3").ok());
  EXPECT_FALSE(ParseLevel("L2@-1").ok());
  EXPECT_EQ(ErrorKindOf(ParseLevel("L1:sketch").status()),
            ErrorKind::kUnsupportedFeature);
  SanitizationLevel l1_without_feature{Level::kL1, std::nullopt, {}};
  EXPECT_FALSE(l1_without_feature.Validate().ok());
}

TEST(PreferenceTest, ParseAndFormat) {
  PrivacyPreference preference = Pref("t=L2, b=L0");
  EXPECT_EQ(preference.Format(), "t=L2,b=L0");
  EXPECT_TRUE(preference.ValidateFor(DogRequest()).ok());
  PrivacyPreference multi = Pref("t1=L0,t2=L1,b=L2");
  EXPECT_EQ(multi.Format(), "t1=L0,t2=L1:canny,b=L2");
  EXPECT_TRUE(multi.ValidateFor(TwoTargetRequest()).ok());
}

TEST(PreferenceTest, MustBeTotal) {
  EXPECT_FALSE(Pref("t=L2").ValidateFor(DogRequest()).ok());
  EXPECT_FALSE(Pref("t1=L0,b=L0").ValidateFor(TwoTargetRequest()).ok());
  EXPECT_FALSE(Pref("t1=L0,t2=L0,t3=L0,b=L0").ValidateFor(TwoTargetRequest()).ok());
  EXPECT_FALSE(PrivacyPreference::Parse("t=L0,t=L2").ok());
}

TEST(PreferenceTest, ListSplitsOnRepeatedRoleOrSemicolon) {
  auto flat = ParsePreferenceList("t=L0,b=L0,t=L2,b=L0,t=L2,b=L2");
  ASSERT_TRUE(flat.ok()) << flat.status();
  ASSERT_EQ(flat->size(), 3u);
  EXPECT_EQ((*flat)[1].Format(), "t=L2,b=L0");
  auto grouped = ParsePreferenceList("t=L0,b=L0; t=L2@5,b=L0");
  ASSERT_TRUE(grouped.ok());
  ASSERT_EQ(grouped->size(), 2u);
  EXPECT_EQ((*grouped)[1].Format(), "t=L2@5,b=L0");
}

TEST(PreferenceTest, JsonRoundTrip) {
  PrivacyPreference preference = Pref("t1=L1:pose,t2=L2@10,b=L0");
  auto back = PreferenceFromJson(PreferenceToJson(preference), "preference");
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, preference);
}

TEST(RequestTest, Validation) {
  EXPECT_TRUE(ValidateRequest(DogRequest()).ok());
  UserRequest one_class = DogRequest();
  one_class.label_classes = {"sitting"};
  EXPECT_FALSE(ValidateRequest(one_class).ok());
  EXPECT_TRUE(ValidateRequest(TwoTargetRequest()).ok());
  UserRequest no_target = DogRequest();
  no_target.target_objects.clear();
  EXPECT_FALSE(ValidateRequest(no_target).ok());
  auto back = RequestFromJson(RequestToJson(TwoTargetRequest()));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, TwoTargetRequest());
}

TEST(SplitTest, FullTargetMaskGivesZeroBackground) {
  std::mt19937_64 rng(1);
  RasterImage image = RandomImage(rng, 8, 6);
  ManifestEntry entry{"a.png", {{SegmentRole::Target(0), BitMask(8, 6, true)}}};
  auto segments = SplitSegments(image, entry, DogRequest());
  ASSERT_TRUE(segments.ok()) << segments.status();
  ASSERT_EQ(segments->size(), 2u);
  EXPECT_EQ((*segments)[0].canvas, image);
  EXPECT_EQ((*segments)[1].canvas, RasterImage(8, 6, PixelFormat::kRgb8));
}

TEST(SplitTest, EmptyTargetMaskGivesZeroTarget) {
  std::mt19937_64 rng(2);
  RasterImage image = RandomImage(rng, 8, 6);
  ManifestEntry entry{"a.png", {{SegmentRole::Target(0), BitMask(8, 6)}}};
  auto segments = SplitSegments(image, entry, DogRequest());
  ASSERT_TRUE(segments.ok());
  EXPECT_EQ((*segments)[0].canvas, RasterImage(8, 6, PixelFormat::kRgb8));
  EXPECT_EQ((*segments)[1].canvas, image);
}

TEST(SplitTest, UnionOfCanvasesReconstructsImage) {
  Fixture fixture = MakeFixture(3, 2, 3);
  for (size_t i = 0; i < fixture.images.size(); ++i) {
    const RasterImage& image = fixture.images[i].image;
    auto segments = SplitSegments(image, fixture.manifest.entries[i],
                                  TwoTargetRequest());
    ASSERT_TRUE(segments.ok());
    ASSERT_EQ(segments->size(), 3u);
    // Masks partition the canvas, so summing canvases pixelwise must give
    // the source back.
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) {
        int owners = 0;
        for (int c = 0; c < 3; ++c) {
          int sum = 0;
          for (const auto& s : *segments) sum += s.canvas.at(x, y, c);
          ASSERT_EQ(sum, image.at(x, y, c));
        }
        for (const auto& s : *segments) owners += s.mask.at(x, y) ? 1 : 0;
        ASSERT_EQ(owners, 1);
      }
    }
  }
}

TEST(SplitTest, MissingTargetMaskNamesRole) {
  Fixture fixture = MakeFixture(1, 1, 4);
  auto segments = SplitSegments(fixture.images[0].image,
                                fixture.manifest.entries[0], TwoTargetRequest());
  ASSERT_FALSE(segments.ok());
  EXPECT_EQ(ErrorKindOf(segments.status()), ErrorKind::kIncompleteSegmentation);
  EXPECT_NE(segments.status().message().find("t2"), absl::string_view::npos);
  EXPECT_NE(segments.status().message().find("photo frame"),
            absl::string_view::npos);
}

TEST(ManifestTest, NormalizeDerivesBackgroundAndMergesTargets) {
  ManifestEntry entry{
      "a.png",
      {{SegmentRole::Target(0), RectMask(6, 6, 0, 0, 3, 3), 0.8},
       {SegmentRole::Background(), BitMask(6, 6, true), 1.0},
       {SegmentRole::Target(0), RectMask(6, 6, 3, 3, 6, 6), 0.6}}};
  auto normalized = NormalizeEntry(entry, 6, 6, DogRequest());
  ASSERT_TRUE(normalized.ok()) << normalized.status();
  ASSERT_EQ(normalized->segments.size(), 2u);
  const BitMask* target = normalized->MaskFor(SegmentRole::Target(0));
  const BitMask* background = normalized->MaskFor(SegmentRole::Background());
  ASSERT_NE(target, nullptr);
  ASSERT_NE(background, nullptr);
  EXPECT_EQ(target->CountSet(), 18u);
  EXPECT_DOUBLE_EQ(normalized->segments[0].confidence, 0.6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) EXPECT_NE(target->at(x, y), background->at(x, y));
  }
}

TEST(ManifestTest, NormalizeRejectsBadEntries) {
  ManifestEntry wrong_size{"a.png", {{SegmentRole::Target(0), BitMask(5, 6)}}};
  EXPECT_FALSE(NormalizeEntry(wrong_size, 6, 6, DogRequest()).ok());
  ManifestEntry bad_confidence{
      "a.png", {{SegmentRole::Target(0), BitMask(6, 6), 1.5}}};
  EXPECT_FALSE(NormalizeEntry(bad_confidence, 6, 6, DogRequest()).ok());
  ManifestEntry bad_index{"a.png", {{SegmentRole::Target(1), BitMask(6, 6)}}};
  EXPECT_FALSE(NormalizeEntry(bad_index, 6, 6, DogRequest()).ok());
}

TEST(ManifestTest, FileRoundTrip) {
  const auto dir = std::filesystem::path(testing::TempDir()) / "manifest_rt";
  std::filesystem::remove_all(dir);
  Fixture fixture = MakeFixture(2, 2, 5);
  ASSERT_TRUE(WriteManifest(fixture.manifest, dir / "manifest.json", 2).ok());
  auto back = ReadManifest(dir / "manifest.json");
  ASSERT_TRUE(back.ok()) << back.status();
  ASSERT_EQ(back->entries.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back->entries[i].image_name, fixture.manifest.entries[i].image_name);
    ASSERT_EQ(back->entries[i].segments.size(), 2u);
    for (size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(back->entries[i].segments[j].role,
                fixture.manifest.entries[i].segments[j].role);
      EXPECT_EQ(back->entries[i].segments[j].mask,
                fixture.manifest.entries[i].segments[j].mask);
    }
  }
}

TEST(SanitizeTest, L0IsTextOnly) {
  std::mt19937_64 rng(6);
  Segment segment{SegmentRole::Target(0), RandomImage(rng, 8, 8),
                  BitMask(8, 8, true)};
  auto out = SanitizeSegment(segment, SanitizationLevel::L0(), DogRequest(), {});
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out->text, "dog");
  EXPECT_EQ(out->payload_kind, PayloadKind::kNone);
  EXPECT_FALSE(out->payload.has_value());
}

TEST(SanitizeTest, CannyOfConstantSegmentIsEmpty) {
  Segment segment{SegmentRole::Background(),
                  RasterImage(16, 16, PixelFormat::kRgb8, 90),
                  BitMask(16, 16, true)};
  auto out = SanitizeSegment(segment, SanitizationLevel::L1(), DogRequest(), {});
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out->text, "bedroom");
  ASSERT_TRUE(out->payload.has_value());
  EXPECT_EQ(*out->payload, RasterImage(16, 16, PixelFormat::kGray8));
}

TEST(SanitizeTest, L2WithZeroNoiseIsPassthrough) {
  std::mt19937_64 rng(7);
  Segment segment{SegmentRole::Target(0), RandomImage(rng, 8, 8),
                  RectMask(8, 8, 0, 0, 8, 8)};
  SanitizationLevel level = SanitizationLevel::L2();
  level.noise = imaging::NoiseParams{0.0, 3};
  auto out = SanitizeSegment(segment, level, DogRequest(), {});
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(*out->payload, segment.canvas);
}

class FakeFeatureService : public FeatureService {
 public:
  absl::StatusOr<RasterImage> ExtractFeature(const RasterImage& segment,
                                             FeatureKind) override {
    return imaging::ToGrayscale(segment);
  }
};

TEST(SanitizeTest, PoseNeedsFeatureService) {
  std::mt19937_64 rng(8);
  Segment segment{SegmentRole::Target(0), RandomImage(rng, 8, 8),
                  BitMask(8, 8, true)};
  auto missing = SanitizeSegment(segment, SanitizationLevel::L1(FeatureKind::kPose),
                                 DogRequest(), {});
  EXPECT_EQ(ErrorKindOf(missing.status()), ErrorKind::kBackendUnavailable);
  FakeFeatureService service;
  SanitizeOptions options;
  options.feature_service = &service;
  auto out = SanitizeSegment(segment, SanitizationLevel::L1(FeatureKind::kPose),
                             DogRequest(), options);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(*out->payload, imaging::ToGrayscale(segment.canvas));
}

TEST(BundleTest, AllL0HasNoPixelData) {
  Fixture fixture = MakeFixture(5, 1, 9);
  auto bundle = BuildBundle(DogRequest(), fixture.images, fixture.manifest,
                            Pref("t=L0,b=L0"));
  ASSERT_TRUE(bundle.ok()) << bundle.status();
  size_t segments = 0;
  for (const auto& entry : bundle->entries) {
    segments += entry.segments.size();
    auto canvas = RenderBundleCanvas(entry);
    ASSERT_TRUE(canvas.ok());
    EXPECT_EQ(*canvas, RasterImage(canvas->width(), canvas->height(),
                                   canvas->format()));
  }
  EXPECT_EQ(segments, 10u);
  EXPECT_EQ(bundle->PayloadCount(), 0u);
  auto body = SerializeBundle(*bundle);
  ASSERT_TRUE(body.ok());
  EXPECT_EQ(body->find("png_base64"), std::string::npos);
}

TEST(BundleTest, ThreeRolePreference) {
  Fixture fixture = MakeFixture(3, 2, 10);
  auto bundle = BuildBundle(TwoTargetRequest(), fixture.images,
                            fixture.manifest, Pref("t1=L0,t2=L1,b=L2"));
  ASSERT_TRUE(bundle.ok()) << bundle.status();
  for (size_t i = 0; i < bundle->entries.size(); ++i) {
    const BundleEntry& entry = bundle->entries[i];
    ASSERT_EQ(entry.segments.size(), 3u);
    const SanitizedSegment* bottle = entry.Find(SegmentRole::Target(0));
    const SanitizedSegment* frame = entry.Find(SegmentRole::Target(1));
    const SanitizedSegment* room = entry.Find(SegmentRole::Background());
    EXPECT_EQ(bottle->text, "bottle");
    EXPECT_EQ(bottle->payload_kind, PayloadKind::kNone);
    EXPECT_EQ(frame->text, "photo frame");
    EXPECT_EQ(frame->payload_kind, PayloadKind::kFeatureImage);
    EXPECT_EQ(frame->payload->format(), PixelFormat::kGray8);
    EXPECT_EQ(room->text, "bedroom");
    EXPECT_EQ(room->payload_kind, PayloadKind::kRawSegment);
    auto segments = SplitSegments(fixture.images[i].image,
                                  fixture.manifest.entries[i], TwoTargetRequest());
    EXPECT_EQ(*room->payload, (*segments)[2].canvas);
  }
}

TEST(BundleTest, RenderReconstructsFromRawSegments) {
  Fixture fixture = MakeFixture(2, 1, 11);
  auto bundle = BuildBundle(DogRequest(), fixture.images, fixture.manifest,
                            Pref("t=L2,b=L2"));
  ASSERT_TRUE(bundle.ok());
  for (size_t i = 0; i < 2; ++i) {
    auto canvas = RenderBundleCanvas(bundle->entries[i]);
    ASSERT_TRUE(canvas.ok());
    EXPECT_EQ(*canvas, fixture.images[i].image);
  }
}

TEST(BundleTest, RenderSingleRawSegment) {
  Fixture fixture = MakeFixture(1, 1, 12);
  auto bundle = BuildBundle(DogRequest(), fixture.images, fixture.manifest,
                            Pref("t=L2,b=L0"));
  ASSERT_TRUE(bundle.ok());
  auto canvas = RenderBundleCanvas(bundle->entries[0]);
  ASSERT_TRUE(canvas.ok());
  EXPECT_EQ(*canvas, *bundle->entries[0].Find(SegmentRole::Target(0))->payload);
}

TEST(BundleTest, NoCrossRoleLeakage) {
  Fixture fixture = MakeFixture(1, 1, 13);
  Fixture altered = fixture;
  const BitMask& target = fixture.manifest.entries[0].segments[0].mask;
  RasterImage& image = altered.images[0].image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!target.at(x, y)) {
        for (int c = 0; c < 3; ++c) image.set(x, y, c, 255 - image.at(x, y, c));
      }
    }
  }
  for (const char* preference : {"t=L1,b=L0", "t=L2,b=L0", "t=L2@10,b=L2"}) {
    auto a = BuildBundle(DogRequest(), fixture.images, fixture.manifest,
                         Pref(preference));
    auto b = BuildBundle(DogRequest(), altered.images, altered.manifest,
                         Pref(preference));
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(*a->entries[0].Find(SegmentRole::Target(0)),
              *b->entries[0].Find(SegmentRole::Target(0)))
        << preference;
  }
}

TEST(BundleTest, DeterministicAcrossParallelism) {
  Fixture fixture = MakeFixture(8, 2, 14);
  SanitizeOptions serial;
  serial.seed = 99;
  SanitizeOptions parallel = serial;
  parallel.parallelism = 4;
  auto a = BuildBundle(TwoTargetRequest(), fixture.images, fixture.manifest,
                       Pref("t1=L2@10,t2=L1@5,b=L2@50"), serial);
  auto b = BuildBundle(TwoTargetRequest(), fixture.images, fixture.manifest,
                       Pref("t1=L2@10,t2=L1@5,b=L2@50"), parallel);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(*a, *b);
  serial.seed = 100;
  auto c = BuildBundle(TwoTargetRequest(), fixture.images, fixture.manifest,
                       Pref("t1=L2@10,t2=L1@5,b=L2@50"), serial);
  ASSERT_TRUE(c.ok());
  EXPECT_NE(*a, *c);
}

TEST(BundleTest, ErrorsCarryImageIndex) {
  Fixture fixture = MakeFixture(3, 1, 15);
  fixture.manifest.entries[2].segments.clear();
  auto bundle = BuildBundle(DogRequest(), fixture.images, fixture.manifest,
                            Pref("t=L2,b=L0"));
  ASSERT_FALSE(bundle.ok());
  EXPECT_EQ(ErrorKindOf(bundle.status()), ErrorKind::kIncompleteSegmentation);
  EXPECT_NE(bundle.status().message().find("image 2"), absl::string_view::npos);
}

TEST(WireTest, RoundTripIsByteIdentical) {
  Fixture fixture = MakeFixture(2, 2, 16);
  SanitizeOptions options;
  options.seed = 5;
  auto bundle = BuildBundle(TwoTargetRequest(), fixture.images,
                            fixture.manifest, Pref("t1=L0,t2=L1,b=L2@5"),
                            options);
  ASSERT_TRUE(bundle.ok());
  auto body = SerializeBundle(*bundle);
  ASSERT_TRUE(body.ok());
  auto parsed = ParseBundle(*body);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(*parsed, *bundle);
  auto again = SerializeBundle(*parsed);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again, *body);
}

TEST(WireTest, CorruptPayloadNamesSegment) {
  Fixture fixture = MakeFixture(1, 1, 17);
  auto bundle = BuildBundle(DogRequest(), fixture.images, fixture.manifest,
                            Pref("t=L0,b=L2"));
  ASSERT_TRUE(bundle.ok());
  auto doc = BundleToJson(*bundle);
  ASSERT_TRUE(doc.ok());
  (*doc)["images"][0]["segments"][1]["payload"]["png_base64"] = "@@not base64@@";
  auto parsed = BundleFromJson(*doc);
  ASSERT_FALSE(parsed.ok());
  EXPECT_EQ(ErrorKindOf(parsed.status()), ErrorKind::kSchemaViolation);
  EXPECT_NE(parsed.status().message().find(
                "images[0].segments[1].payload.png_base64"),
            absl::string_view::npos)
      << parsed.status();
}

TEST(WireTest, RejectsInconsistentEnvelopes) {
  Fixture fixture = MakeFixture(1, 1, 18);
  auto bundle = BuildBundle(DogRequest(), fixture.images, fixture.manifest,
                            Pref("t=L0,b=L2"));
  ASSERT_TRUE(bundle.ok());
  auto base = BundleToJson(*bundle);
  ASSERT_TRUE(base.ok());

  Json smuggled = *base;
  smuggled["images"][0]["segments"][0]["payload"]["png_base64"] =
      smuggled["images"][0]["segments"][1]["payload"]["png_base64"];
  EXPECT_EQ(ErrorKindOf(BundleFromJson(smuggled).status()),
            ErrorKind::kSchemaViolation);

  Json wrong_text = *base;
  wrong_text["images"][0]["segments"][0]["text"] = "cat";
  EXPECT_FALSE(BundleFromJson(wrong_text).ok());

  Json missing_role = *base;
  missing_role["images"][0]["segments"].erase(1);
  EXPECT_FALSE(BundleFromJson(missing_role).ok());

  EXPECT_EQ(ErrorKindOf(ParseBundle("{not json").status()),
            ErrorKind::kSchemaViolation);
}

}  // namespace
}  // namespace privsynth::sanitizer
