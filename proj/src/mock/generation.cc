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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "absl/strings/escaping.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/mock/backends.h"

namespace privsynth::mock {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;

namespace {

constexpr char kStylePrefix[] = "mock-ft:";
constexpr int kMaxSide = 4096;
constexpr size_t kPaletteSize = 8;

absl::Status CheckSize(int width, int height) {
  if (width <= 0 || height <= 0 || width > kMaxSide || height > kMaxSide) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("image size ", width, "x", height,
                                  " outside 1..", kMaxSide));
  }
  return absl::OkStatus();
}

Json RgbJson(const Rgb& c) { return Json::array({c[0], c[1], c[2]}); }

absl::StatusOr<Rgb> RgbFrom(const Json& j, std::string_view path) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() ||
      !j[1].is_number() || !j[2].is_number()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(ToStd(path), ": expected [r, g, b]"));
  }
  return Rgb{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Uniform quantiles of a noise field: rank / n for every pixel.
std::vector<double> Quantiles(const std::vector<double>& field) {
  std::vector<size_t> order(field.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return field[a] < field[b]; });
  std::vector<double> q(field.size());
  for (size_t r = 0; r < order.size(); ++r) {
    q[order[r]] = (static_cast<double>(r) + 0.5) / order.size();
  }
  return q;
}

// Texture for (model, prompt, seed).
RasterImage Render(const StyleModel* style, const std::string& prompt,
                   uint64_t seed, int width, int height) {
  const uint64_t s = DeriveSeed(seed, {StableHash(prompt)});
  RasterImage image = Texture(width, height, s, ConceptColor(prompt));
  if (style == nullptr || style->palette.empty()) return image;
  const std::vector<double> pick =
      Quantiles(ValueNoise(width, height, DeriveSeed(s, {9}), 12.0));
  const std::vector<double> shade =
      ValueNoise(width, height, DeriveSeed(s, {10}), 6.0);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& [color, weight] : style->palette) {
    acc += weight;
    cumulative.push_back(acc);
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t i = static_cast<size_t>(y) * width + x;
      const double q = pick[i] * acc;
      size_t k = std::lower_bound(cumulative.begin(), cumulative.end(), q) -
                 cumulative.begin();
      k = std::min(k, style->palette.size() - 1);
      const Rgb& color = style->palette[k].first;
      bool any = false;
      for (int c = 0; c < 3; ++c) {
        const double matched =
            color[c] + 0.5 * style->stddev[c] * (2.0 * shade[i] - 1.0);
        const double v = (1.0 - kStyleWeight) * image.at(x, y, c) +
                         kStyleWeight * matched;
        const uint8_t b = ClampByte(v);
        any = any || b != 0;
        image.set(x, y, c, b);
      }
      if (!any) image.set(x, y, 0, 1);
    }
  }
  return image;
}

absl::StatusOr<std::optional<StyleModel>> ResolveModel(
    const std::string& model_ref) {
  if (model_ref == orchestrator::kPretrainedModel) return std::nullopt;
  PRIVSYNTH_ASSIGN_OR_RETURN(StyleModel model, DecodeStyleRef(model_ref));
  return model;
}

}  // namespace

std::string EncodeStyleRef(const StyleModel& model) {
  Json palette = Json::array();
  for (const auto& [color, weight] : model.palette) {
    palette.push_back({{"rgb", RgbJson(color)}, {"weight", weight}});
  }
  const Json doc = {{"role", model.role},
                    {"description", model.description},
                    {"mean", RgbJson(model.mean)},
                    {"stddev", RgbJson(model.stddev)},
                    {"palette", palette}};
  return absl::StrCat(kStylePrefix, absl::WebSafeBase64Escape(doc.dump()));
}

absl::StatusOr<StyleModel> DecodeStyleRef(const std::string& model_ref) {
  if (!absl::StartsWith(model_ref, kStylePrefix)) {
    return MakeError(ErrorKind::kNotFound,
                     absl::StrCat("unknown model_ref '", model_ref, "'"));
  }
  std::string text;
  if (!absl::WebSafeBase64Unescape(
          absl::string_view(model_ref).substr(sizeof(kStylePrefix) - 1),
          &text)) {
    return MakeError(ErrorKind::kNotFound, "model_ref is not valid base64");
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ParseJson(text, "model_ref"));
  StyleModel model;
  PRIVSYNTH_ASSIGN_OR_RETURN(model.role, GetString(doc, "role", "model_ref"));
  PRIVSYNTH_ASSIGN_OR_RETURN(model.description,
                             GetString(doc, "description", "model_ref"));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* mean,
                             RequireField(doc, "mean", "model_ref"));
  PRIVSYNTH_ASSIGN_OR_RETURN(model.mean, RgbFrom(*mean, "model_ref.mean"));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* stddev,
                             RequireField(doc, "stddev", "model_ref"));
  PRIVSYNTH_ASSIGN_OR_RETURN(model.stddev,
                             RgbFrom(*stddev, "model_ref.stddev"));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* palette,
                             GetArray(doc, "palette", "model_ref"));
  for (size_t i = 0; i < palette->size(); ++i) {
    const std::string path = IndexPath("model_ref.palette", i);
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* rgb,
                               RequireField((*palette)[i], "rgb", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(Rgb color, RgbFrom(*rgb, path));
    PRIVSYNTH_ASSIGN_OR_RETURN(double weight,
                               GetNumber((*palette)[i], "weight", path));
    model.palette.emplace_back(color, weight);
  }
  return model;
}

absl::StatusOr<orchestrator::BackendCapabilities>
MockGenerationBackend::Capabilities() {
  return orchestrator::BackendCapabilities{
      kGenerationProvider,
      /*deterministic=*/true,
      {"fine_tune", "generate", "condition_generate", "inpaint", "embed",
       "segment", "feature", "train", "predict"}};
}

absl::StatusOr<std::string> MockGenerationBackend::FineTune(
    const std::string& role, const std::string& description,
    const std::vector<RasterImage>& references, const Json& /*config*/) {
  if (references.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("fine_tune for role '", role,
                                  "' got no reference images"));
  }
  // Quantized bins: count and color sums.
  std::map<int, std::pair<size_t, Rgb>> bins;
  Rgb sum{0, 0, 0};
  Rgb sum_sq{0, 0, 0};
  size_t n = 0;
  for (const RasterImage& ref : references) {
    const RasterImage rgb = ConvertFormat(ref, PixelFormat::kRgb8);
    for (int y = 0; y < rgb.height(); ++y) {
      for (int x = 0; x < rgb.width(); ++x) {
        if (!ref.IsNonZero(x, y)) continue;
        Rgb c{static_cast<double>(rgb.at(x, y, 0)),
              static_cast<double>(rgb.at(x, y, 1)),
              static_cast<double>(rgb.at(x, y, 2))};
        const int bin = (rgb.at(x, y, 0) >> 6) * 16 +
                        (rgb.at(x, y, 1) >> 6) * 4 + (rgb.at(x, y, 2) >> 6);
        auto& [count, color_sum] = bins[bin];
        ++count;
        for (int k = 0; k < 3; ++k) {
          color_sum[k] += c[k];
          sum[k] += c[k];
          sum_sq[k] += c[k] * c[k];
        }
        ++n;
      }
    }
  }
  if (n == 0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("fine_tune for role '", role,
                                  "': references have no visible pixels"));
  }
  StyleModel model;
  model.role = role;
  model.description = description;
  for (int k = 0; k < 3; ++k) {
    model.mean[k] = sum[k] / n;
    model.stddev[k] =
        std::sqrt(std::max(0.0, sum_sq[k] / n - model.mean[k] * model.mean[k]));
  }
  std::vector<std::pair<size_t, Rgb>> ranked;
  for (const auto& [bin, entry] : bins) {
    const auto& [count, color_sum] = entry;
    ranked.push_back({count, {color_sum[0] / count, color_sum[1] / count,
                              color_sum[2] / count}});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  ranked.resize(std::min(ranked.size(), kPaletteSize));
  size_t kept = 0;
  for (const auto& entry : ranked) kept += entry.first;
  for (const auto& [count, color] : ranked) {
    model.palette.emplace_back(color, static_cast<double>(count) / kept);
  }
  return EncodeStyleRef(model);
}

absl::StatusOr<orchestrator::GeneratedImage> MockGenerationBackend::Generate(
    const std::string& model_ref, const std::string& prompt, uint64_t seed,
    bool want_alpha, int width, int height) {
  PRIVSYNTH_RETURN_IF_ERROR(CheckSize(width, height));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::optional<StyleModel> style,
                             ResolveModel(model_ref));
  orchestrator::GeneratedImage out;
  out.image = Render(style ? &*style : nullptr, prompt, seed, width, height);
  if (want_alpha) {
    BitMask alpha = BlobMask(width, height,
                             DeriveSeed(seed, {StableHash(prompt), 7}));
    if (alpha.CountSet() == 0) alpha.set(width / 2, height / 2, true);
    out.alpha = std::move(alpha);
  }
  return out;
}

absl::StatusOr<std::vector<RasterImage>>
MockGenerationBackend::ConditionGenerate(const std::vector<RasterImage>& features,
                                         const std::string& prompt,
                                         uint64_t seed, int count) {
  if (features.empty() || count <= 0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("condition_generate needs features and a "
                                  "positive count, got ",
                                  features.size(), " and ", count));
  }
  std::vector<RasterImage> out;
  for (int i = 0; i < count; ++i) {
    const RasterImage& feature = features[static_cast<size_t>(i) % features.size()];
    PRIVSYNTH_RETURN_IF_ERROR(CheckSize(feature.width(), feature.height()));
    BitMask region = EnclosedRegion(imaging::NonZeroMask(feature));
    if (region.CountSet() < feature.pixel_count() / 50) {
      region = BitMask(feature.width(), feature.height(), true);
    }
    const RasterImage texture =
        Texture(feature.width(), feature.height(),
                DeriveSeed(seed, {StableHash(prompt), static_cast<uint64_t>(i)}),
                ConceptColor(prompt));
    PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage masked,
                               imaging::ApplyMask(texture, region));
    out.push_back(std::move(masked));
  }
  return out;
}

absl::StatusOr<RasterImage> MockGenerationBackend::Inpaint(
    const std::string& model_ref, const RasterImage& canvas,
    const BitMask& mask, const std::string& prompt, uint64_t seed) {
  if (!mask.SameSize(canvas.width(), canvas.height())) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "inpaint mask and canvas differ in size");
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(std::optional<StyleModel> style,
                             ResolveModel(model_ref));
  const RasterImage fill = Render(style ? &*style : nullptr, prompt, seed,
                                  canvas.width(), canvas.height());
  return imaging::Composite(fill, mask,
                            ConvertFormat(canvas, PixelFormat::kRgb8));
}

}  // namespace privsynth::mock
