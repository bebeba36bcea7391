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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "gtest/gtest.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/canny.h"
#include "privsynth/imaging/noise.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/imaging/png_io.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::imaging {
namespace {

RasterImage RandomImage(std::mt19937_64& rng, int w, int h, PixelFormat f) {
  RasterImage image(w, h, f);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& s : image.mutable_samples()) s = static_cast<uint8_t>(byte(rng));
  return image;
}

BitMask RandomMask(std::mt19937_64& rng, int w, int h) {
  BitMask mask(w, h);
  std::bernoulli_distribution coin(0.5);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mask.set(x, y, coin(rng));
  }
  return mask;
}

RasterImage StepImage(int w, int h) {
  RasterImage image(w, h, PixelFormat::kGray8);
  for (int y = 0; y < h; ++y) {
    for (int x = w / 2; x < w; ++x) image.set(x, y, 0, 255);
  }
  return image;
}

// Reference Canny from OpenCV on the same blurred input (5x5, sigma 1.4,
// replicate border, L2 gradient).
cv::Mat OpenCvCanny(const RasterImage& gray, double low, double high) {
  cv::Mat src(gray.height(), gray.width(), CV_8UC1);
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) src.at<uint8_t>(y, x) = gray.at(x, y);
  }
  cv::Mat blurred, edges;
  cv::GaussianBlur(src, blurred, cv::Size(5, 5), 1.4, 1.4,
                   cv::BORDER_REPLICATE);
  cv::Canny(blurred, edges, low, high, 3, true);
  return edges;
}

TEST(ToGrayscaleTest, WhiteMapsToMax) {
  RasterImage rgb(1, 1, PixelFormat::kRgb8, 255);
  EXPECT_EQ(ToGrayscale(rgb).at(0, 0), 255);
}

TEST(ToGrayscaleTest, PureRedUsesBt601Weight) {
  RasterImage rgb(1, 1, PixelFormat::kRgb8);
  rgb.set(0, 0, 0, 255);
  // round(0.299 * 255) = round(76.245) = 76.
  EXPECT_EQ(ToGrayscale(rgb).at(0, 0), 76);
}

TEST(ToGrayscaleTest, GrayIsIdentity) {
  std::mt19937_64 rng(1);
  const RasterImage gray = RandomImage(rng, 7, 5, PixelFormat::kGray8);
  EXPECT_EQ(ToGrayscale(gray), gray);
}

TEST(ToGrayscaleTest, AlphaIgnoredAndPerPixel) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const RasterImage rgba = RandomImage(rng, 6, 4, PixelFormat::kRgba8);
    const RasterImage gray = ToGrayscale(rgba);
    ASSERT_EQ(gray.format(), PixelFormat::kGray8);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 6; ++x) {
        RasterImage single(1, 1, PixelFormat::kRgb8);
        for (int c = 0; c < 3; ++c) single.set(0, 0, c, rgba.at(x, y, c));
        EXPECT_EQ(gray.at(x, y), ToGrayscale(single).at(0, 0));
      }
    }
  }
}

TEST(ApplyMaskTest, FullMaskIsIdentityEmptyMaskZeroes) {
  std::mt19937_64 rng(3);
  const RasterImage image = RandomImage(rng, 9, 7, PixelFormat::kRgb8);
  EXPECT_EQ(*ApplyMask(image, BitMask(9, 7, true)), image);
  EXPECT_EQ(*ApplyMask(image, BitMask(9, 7, false)),
            RasterImage(9, 7, PixelFormat::kRgb8));
}

TEST(ApplyMaskTest, TopRowMaskOn2x2) {
  auto image = *RasterImage::Create(2, 2, PixelFormat::kGray8, {10, 20, 30, 40});
  auto mask = *BitMask::Create(2, 2, {1, 1, 0, 0});
  auto out = *ApplyMask(image, mask);
  EXPECT_EQ(std::vector<uint8_t>(out.samples().begin(), out.samples().end()),
            (std::vector<uint8_t>{10, 20, 0, 0}));
}

TEST(ApplyMaskTest, DimensionMismatchIsInvalidArgument) {
  auto out = ApplyMask(RasterImage(4, 4, PixelFormat::kGray8), BitMask(4, 5));
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(ErrorKindOf(out.status()), ErrorKind::kInvalidArgument);
}

TEST(ApplyMaskTest, Idempotent) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const RasterImage image = RandomImage(rng, 8, 8, PixelFormat::kRgba8);
    const BitMask mask = RandomMask(rng, 8, 8);
    const RasterImage once = *ApplyMask(image, mask);
    EXPECT_EQ(*ApplyMask(once, mask), once);
  }
}

TEST(CompositeTest, FullAndEmptyMasks) {
  std::mt19937_64 rng(5);
  const RasterImage fg = RandomImage(rng, 5, 5, PixelFormat::kRgb8);
  const RasterImage bg = RandomImage(rng, 5, 5, PixelFormat::kRgb8);
  EXPECT_EQ(*Composite(fg, BitMask(5, 5, true), bg), fg);
  EXPECT_EQ(*Composite(fg, BitMask(5, 5, false), bg), bg);
}

TEST(CompositeTest, CheckerboardInterleavesConstants) {
  const RasterImage fg(4, 4, PixelFormat::kGray8, 200);
  const RasterImage bg(4, 4, PixelFormat::kGray8, 7);
  BitMask mask(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) mask.set(x, y, (x + y) % 2 == 0);
  }
  const RasterImage out = *Composite(fg, mask, bg);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      EXPECT_EQ(out.at(x, y), (x + y) % 2 == 0 ? 200 : 7);
    }
  }
}

TEST(CompositeTest, MismatchIsInvalidArgument) {
  const RasterImage a(4, 4, PixelFormat::kGray8);
  const RasterImage b(4, 3, PixelFormat::kGray8);
  EXPECT_EQ(ErrorKindOf(Composite(a, BitMask(4, 4), b).status()),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(ErrorKindOf(Composite(a, BitMask(3, 4), a).status()),
            ErrorKind::kInvalidArgument);
}

TEST(CompositeTest, SplitAndRecompositeReconstructs) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const RasterImage x = RandomImage(rng, 10, 6, PixelFormat::kRgb8);
    const BitMask m = RandomMask(rng, 10, 6);
    const RasterImage inside = *ApplyMask(x, m);
    const RasterImage outside = *ApplyMask(x, m.Complement());
    EXPECT_EQ(*Composite(inside, m, outside), x);
  }
}

TEST(CannyTest, ConstantImageHasNoEdges) {
  const RasterImage flat(32, 32, PixelFormat::kRgb8, 123);
  const RasterImage edges = *CannyEdges(flat);
  EXPECT_EQ(edges, RasterImage(32, 32, PixelFormat::kGray8));
}

TEST(CannyTest, LowAboveHighIsInvalidArgument) {
  auto out = CannyEdges(RasterImage(8, 8, PixelFormat::kGray8), 200, 100);
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(ErrorKindOf(out.status()), ErrorKind::kInvalidArgument);
}

TEST(CannyTest, StepEdgeMatchesOpenCvReference) {
  const RasterImage step = StepImage(64, 64);
  const RasterImage ours = *CannyEdges(step);
  const cv::Mat reference = OpenCvCanny(step, 50, 150);
  for (int y = 0; y < 64; ++y) {
    std::vector<int> our_cols, ref_cols;
    for (int x = 0; x < 64; ++x) {
      if (ours.at(x, y) == 255) our_cols.push_back(x);
      if (reference.at<uint8_t>(y, x) == 255) ref_cols.push_back(x);
    }
    ASSERT_EQ(our_cols.size(), 1u) << "row " << y;
    ASSERT_EQ(ref_cols.size(), 1u) << "row " << y;
    EXPECT_GE(our_cols[0], 31);
    EXPECT_LE(our_cols[0], 32);
    EXPECT_LE(std::abs(our_cols[0] - ref_cols[0]), 1);
  }
}

TEST(CannyTest, DiscAgreesWithOpenCvWithinOnePixel) {
  RasterImage disc(80, 80, PixelFormat::kGray8, 30);
  for (int y = 0; y < 80; ++y) {
    for (int x = 0; x < 80; ++x) {
      if ((x - 40) * (x - 40) + (y - 38) * (y - 38) < 22 * 22) {
        disc.set(x, y, 0, 210);
      }
    }
  }
  const RasterImage ours = *CannyEdges(disc);
  const cv::Mat reference = OpenCvCanny(disc, 50, 150);
  auto near = [](auto is_edge, int x, int y) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (is_edge(x + dx, y + dy)) return true;
      }
    }
    return false;
  };
  auto our_edge = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < 80 && y < 80 && ours.at(x, y) == 255;
  };
  auto ref_edge = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < 80 && y < 80 &&
           reference.at<uint8_t>(y, x) == 255;
  };
  int ours_total = 0, ours_matched = 0, ref_total = 0, ref_matched = 0;
  for (int y = 0; y < 80; ++y) {
    for (int x = 0; x < 80; ++x) {
      if (our_edge(x, y)) {
        ++ours_total;
        ours_matched += near(ref_edge, x, y);
      }
      if (ref_edge(x, y)) {
        ++ref_total;
        ref_matched += near(our_edge, x, y);
      }
    }
  }
  ASSERT_GT(ours_total, 100);
  EXPECT_GE(ours_matched, ours_total * 95 / 100);
  EXPECT_GE(ref_matched, ref_total * 95 / 100);
}

TEST(CannyTest, BinaryAndDeterministic) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const RasterImage image = RandomImage(rng, 24, 24, PixelFormat::kRgb8);
    const RasterImage a = *CannyEdges(image);
    const RasterImage b = *CannyEdges(image);
    EXPECT_EQ(a, b);
    for (uint8_t v : a.samples()) EXPECT_TRUE(v == 0 || v == 255);
  }
}

TEST(NoiseTest, ZeroSigmaIsIdentity) {
  std::mt19937_64 rng(8);
  const RasterImage image = RandomImage(rng, 16, 16, PixelFormat::kRgb8);
  EXPECT_EQ(*AddGaussianNoise(image, BitMask(16, 16, true), {0.0, 99}), image);
}

TEST(NoiseTest, SampleStdMatchesSigma) {
  const RasterImage flat(256, 256, PixelFormat::kGray8, 128);
  const RasterImage noisy =
      *AddGaussianNoise(flat, BitMask(256, 256, true), {10.0, 2024});
  double sum = 0, sum_sq = 0;
  for (uint8_t v : noisy.samples()) {
    const double d = static_cast<double>(v) - 128.0;
    sum += d;
    sum_sq += d * d;
  }
  const double n = static_cast<double>(noisy.samples().size());
  const double sd = std::sqrt(sum_sq / n - (sum / n) * (sum / n));
  EXPECT_NEAR(sd, 10.0, 0.5);
}

TEST(NoiseTest, ReproducibleAndMaskedOnly) {
  std::mt19937_64 rng(9);
  const RasterImage image = RandomImage(rng, 20, 12, PixelFormat::kRgba8);
  const BitMask mask = RandomMask(rng, 20, 12);
  const RasterImage a = *AddGaussianNoise(image, mask, {25.0, 5});
  const RasterImage b = *AddGaussianNoise(image, mask, {25.0, 5});
  const RasterImage c = *AddGaussianNoise(image, mask, {25.0, 6});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 20; ++x) {
      EXPECT_EQ(a.at(x, y, 3), image.at(x, y, 3));
      if (mask.at(x, y)) continue;
      for (int k = 0; k < 4; ++k) EXPECT_EQ(a.at(x, y, k), image.at(x, y, k));
    }
  }
}

TEST(NoiseTest, MismatchAndNegativeSigmaRejected) {
  const RasterImage image(4, 4, PixelFormat::kGray8);
  EXPECT_EQ(ErrorKindOf(AddGaussianNoise(image, BitMask(3, 4), {1, 1}).status()),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(
      ErrorKindOf(AddGaussianNoise(image, BitMask(4, 4), {-1, 1}).status()),
      ErrorKind::kInvalidArgument);
}

TEST(PngTest, RoundTripAllFormats) {
  std::mt19937_64 rng(10);
  for (PixelFormat f :
       {PixelFormat::kGray8, PixelFormat::kRgb8, PixelFormat::kRgba8}) {
    const RasterImage image = RandomImage(rng, 13, 9, f);
    auto encoded = EncodePng(image);
    ASSERT_TRUE(encoded.ok());
    auto decoded = DecodePng(*encoded);
    ASSERT_TRUE(decoded.ok()) << decoded.status();
    EXPECT_EQ(*decoded, image);
    EXPECT_EQ(*DecodePngBase64(*EncodePngBase64(image)), image);
  }
}

TEST(PngTest, MaskFileRoundTrip) {
  std::mt19937_64 rng(11);
  const BitMask mask = RandomMask(rng, 17, 11);
  const auto path =
      std::filesystem::temp_directory_path() / "privsynth_mask_test.png";
  ASSERT_TRUE(WriteMaskPng(path, mask).ok());
  auto back = ReadMaskPng(path);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, mask);
  const RasterImage raw = *ReadPng(path);
  for (uint8_t v : raw.samples()) EXPECT_TRUE(v == 0 || v == 255);
  std::filesystem::remove(path);
}

TEST(PngTest, CorruptInputRejected) {
  const std::vector<uint8_t> junk = {1, 2, 3, 4, 5};
  EXPECT_EQ(ErrorKindOf(DecodePng(junk).status()), ErrorKind::kInvalidArgument);
  EXPECT_EQ(ErrorKindOf(DecodePngBase64("@@not base64@@").status()),
            ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace privsynth::imaging
