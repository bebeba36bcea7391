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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/status.h"
#include "privsynth/cli/cli.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/metrics/mutual_information.h"
#include "privsynth/sanitizer/preference.h"

namespace py = pybind11;

namespace privsynth {
namespace {

using U8Array = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

// Raised with the one-line JSON rendering of the failing status.
class StatusError : public std::runtime_error {
 public:
  explicit StatusError(const absl::Status& status)
      : std::runtime_error(StatusToJsonLine(status)) {}
};

template <typename T>
T ValueOrThrow(absl::StatusOr<T> value) {
  if (!value.ok()) throw StatusError(value.status());
  return *std::move(value);
}

// (H, W) gray, (H, W, 3) RGB or (H, W, 4) RGBA.
imaging::RasterImage ToRaster(const U8Array& array) {
  imaging::PixelFormat format = imaging::PixelFormat::kGray8;
  if (array.ndim() == 3 && array.shape(2) == 3) {
    format = imaging::PixelFormat::kRgb8;
  } else if (array.ndim() == 3 && array.shape(2) == 4) {
    format = imaging::PixelFormat::kRgba8;
  } else if (array.ndim() != 2) {
    throw StatusError(MakeError(ErrorKind::kInvalidArgument,
                                "image must be HxW, HxWx3 or HxWx4 uint8"));
  }
  std::vector<uint8_t> samples(array.data(), array.data() + array.size());
  return ValueOrThrow(imaging::RasterImage::Create(
      static_cast<int>(array.shape(1)), static_cast<int>(array.shape(0)),
      format, std::move(samples)));
}

std::tuple<int, std::string, std::string> RunCliCaptured(
    const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::RunCli(args, out, err);
  }
  return {code, out.str(), err.str()};
}

}  // namespace
}  // namespace privsynth

PYBIND11_MODULE(_privsynth, m) {
  using namespace privsynth;
  m.doc() = "Native core of the privsynth package";
  py::register_exception<StatusError>(m, "Error", PyExc_RuntimeError);

  m.def("run_cli", &RunCliCaptured, py::arg("args"),
        "Runs the privsynth command line; returns (exit code, stdout, "
        "stderr).");
  m.def(
      "image_mi_bits",
      [](const U8Array& a, const U8Array& b) {
        return ValueOrThrow(metrics::ImageMiBits(ToRaster(a), ToRaster(b)));
      },
      py::arg("a"), py::arg("b"),
      "Mutual information in bits between the grayscale intensities of two "
      "equally sized images.");
  m.def(
      "entropy_bits",
      [](const U8Array& a) { return metrics::EntropyBits(ToRaster(a)); },
      py::arg("image"), "Grayscale intensity entropy in bits.");
  m.def(
      "parse_preference",
      [](const std::string& text) {
        return ValueOrThrow(sanitizer::PrivacyPreference::Parse(text)).Format();
      },
      py::arg("text"), "Canonical spelling of a preference such as t=L2,b=L0.");
}
