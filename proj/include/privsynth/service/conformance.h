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

#ifndef PRIVSYNTH_SERVICE_CONFORMANCE_H_
#define PRIVSYNTH_SERVICE_CONFORMANCE_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace privsynth::service {

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::vector<ConformanceCheck> checks;

  bool AllPassed() const;
  // One "PASS name" / "FAIL name: detail" line per check.
  std::string Summary() const;
};

// Exercises every backend endpoint at `url` (as taken by RemoteBackend):
// schemas, request id echo, alpha masks, declared determinism, inpaint
// locality, the empty-prompt baseline, segmentation complements, and the
// error envelope. Fails only when the url itself is unusable; an unreachable
// backend yields failed checks.
absl::StatusOr<ConformanceReport> RunConformance(std::string_view url);

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_CONFORMANCE_H_
