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

#ifndef PRIVSYNTH_COMMON_SEED_H_
#define PRIVSYNTH_COMMON_SEED_H_

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace privsynth {

// splitmix64 finalizer.
constexpr uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a base seed and a path of indices. Used so that
// per-image / per-role / per-sample randomness is independent of scheduling.
constexpr uint64_t DeriveSeed(uint64_t base,
                              std::initializer_list<uint64_t> path) {
  uint64_t state = MixBits(base);
  for (uint64_t index : path) state = MixBits(state ^ MixBits(index + 1));
  return state;
}

// 64-bit FNV-1a. Stable across processes and platforms (absl::Hash is not).
constexpr uint64_t StableHash(std::string_view text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace privsynth

#endif  // PRIVSYNTH_COMMON_SEED_H_
