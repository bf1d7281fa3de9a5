// Copyright 2026 The mqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mqa/skeldata/sequence.hpp"

namespace mqa::augment {

enum class AugmentKind { kPace, kOcclusion, kMasking };
enum class OcclusionMode { kZero, kRepeatFirst };

std::string to_string(AugmentKind k);
std::string to_string(OcclusionMode m);

/// Inverses of to_string; ParseError on any other spelling.
AugmentKind augment_kind_from_string(const std::string& s);
OcclusionMode occlusion_mode_from_string(const std::string& s);

/// One augmentation recipe. Only the fields of the active kind are honored:
/// pace uses pace_factor, occlusion uses h/n/occlusion_mode, masking uses
/// h/p. The seed is used when the spec is applied directly; augment_batch
/// overrides it with a per-member derived seed.
///
/// pace_factor == 0 is the "sample" sentinel: each application draws the
/// factor uniformly from [0.75, 1.33] (seeded), the default training policy.
struct AugmentationSpec {
    AugmentKind kind = AugmentKind::kPace;
    double pace_factor = 1.0;
    std::size_t h = 10;
    std::size_t n = 0;
    double p = 0.0;
    OcclusionMode occlusion_mode = OcclusionMode::kZero;
    std::uint64_t seed = 0;
};

inline constexpr double kPaceSampleMin = 0.75;
inline constexpr double kPaceSampleMax = 1.33;

/// Changes playback speed. factor > 1 speeds up (fewer frames, frames picked
/// at rounded stride positions source_row = round(i*T/T')); factor < 1 slows
/// down (linear interpolation); factor == 1 returns a bitwise copy.
/// Output length T' = max(2, round(T/factor)).
skeldata::SkeletalSequence augment_pace(const skeldata::SkeletalSequence& x, double factor);

/// Views the sequence as ceil(T/h) windows of h frames (last window may be
/// short). Per window, n joints are drawn without replacement (seeded); their
/// 3 angle columns are zeroed (kZero) or frozen at the window's first frame
/// (kRepeatFirst) for every frame of the window.
skeldata::SkeletalSequence augment_joint_occlusion(const skeldata::SkeletalSequence& x,
                                                   std::size_t h, std::size_t n,
                                                   OcclusionMode mode, std::uint64_t seed);

/// Per window of h frames, with probability p all D features of the window
/// are set to 0 (seeded Bernoulli per window, partial last window included).
skeldata::SkeletalSequence augment_masking(const skeldata::SkeletalSequence& x,
                                           std::size_t h, double p, std::uint64_t seed);

/// Applies one spec (honoring the pace-sampling sentinel) with the given seed.
skeldata::SkeletalSequence apply_augmentation(const skeldata::SkeletalSequence& x,
                                              const AugmentationSpec& spec,
                                              std::uint64_t seed);

/// For each batch member, draws one spec uniformly from the policy (seeded;
/// member i uses the sub-seed derived from (seed, i)) and applies it.
/// Pace-augmented members are resampled back to their original T so the
/// batch stays rectangular. The result never aliases the input.
std::vector<skeldata::SkeletalSequence> augment_batch(
    const std::vector<skeldata::SkeletalSequence>& batch,
    const std::vector<AugmentationSpec>& policy, std::uint64_t seed);

}  // namespace mqa::augment
