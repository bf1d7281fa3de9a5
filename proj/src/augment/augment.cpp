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

#include "mqa/augment/augment.hpp"

#include <algorithm>
#include <cmath>

#include "mqa/errors.hpp"
#include "mqa/numcore/rng.hpp"

namespace mqa::augment {

using skeldata::SkeletalSequence;

std::string to_string(AugmentKind k) {
    switch (k) {
        case AugmentKind::kPace:
            return "pace";
        case AugmentKind::kOcclusion:
            return "occlusion";
        default:
            return "masking";
    }
}

std::string to_string(OcclusionMode m) {
    return m == OcclusionMode::kZero ? "zero" : "repeat_first";
}

AugmentKind augment_kind_from_string(const std::string& s) {
    if (s == "pace") return AugmentKind::kPace;
    if (s == "occlusion") return AugmentKind::kOcclusion;
    if (s == "masking") return AugmentKind::kMasking;
    throw ParseError("unknown augmentation kind: " + s);
}

OcclusionMode occlusion_mode_from_string(const std::string& s) {
    if (s == "zero") return OcclusionMode::kZero;
    if (s == "repeat_first") return OcclusionMode::kRepeatFirst;
    throw ParseError("unknown occlusion mode: " + s);
}

SkeletalSequence augment_pace(const SkeletalSequence& x, double factor) {
    if (!(factor > 0.0)) {
        throw ParameterError("augment_pace: factor must be positive, got " +
                             std::to_string(factor));
    }
    const std::size_t T = x.frame_count();
    const std::size_t D = x.feature_count();
    if (T == 0) throw DataError("augment_pace: empty sequence " + x.id);
    if (factor == 1.0) return x;

    const auto target = static_cast<std::size_t>(std::max<long long>(
        2, std::llround(static_cast<double>(T) / factor)));
    if (target == T) return x;
    if (target > T) return skeldata::resample_sequence(x, target);

    SkeletalSequence out = x;
    numcore::Tensor frames({target, D}, 0.0);
    const double* src = x.frames.data().data();
    double* dst = frames.data().data();
    for (std::size_t i = 0; i < target; ++i) {
        const auto pick = static_cast<std::size_t>(std::llround(
            static_cast<double>(i) * static_cast<double>(T) / static_cast<double>(target)));
        const std::size_t row = std::min(pick, T - 1);
        std::copy(src + row * D, src + (row + 1) * D, dst + i * D);
    }
    out.frames = std::move(frames);
    return out;
}

SkeletalSequence augment_joint_occlusion(const SkeletalSequence& x, std::size_t h,
                                         std::size_t n, OcclusionMode mode,
                                         std::uint64_t seed) {
    const std::size_t T = x.frame_count();
    const std::size_t M = x.joint_count;
    if (h == 0 || h > T) {
        throw ParameterError("augment_joint_occlusion: h must satisfy 1 <= h <= T");
    }
    if (n > M) {
        throw ParameterError("augment_joint_occlusion: n = " + std::to_string(n) +
                             " exceeds joint count " + std::to_string(M));
    }
    SkeletalSequence out = x;
    if (n == 0) return out;

    numcore::Rng rng(seed);
    const std::size_t D = x.feature_count();
    double* dst = out.frames.data().data();
    for (std::size_t start = 0; start < T; start += h) {
        const std::size_t end = std::min(start + h, T);
        const std::vector<std::size_t> joints = rng.sample_without_replacement(M, n);
        for (std::size_t joint : joints) {
            const std::size_t c0 = 3 * joint;
            for (std::size_t t = start; t < end; ++t) {
                for (std::size_t c = c0; c < c0 + 3; ++c) {
                    dst[t * D + c] = mode == OcclusionMode::kZero
                                         ? 0.0
                                         : out.frames.at(start, c);
                }
            }
        }
    }
    return out;
}

SkeletalSequence augment_masking(const SkeletalSequence& x, std::size_t h, double p,
                                 std::uint64_t seed) {
    const std::size_t T = x.frame_count();
    if (h == 0 || h > T) {
        throw ParameterError("augment_masking: h must satisfy 1 <= h <= T");
    }
    if (p < 0.0 || p > 1.0) {
        throw ParameterError("augment_masking: p must lie in [0, 1]");
    }
    SkeletalSequence out = x;
    numcore::Rng rng(seed);
    const std::size_t D = x.feature_count();
    double* dst = out.frames.data().data();
    for (std::size_t start = 0; start < T; start += h) {
        const std::size_t end = std::min(start + h, T);
        if (rng.bernoulli(p)) {
            std::fill(dst + start * D, dst + end * D, 0.0);
        }
    }
    return out;
}

SkeletalSequence apply_augmentation(const SkeletalSequence& x, const AugmentationSpec& spec,
                                    std::uint64_t seed) {
    switch (spec.kind) {
        case AugmentKind::kPace: {
            double factor = spec.pace_factor;
            if (factor == 0.0) {
                numcore::Rng rng(seed);
                factor = rng.uniform(kPaceSampleMin, kPaceSampleMax);
            }
            return augment_pace(x, factor);
        }
        case AugmentKind::kOcclusion:
            return augment_joint_occlusion(x, spec.h, spec.n, spec.occlusion_mode, seed);
        case AugmentKind::kMasking:
            return augment_masking(x, spec.h, spec.p, seed);
    }
    throw ParameterError("apply_augmentation: unknown kind");
}

std::vector<SkeletalSequence> augment_batch(const std::vector<SkeletalSequence>& batch,
                                            const std::vector<AugmentationSpec>& policy,
                                            std::uint64_t seed) {
    if (policy.empty()) throw ConfigError("augment_batch: empty augmentation policy");
    std::vector<SkeletalSequence> out;
    out.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::uint64_t sub = numcore::derive_seed(seed, i);
        numcore::Rng rng(sub);
        const AugmentationSpec& spec =
            policy[static_cast<std::size_t>(rng.bounded(policy.size()))];
        const std::uint64_t apply_seed = numcore::derive_seed(sub, 1);
        SkeletalSequence aug = apply_augmentation(batch[i], spec, apply_seed);
        if (aug.frame_count() != batch[i].frame_count()) {
            aug = skeldata::resample_sequence(aug, batch[i].frame_count());
        }
        out.push_back(std::move(aug));
    }
    return out;
}

}  // namespace mqa::augment
