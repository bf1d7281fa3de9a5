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

#include "mqa/harness/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "mqa/errors.hpp"
#include "mqa/numcore/rng.hpp"

namespace mqa::harness {

using numcore::Rng;
using numcore::Tensor;

namespace {

std::string indexed_id(const char* stem, std::size_t i, const char* suffix = "") {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu%s", stem, i, suffix);
    return buf;
}

skeldata::SkeletalSequence blank_sequence(std::string id, std::size_t T,
                                          std::size_t joints) {
    skeldata::SkeletalSequence s;
    s.id = std::move(id);
    s.joint_count = joints;
    s.frames = Tensor({T, 3 * joints}, 0.0);
    return s;
}

/// One smooth channel: offset + amp * sin(freq * t + phase).
void fill_channel(Tensor& frames, std::size_t c, double offset, double amp, double freq,
                  double phase) {
    for (std::size_t t = 0; t < frames.rows(); ++t) {
        frames.at(t, c) = offset + amp * std::sin(freq * static_cast<double>(t) + phase);
    }
}

}  // namespace

std::vector<LabeledSequence> make_overfit_dataset(std::size_t n, std::size_t T,
                                                  std::size_t joints,
                                                  std::uint64_t seed) {
    if (n == 0 || T < 2 || joints == 0) {
        throw ConfigError("make_overfit_dataset: need n >= 1, T >= 2, joints >= 1");
    }
    Rng rng(seed);
    std::vector<LabeledSequence> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double score = (i % 2 == 0) ? 0.1 : 0.9;
        skeldata::SkeletalSequence s = blank_sequence(indexed_id("synth", i), T, joints);
        for (std::size_t c = 0; c < 3 * joints; ++c) {
            // Amplitude tracks the score; everything else is per-channel jitter.
            fill_channel(s.frames, c, rng.uniform(-0.2, 0.2), 10.0 * score,
                         0.4 + 0.05 * static_cast<double>(c), rng.uniform(0.0, 0.3));
        }
        out.push_back({std::move(s), score});
    }
    return out;
}

std::vector<skeldata::SkeletalSequence> make_correct_incorrect_dataset(
    std::size_t per_class, std::size_t T, std::size_t joints, std::uint64_t seed) {
    if (per_class == 0 || T < 2 || joints == 0) {
        throw ConfigError(
            "make_correct_incorrect_dataset: need per_class >= 1, T >= 2, joints >= 1");
    }
    Rng rng(seed);
    const std::size_t D = 3 * joints;

    // The exercise template every repetition follows.
    std::vector<double> offset(D), amp(D), freq(D), phase(D);
    for (std::size_t c = 0; c < D; ++c) {
        offset[c] = rng.uniform(-30.0, 30.0);
        amp[c] = rng.uniform(8.0, 20.0);
        freq[c] = rng.uniform(0.2, 0.5);
        phase[c] = rng.uniform(0.0, 6.28);
    }

    std::vector<skeldata::SkeletalSequence> out;
    out.reserve(2 * per_class);
    for (std::size_t cls = 0; cls < 2; ++cls) {
        const bool incorrect = cls == 1;
        for (std::size_t i = 0; i < per_class; ++i) {
            skeldata::SkeletalSequence s = blank_sequence(
                indexed_id("rep", i, incorrect ? "_inc" : ""), T, joints);
            s.label = incorrect ? skeldata::Label::kIncorrect : skeldata::Label::kCorrect;
            for (std::size_t c = 0; c < D; ++c) {
                const double damp = incorrect ? rng.uniform(0.3, 0.6) : 1.0;
                const double shift = incorrect ? rng.uniform(1.2, 2.4) : 0.0;
                fill_channel(s.frames, c, offset[c], amp[c] * damp, freq[c],
                             phase[c] + shift);
                const double noise = incorrect ? 3.0 : 0.4;
                for (std::size_t t = 0; t < T; ++t) {
                    s.frames.at(t, c) += rng.normal(0.0, noise);
                }
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<LabeledSequence> make_part_signal_dataset(
    std::size_t n, std::size_t T, const mqaformer::BodyPartition& parts,
    const std::vector<std::size_t>& signal_parts, std::uint64_t seed) {
    if (n < 2 || T < 2) {
        throw ConfigError("make_part_signal_dataset: need n >= 2, T >= 2");
    }
    const std::size_t joints = parts.joint_count();
    parts.validate(joints);
    std::vector<bool> is_signal_joint(joints, false);
    for (std::size_t p : signal_parts) {
        if (p >= parts.size()) {
            throw ConfigError("make_part_signal_dataset: signal part index " +
                              std::to_string(p) + " out of range");
        }
        for (std::size_t j : parts.parts[p]) is_signal_joint[j] = true;
    }

    Rng rng(seed);
    std::vector<LabeledSequence> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double score =
            0.1 + 0.8 * static_cast<double>(i) / static_cast<double>(n - 1);
        skeldata::SkeletalSequence s = blank_sequence(indexed_id("part", i), T, joints);
        for (std::size_t j = 0; j < joints; ++j) {
            for (std::size_t k = 0; k < 3; ++k) {
                const std::size_t c = 3 * j + k;
                if (is_signal_joint[j]) {
                    fill_channel(s.frames, c, 0.0, 12.0 * score,
                                 0.5 + 0.1 * static_cast<double>(k),
                                 rng.uniform(0.0, 0.2));
                } else {
                    // Score-independent distractor: per-sequence random
                    // amplitude and phase, so attending here injects variance
                    // that carries no label information.
                    fill_channel(s.frames, c, 1.0, rng.uniform(0.5, 2.0),
                                 0.3 + 0.1 * static_cast<double>(k),
                                 rng.uniform(0.0, 6.28));
                }
            }
        }
        out.push_back({std::move(s), score});
    }
    return out;
}

}  // namespace mqa::harness
