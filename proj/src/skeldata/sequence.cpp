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

#include "mqa/skeldata/sequence.hpp"

#include <algorithm>
#include <cmath>

#include "mqa/errors.hpp"
#include "mqa/numcore/rng.hpp"

namespace mqa::skeldata {

std::string to_string(Device d) { return d == Device::kVicon ? "vicon" : "kinect"; }

std::string to_string(Label l) {
    switch (l) {
        case Label::kCorrect:
            return "correct";
        case Label::kIncorrect:
            return "incorrect";
        default:
            return "unlabeled";
    }
}

SkeletalSequence resample_sequence(const SkeletalSequence& x, std::size_t target_T) {
    const std::size_t T = x.frame_count();
    const std::size_t D = x.feature_count();
    if (T == 0) throw DataError("resample_sequence: empty sequence " + x.id);
    if (target_T < 2) throw ParameterError("resample_sequence: target_T must be >= 2");

    SkeletalSequence out = x;
    if (target_T == T) return out;

    numcore::Tensor frames({target_T, D}, 0.0);
    const double* src = x.frames.data().data();
    double* dst = frames.data().data();
    for (std::size_t j = 0; j < target_T; ++j) {
        // Exact at the endpoints: j = target_T-1 divides out to exactly T-1.
        const double pos = static_cast<double>(j) * static_cast<double>(T - 1) /
                           static_cast<double>(target_T - 1);
        const std::size_t lo = std::min(static_cast<std::size_t>(pos), T - 1);
        const double frac = pos - static_cast<double>(lo);
        if (frac == 0.0 || lo + 1 >= T) {
            for (std::size_t d = 0; d < D; ++d) dst[j * D + d] = src[lo * D + d];
        } else {
            const std::size_t hi = lo + 1;
            for (std::size_t d = 0; d < D; ++d) {
                dst[j * D + d] = (1.0 - frac) * src[lo * D + d] + frac * src[hi * D + d];
            }
        }
    }
    out.frames = std::move(frames);
    return out;
}

WindowedSequence window_slice(const SkeletalSequence& x, std::size_t W) {
    const std::size_t T = x.frame_count();
    const std::size_t D = x.feature_count();
    if (W == 0) throw ParameterError("window_slice: W must be positive");
    if (T < W) {
        throw DimensionError("window_slice: sequence " + x.id + " has " + std::to_string(T) +
                             " frames, shorter than window " + std::to_string(W));
    }
    WindowedSequence out;
    out.W = W;
    out.N = T / W;
    out.windows.reserve(out.N);
    const double* src = x.frames.data().data();
    for (std::size_t n = 0; n < out.N; ++n) {
        numcore::Tensor w({W, D}, 0.0);
        std::copy(src + n * W * D, src + (n + 1) * W * D, w.data().data());
        out.windows.push_back(std::move(w));
    }
    return out;
}

DatasetSplit split_dataset(std::vector<SkeletalSequence> sequences, double ratio,
                           std::uint64_t seed) {
    if (sequences.size() < 2) {
        throw DataError("split_dataset: need at least 2 sequences, have " +
                        std::to_string(sequences.size()));
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ParameterError("split_dataset: ratio must lie strictly between 0 and 1");
    }
    numcore::Rng rng(seed);
    rng.shuffle(sequences);
    const std::size_t n = sequences.size();
    std::size_t n_train = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);  // both sides stay non-empty
    DatasetSplit split;
    split.seed = seed;
    split.train.assign(sequences.begin(),
                       sequences.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.assign(sequences.begin() + static_cast<std::ptrdiff_t>(n_train),
                            sequences.end());
    return split;
}

double normalize_clinical_score(double raw_0_to_50) {
    if (raw_0_to_50 < 0.0 || raw_0_to_50 > 50.0) {
        throw DataError("clinical score outside [0, 50]: " + std::to_string(raw_0_to_50));
    }
    return raw_0_to_50 / 50.0;
}

}  // namespace mqa::skeldata
