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
#include <optional>
#include <string>
#include <vector>

#include "mqa/numcore/tensor.hpp"

namespace mqa::skeldata {

enum class Device { kVicon, kKinect };
enum class Label { kCorrect, kIncorrect, kUnlabeled };

std::string to_string(Device d);
std::string to_string(Label l);

/// One recorded repetition: T frames of M joints, 3 Euler angles (degrees)
/// per joint, so frames is T-by-D with D = 3*M.
struct SkeletalSequence {
    std::string id;  // stable identifier, usually the source file stem
    numcore::Tensor frames;
    std::size_t joint_count = 0;
    double frame_rate = 0.0;
    Device device = Device::kVicon;
    Label label = Label::kUnlabeled;
    std::optional<double> clinical_score;

    std::size_t frame_count() const { return frames.ndim() == 2 ? frames.dim(0) : 0; }
    std::size_t feature_count() const { return frames.ndim() == 2 ? frames.dim(1) : 0; }
};

/// Contiguous non-overlapping W-frame slices of a sequence.
struct WindowedSequence {
    std::vector<numcore::Tensor> windows;  // each W-by-D
    std::size_t W = 0;
    std::size_t N = 0;
};

struct DatasetSplit {
    std::vector<SkeletalSequence> train;
    std::vector<SkeletalSequence> validation;
    std::uint64_t seed = 0;
};

/// Per-feature linear interpolation at target_T equally spaced positions over
/// [0, T-1]. Endpoint frames are copied bitwise; target_T == T is the
/// identity.
SkeletalSequence resample_sequence(const SkeletalSequence& x, std::size_t target_T);

/// floor(T/W) windows; the trailing T mod W frames are dropped.
WindowedSequence window_slice(const SkeletalSequence& x, std::size_t W);

/// Seeded shuffle, then the first floor(ratio*n) sequences (clamped so both
/// sides stay non-empty) become the training side.
DatasetSplit split_dataset(std::vector<SkeletalSequence> sequences, double ratio,
                           std::uint64_t seed);

/// KIMORE clinical scores live on [0, 50]; the pipeline's quality scores live
/// on [0, 1].
double normalize_clinical_score(double raw_0_to_50);

}  // namespace mqa::skeldata
