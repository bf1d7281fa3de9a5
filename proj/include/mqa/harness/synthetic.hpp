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
#include <vector>

#include "mqa/harness/train.hpp"
#include "mqa/mqaformer/embedder.hpp"
#include "mqa/skeldata/sequence.hpp"

namespace mqa::harness {

/// Deterministic generators for pipeline tests and the `synth` command.
/// All sequences are smooth per-joint sinusoids; ids encode the generator,
/// index, and class so downstream grouping by name works.

/// n sequences with scores alternating 0.1 / 0.9. The score controls the
/// motion amplitude, so the mapping is learnable from the frames alone.
std::vector<LabeledSequence> make_overfit_dataset(std::size_t n, std::size_t T,
                                                  std::size_t joints,
                                                  std::uint64_t seed);

/// per_class correct plus per_class incorrect repetitions of one synthetic
/// exercise. Correct repetitions are the template with small noise;
/// incorrect ones are phase-shifted, damped, and noisier. Labels are set,
/// ids end in "_inc" for the incorrect half.
std::vector<skeldata::SkeletalSequence> make_correct_incorrect_dataset(
    std::size_t per_class, std::size_t T, std::size_t joints, std::uint64_t seed);

/// n scored sequences where only the joints in `signal_parts` (indices into
/// `parts`) carry score-dependent motion; every other joint moves with its
/// own random, score-independent amplitude and phase, so a part-attention
/// model must attend away from it. Scores are spread evenly over [0.1, 0.9].
std::vector<LabeledSequence> make_part_signal_dataset(
    std::size_t n, std::size_t T, const mqaformer::BodyPartition& parts,
    const std::vector<std::size_t>& signal_parts, std::uint64_t seed);

}  // namespace mqa::harness
