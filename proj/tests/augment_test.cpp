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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "mqa/augment/augment.hpp"
#include "mqa/errors.hpp"
#include "mqa/numcore/rng.hpp"

using namespace mqa;
using namespace mqa::augment;
using skeldata::SkeletalSequence;

namespace {

SkeletalSequence make_sequence(std::size_t T, std::size_t M, std::uint64_t seed) {
    numcore::Rng rng(seed);
    SkeletalSequence s;
    s.id = "seq";
    s.joint_count = M;
    s.frames = numcore::Tensor({T, 3 * M}, 0.0);
    // Away from zero so zeroed cells are unambiguous.
    for (double& d : s.frames.data()) d = rng.uniform(1.0, 180.0);
    return s;
}

bool frames_equal(const SkeletalSequence& a, const SkeletalSequence& b) {
    if (!a.frames.same_shape(b.frames)) return false;
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        if (a.frames[i] != b.frames[i]) return false;
    }
    return true;
}

std::size_t count_zero_cells(const SkeletalSequence& s) {
    std::size_t n = 0;
    for (double d : s.frames.data()) {
        if (d == 0.0) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("pace: factor 1 is a bitwise copy") {
    const SkeletalSequence s = make_sequence(50, 3, 1);
    const SkeletalSequence out = augment_pace(s, 1.0);
    CHECK(frames_equal(s, out));
    CHECK(out.id == s.id);
}

TEST_CASE("pace: factor 1.25 shortens 100 frames to 80") {
    const SkeletalSequence s = make_sequence(100, 2, 2);
    const SkeletalSequence out = augment_pace(s, 1.25);
    CHECK(out.frame_count() == 80);
}

TEST_CASE("pace: factor 2 picks strided source frames") {
    SkeletalSequence s;
    s.id = "ramp";
    s.joint_count = 1;
    s.frames = numcore::Tensor::from_data({4, 3}, {0, 0, 0, 2, 2, 2, 4, 4, 4, 6, 6, 6});
    const SkeletalSequence out = augment_pace(s, 2.0);
    REQUIRE(out.frame_count() == 2);
    CHECK(out.frames.at(0, 0) == 0.0);
    CHECK(out.frames.at(1, 0) == 4.0);
}

TEST_CASE("pace: factor below 1 interpolates new frames") {
    SkeletalSequence s;
    s.id = "ramp";
    s.joint_count = 1;
    s.frames = numcore::Tensor::from_data({3, 3}, {0, 0, 0, 2, 2, 2, 4, 4, 4});
    const SkeletalSequence out = augment_pace(s, 0.5);
    REQUIRE(out.frame_count() == 6);
    // Position of output frame j is j*(T-1)/(T'-1) = 0.4*j in source frames.
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(std::abs(out.frames.at(j, 0) - 0.8 * static_cast<double>(j)) < 1e-12);
    }
}

TEST_CASE("pace: output never drops below two frames") {
    const SkeletalSequence s = make_sequence(3, 1, 3);
    const SkeletalSequence out = augment_pace(s, 100.0);
    CHECK(out.frame_count() == 2);
    CHECK_THROWS_AS(augment_pace(s, 0.0), ParameterError);
    CHECK_THROWS_AS(augment_pace(s, -1.0), ParameterError);
}

TEST_CASE("occlusion: n = 0 is a bitwise copy") {
    const SkeletalSequence s = make_sequence(20, 3, 4);
    const SkeletalSequence out =
        augment_joint_occlusion(s, 5, 0, OcclusionMode::kZero, 7);
    CHECK(frames_equal(s, out));
}

TEST_CASE("occlusion: zero mode blanks n*3*h cells per window") {
    const SkeletalSequence s = make_sequence(4, 2, 5);
    // T=4, h=2 -> 2 windows; n=1 joint each -> 1*3*2 = 6 zeros per window.
    const SkeletalSequence out =
        augment_joint_occlusion(s, 2, 1, OcclusionMode::kZero, 11);
    CHECK(count_zero_cells(out) == 12);
}

TEST_CASE("occlusion: exactly n joints per window, others untouched") {
    const SkeletalSequence s = make_sequence(30, 4, 6);
    const std::size_t h = 10, n = 2;
    const SkeletalSequence out =
        augment_joint_occlusion(s, h, n, OcclusionMode::kZero, 13);
    for (std::size_t w = 0; w < 3; ++w) {
        std::size_t occluded = 0;
        for (std::size_t m = 0; m < 4; ++m) {
            bool all_zero = true;
            bool untouched = true;
            for (std::size_t t = w * h; t < (w + 1) * h; ++t) {
                for (std::size_t c = 3 * m; c < 3 * m + 3; ++c) {
                    if (out.frames.at(t, c) != 0.0) all_zero = false;
                    if (out.frames.at(t, c) != s.frames.at(t, c)) untouched = false;
                }
            }
            CHECK((all_zero || untouched));
            if (all_zero) ++occluded;
        }
        CHECK(occluded == n);
    }
}

TEST_CASE("occlusion: repeat mode freezes the window's first frame") {
    const SkeletalSequence s = make_sequence(12, 2, 8);
    const std::size_t h = 4;
    const SkeletalSequence out =
        augment_joint_occlusion(s, h, 1, OcclusionMode::kRepeatFirst, 17);
    CHECK(count_zero_cells(out) == 0);
    for (std::size_t w = 0; w < 3; ++w) {
        std::size_t frozen = 0;
        for (std::size_t m = 0; m < 2; ++m) {
            bool is_frozen = true;
            bool untouched = true;
            for (std::size_t t = w * h; t < (w + 1) * h; ++t) {
                for (std::size_t c = 3 * m; c < 3 * m + 3; ++c) {
                    if (out.frames.at(t, c) != s.frames.at(w * h, c)) is_frozen = false;
                    if (out.frames.at(t, c) != s.frames.at(t, c)) untouched = false;
                }
            }
            CHECK((is_frozen || untouched));
            if (is_frozen && !untouched) ++frozen;
        }
        CHECK(frozen == 1);
    }
}

TEST_CASE("occlusion: handles a short last window and bad arguments") {
    const SkeletalSequence s = make_sequence(7, 2, 9);
    // Windows [0,3), [3,6), [6,7): 3 windows, 1 joint each -> 3+3+1 frames zeroed.
    const SkeletalSequence out =
        augment_joint_occlusion(s, 3, 1, OcclusionMode::kZero, 19);
    CHECK(count_zero_cells(out) == 3 * (3 + 3 + 1));

    CHECK_THROWS_AS(augment_joint_occlusion(s, 3, 3, OcclusionMode::kZero, 1),
                    ParameterError);
    CHECK_THROWS_AS(augment_joint_occlusion(s, 0, 1, OcclusionMode::kZero, 1),
                    ParameterError);
    CHECK_THROWS_AS(augment_joint_occlusion(s, 8, 1, OcclusionMode::kZero, 1),
                    ParameterError);
}

TEST_CASE("masking: p = 0 copies, p = 1 blanks every window") {
    const SkeletalSequence s = make_sequence(25, 2, 10);
    CHECK(frames_equal(s, augment_masking(s, 10, 0.0, 3)));

    // T=25, h=10: windows [0,10), [10,20), [20,25); the short one included.
    const SkeletalSequence all = augment_masking(s, 10, 1.0, 3);
    CHECK(count_zero_cells(all) == 25 * 6);

    CHECK_THROWS_AS(augment_masking(s, 10, 1.5, 3), ParameterError);
    CHECK_THROWS_AS(augment_masking(s, 0, 0.5, 3), ParameterError);
}

TEST_CASE("masking: long-run window mask frequency approaches p") {
    const double p = 0.3;
    const SkeletalSequence s = make_sequence(200, 1, 12);
    const std::size_t h = 10;          // 20 windows per run
    const std::size_t runs = 500;      // 10000 windows total
    std::size_t masked = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        const SkeletalSequence out = augment_masking(s, h, p, 1000 + r);
        for (std::size_t w = 0; w < 20; ++w) {
            bool zero = true;
            for (std::size_t t = w * h; t < (w + 1) * h && zero; ++t) {
                for (std::size_t c = 0; c < 3; ++c) {
                    if (out.frames.at(t, c) != 0.0) {
                        zero = false;
                        break;
                    }
                }
            }
            if (zero) ++masked;
        }
    }
    const double freq = static_cast<double>(masked) / (runs * 20.0);
    CHECK(std::abs(freq - p) < 0.01);
}

TEST_CASE("seeded augmentations are deterministic") {
    const SkeletalSequence s = make_sequence(40, 3, 14);
    CHECK(frames_equal(augment_joint_occlusion(s, 10, 1, OcclusionMode::kZero, 5),
                       augment_joint_occlusion(s, 10, 1, OcclusionMode::kZero, 5)));
    CHECK(frames_equal(augment_masking(s, 10, 0.5, 5), augment_masking(s, 10, 0.5, 5)));

    AugmentationSpec sampled_pace;
    sampled_pace.kind = AugmentKind::kPace;
    sampled_pace.pace_factor = 0.0;  // sample the factor
    const SkeletalSequence a = apply_augmentation(s, sampled_pace, 21);
    const SkeletalSequence b = apply_augmentation(s, sampled_pace, 21);
    CHECK(frames_equal(a, b));
    // Sampled factors stay in [0.75, 1.33], so T' stays in [T/1.33, T/0.75].
    CHECK(a.frame_count() >= 30);
    CHECK(a.frame_count() <= 54);
}

TEST_CASE("batch: empty policy is rejected, identity policy copies") {
    std::vector<SkeletalSequence> batch = {make_sequence(16, 2, 15),
                                           make_sequence(16, 2, 16)};
    CHECK_THROWS_AS(augment_batch(batch, {}, 1), ConfigError);

    AugmentationSpec identity;
    identity.kind = AugmentKind::kPace;
    identity.pace_factor = 1.0;
    const std::vector<SkeletalSequence> out = augment_batch(batch, {identity}, 1);
    REQUIRE(out.size() == 2);
    CHECK(frames_equal(out[0], batch[0]));
    CHECK(frames_equal(out[1], batch[1]));
    CHECK(out[0].frames.data().data() != batch[0].frames.data().data());
}

TEST_CASE("batch: same seed reproduces, spec choice is near uniform") {
    AugmentationSpec pace;  // identity: output equals input
    pace.kind = AugmentKind::kPace;
    pace.pace_factor = 1.0;

    AugmentationSpec mask;  // blanks everything
    mask.kind = AugmentKind::kMasking;
    mask.h = 8;
    mask.p = 1.0;

    AugmentationSpec occ;  // blanks one of two joints
    occ.kind = AugmentKind::kOcclusion;
    occ.h = 8;
    occ.n = 1;
    occ.occlusion_mode = OcclusionMode::kZero;

    const SkeletalSequence proto = make_sequence(8, 2, 17);
    std::vector<SkeletalSequence> batch(1000, proto);

    const std::vector<SkeletalSequence> out = augment_batch(batch, {pace, mask, occ}, 77);
    const std::vector<SkeletalSequence> rerun =
        augment_batch(batch, {pace, mask, occ}, 77);
    REQUIRE(out.size() == 1000);

    std::size_t n_pace = 0, n_mask = 0, n_occ = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(frames_equal(out[i], rerun[i]));
        const std::size_t zeros = count_zero_cells(out[i]);
        if (zeros == 0) {
            CHECK(frames_equal(out[i], proto));
            ++n_pace;
        } else if (zeros == out[i].frames.size()) {
            ++n_mask;
        } else {
            CHECK(zeros == 8 * 3);
            ++n_occ;
        }
    }
    CHECK(std::abs(n_pace / 1000.0 - 1.0 / 3.0) < 0.05);
    CHECK(std::abs(n_mask / 1000.0 - 1.0 / 3.0) < 0.05);
    CHECK(std::abs(n_occ / 1000.0 - 1.0 / 3.0) < 0.05);
}

TEST_CASE("batch: pace members come back at their original length") {
    AugmentationSpec fast;
    fast.kind = AugmentKind::kPace;
    fast.pace_factor = 2.0;

    const SkeletalSequence s = make_sequence(9, 1, 18);
    const std::vector<SkeletalSequence> out = augment_batch({s}, {fast}, 5);
    REQUIRE(out.size() == 1);
    CHECK(out[0].frame_count() == 9);
    // Downsampling then resampling back loses detail, so frames must differ.
    CHECK_FALSE(frames_equal(out[0], s));
}
