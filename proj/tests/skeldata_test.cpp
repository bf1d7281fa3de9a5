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

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "mqa/errors.hpp"
#include "mqa/numcore/rng.hpp"
#include "mqa/skeldata/io.hpp"
#include "mqa/skeldata/sequence.hpp"
#include "support/tempdir.hpp"

using namespace mqa;
using namespace mqa::skeldata;
using mqa::testing::TempDir;

namespace {

SkeletalSequence make_sequence(std::size_t T, std::size_t M, std::uint64_t seed,
                               const std::string& id = "seq") {
    numcore::Rng rng(seed);
    SkeletalSequence s;
    s.id = id;
    s.joint_count = M;
    s.frames = numcore::Tensor({T, 3 * M}, 0.0);
    for (double& d : s.frames.data()) d = rng.uniform(-180.0, 180.0);
    return s;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    os << content;
}

}  // namespace

TEST_CASE("load_sequence echoes a plain comma file") {
    TempDir dir("load");
    const std::string path = dir.file("tiny.txt");
    write_text(path, "0,0,0,0,0,0\n1,1,1,1,1,1\n");
    const SkeletalSequence s = load_sequence(path, FileFormat::kUiprmdAngles);
    CHECK(s.frame_count() == 2);
    CHECK(s.joint_count == 2);
    CHECK(s.feature_count() == 6);
    CHECK(s.frames.at(0, 0) == 0.0);
    CHECK(s.frames.at(1, 5) == 1.0);
    CHECK(s.device == Device::kVicon);
    CHECK(s.id == "tiny");
}

TEST_CASE("load_sequence accepts whitespace separation and blank lines") {
    TempDir dir("load_ws");
    const std::string path = dir.file("ws.txt");
    write_text(path, "1.5 -2 3\n\n4 5.25 -6\n");
    const SkeletalSequence s = load_sequence(path, FileFormat::kKimore);
    CHECK(s.frame_count() == 2);
    CHECK(s.joint_count == 1);
    CHECK(s.frames.at(0, 1) == -2.0);
    CHECK(s.frames.at(1, 2) == -6.0);
    CHECK(s.device == Device::kKinect);
}

TEST_CASE("load_sequence errors name the line") {
    TempDir dir("load_err");

    const std::string bad_token = dir.file("tok.txt");
    write_text(bad_token, "1,2,3\n1,oops,3\n");
    CHECK_THROWS_WITH_AS(load_sequence(bad_token, FileFormat::kUiprmdAngles),
                         doctest::Contains(":2:"), ParseError);

    const std::string ragged = dir.file("ragged.txt");
    write_text(ragged, "1,2,3\n1,2,3,4,5,6\n");
    CHECK_THROWS_WITH_AS(load_sequence(ragged, FileFormat::kUiprmdAngles),
                         doctest::Contains(":2:"), ParseError);

    const std::string indivisible = dir.file("cols.txt");
    write_text(indivisible, "1,2,3,4\n");
    CHECK_THROWS_AS(load_sequence(indivisible, FileFormat::kUiprmdAngles), ParseError);

    const std::string empty = dir.file("empty.txt");
    write_text(empty, "\n\n");
    CHECK_THROWS_AS(load_sequence(empty, FileFormat::kUiprmdAngles), ParseError);

    CHECK_THROWS_AS(load_sequence(dir.file("missing.txt"), FileFormat::kUiprmdAngles),
                    IoError);
}

TEST_CASE("save then load round-trips bit exactly") {
    TempDir dir("roundtrip");
    const SkeletalSequence s = make_sequence(7, 3, 99);
    const std::string path = dir.file("seq.txt");
    save_sequence(path, s);
    const SkeletalSequence r = load_sequence(path, FileFormat::kUiprmdAngles);
    REQUIRE(r.frames.same_shape(s.frames));
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
        CHECK(r.frames[i] == s.frames[i]);
    }
}

TEST_CASE("resample identity and midpoint interpolation") {
    SkeletalSequence s = make_sequence(5, 2, 7);
    const SkeletalSequence same = resample_sequence(s, 5);
    for (std::size_t i = 0; i < s.frames.size(); ++i) CHECK(same.frames[i] == s.frames[i]);

    SkeletalSequence two;
    two.id = "two";
    two.joint_count = 1;
    two.frames = numcore::Tensor::from_data({2, 3}, {0, 0, 0, 4, 4, 4});
    const SkeletalSequence three = resample_sequence(two, 3);
    REQUIRE(three.frame_count() == 3);
    CHECK(three.frames.at(0, 0) == 0.0);
    CHECK(three.frames.at(1, 0) == 2.0);
    CHECK(three.frames.at(2, 0) == 4.0);
}

TEST_CASE("resample preserves endpoints bitwise and linear ramps") {
    const SkeletalSequence s = make_sequence(11, 2, 31);
    for (std::size_t target : {2u, 3u, 7u, 11u, 24u, 240u}) {
        const SkeletalSequence r = resample_sequence(s, target);
        REQUIRE(r.frame_count() == target);
        for (std::size_t d = 0; d < s.feature_count(); ++d) {
            CHECK(r.frames.at(0, d) == s.frames.at(0, d));
            CHECK(r.frames.at(target - 1, d) == s.frames.at(10, d));
        }
    }

    SkeletalSequence ramp;
    ramp.id = "ramp";
    ramp.joint_count = 1;
    ramp.frames = numcore::Tensor({9, 3}, 0.0);
    for (std::size_t t = 0; t < 9; ++t) {
        for (std::size_t d = 0; d < 3; ++d) {
            ramp.frames.at(t, d) = 2.0 * static_cast<double>(t) + static_cast<double>(d);
        }
    }
    const SkeletalSequence r = resample_sequence(ramp, 17);
    for (std::size_t j = 0; j < 17; ++j) {
        const double pos = static_cast<double>(j) * 8.0 / 16.0;
        for (std::size_t d = 0; d < 3; ++d) {
            CHECK(std::abs(r.frames.at(j, d) - (2.0 * pos + static_cast<double>(d))) < 1e-9);
        }
    }

    CHECK_THROWS_AS(resample_sequence(s, 1), ParameterError);
    SkeletalSequence empty;
    empty.frames = numcore::Tensor({0, 3}, 0.0);
    CHECK_THROWS_AS(resample_sequence(empty, 5), DataError);
}

TEST_CASE("window_slice counts and tiling") {
    const SkeletalSequence s120 = make_sequence(120, 2, 3);
    CHECK(window_slice(s120, 40).N == 3);

    const SkeletalSequence s250 = make_sequence(250, 2, 4);
    const WindowedSequence w = window_slice(s250, 40);
    CHECK(w.N == 6);
    CHECK(w.W == 40);
    // The windows tile the first N*W = 240 frames exactly, in order.
    for (std::size_t n = 0; n < w.N; ++n) {
        REQUIRE(w.windows[n].rows() == 40);
        for (std::size_t t = 0; t < 40; ++t) {
            for (std::size_t d = 0; d < s250.feature_count(); ++d) {
                CHECK(w.windows[n].at(t, d) == s250.frames.at(n * 40 + t, d));
            }
        }
    }

    const SkeletalSequence tiny = make_sequence(10, 1, 5);
    CHECK_THROWS_AS(window_slice(tiny, 11), DimensionError);
    CHECK_THROWS_AS(window_slice(tiny, 0), ParameterError);
}

TEST_CASE("split_dataset ratios, determinism, disjointness") {
    std::vector<SkeletalSequence> ten;
    for (int i = 0; i < 10; ++i) {
        ten.push_back(make_sequence(4, 1, 100 + i, "s" + std::to_string(i)));
    }
    const DatasetSplit split = split_dataset(ten, 0.8, 42);
    CHECK(split.train.size() == 8);
    CHECK(split.validation.size() == 2);

    const DatasetSplit again = split_dataset(ten, 0.8, 42);
    for (std::size_t i = 0; i < 8; ++i) CHECK(split.train[i].id == again.train[i].id);

    std::set<std::string> ids;
    for (const auto& s : split.train) ids.insert(s.id);
    for (const auto& s : split.validation) ids.insert(s.id);
    CHECK(ids.size() == 10);

    std::vector<SkeletalSequence> four(ten.begin(), ten.begin() + 4);
    const DatasetSplit half = split_dataset(four, 0.5, 1);
    CHECK(half.train.size() == 2);
    CHECK(half.validation.size() == 2);

    std::vector<SkeletalSequence> one(ten.begin(), ten.begin() + 1);
    CHECK_THROWS_AS(split_dataset(one, 0.5, 1), DataError);
    CHECK_THROWS_AS(split_dataset(four, 1.5, 1), ParameterError);
}

TEST_CASE("clinical score normalization") {
    CHECK(normalize_clinical_score(50.0) == 1.0);
    CHECK(normalize_clinical_score(25.0) == 0.5);
    CHECK(normalize_clinical_score(0.0) == 0.0);
    CHECK_THROWS_AS(normalize_clinical_score(50.5), DataError);
    CHECK_THROWS_AS(normalize_clinical_score(-1.0), DataError);
}

TEST_CASE("sequence name parsing") {
    const SequenceNameInfo a = parse_sequence_name("m01_s04_e07_angles.txt");
    CHECK(a.movement == "m01");
    CHECK(a.subject == "s04");
    CHECK(a.episode == "e07");
    CHECK_FALSE(a.incorrect);

    const SequenceNameInfo b = parse_sequence_name("m10_s02_e03_angles_inc");
    CHECK(b.movement == "m10");
    CHECK(b.incorrect);

    const SequenceNameInfo c = parse_sequence_name("random_name");
    CHECK(c.movement.empty());
}

TEST_CASE("dataset manifest lists every sequence") {
    TempDir dir("manifest");
    std::vector<SkeletalSequence> seqs;
    seqs.push_back(make_sequence(6, 2, 1, "m01_s01_e01_angles"));
    seqs.back().label = Label::kCorrect;
    seqs.push_back(make_sequence(9, 2, 2, "m01_s02_e01_angles_inc"));
    seqs.back().label = Label::kIncorrect;

    const std::string path = dir.file("manifest.json");
    write_dataset_manifest(path, seqs, {"a.txt", "b.txt"});

    std::ifstream is(path);
    nlohmann::json j;
    is >> j;
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["file"] == "a.txt");
    CHECK(j[0]["exercise"] == "m01");
    CHECK(j[0]["subject"] == "s01");
    CHECK(j[0]["label"] == "correct");
    CHECK(j[0]["T"] == 6);
    CHECK(j[0]["M"] == 2);
    CHECK(j[1]["label"] == "incorrect");
}
