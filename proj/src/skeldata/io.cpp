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

#include "mqa/skeldata/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mqa/errors.hpp"

namespace mqa::skeldata {

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              std::size_t line_no) {
    std::vector<double> values;
    const char* p = line.c_str();
    while (*p != '\0') {
        while (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r') ++p;
        if (*p == '\0') break;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": non-numeric token starting at '" +
                             std::string(p).substr(0, 12) + "'");
        }
        values.push_back(v);
        p = end;
        if (*p != '\0' && *p != ' ' && *p != '\t' && *p != ',' && *p != '\r') {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": unexpected character '" + std::string(1, *p) + "'");
        }
    }
    return values;
}

}  // namespace

SkeletalSequence load_sequence(const std::string& path, FileFormat format) {
    std::ifstream is(path);
    if (!is) throw IoError("load_sequence: cannot open " + path);

    std::vector<double> data;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::vector<double> row = parse_row(line, path, line_no);
        if (row.empty()) continue;  // blank line
        if (cols == 0) {
            cols = row.size();
            if (cols % 3 != 0) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": column count " +
                                 std::to_string(cols) + " not divisible by 3");
            }
        } else if (row.size() != cols) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": row has " +
                             std::to_string(row.size()) + " columns, expected " +
                             std::to_string(cols));
        }
        data.insert(data.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw ParseError(path + ": no frames found");

    SkeletalSequence seq;
    seq.id = std::filesystem::path(path).stem().string();
    seq.frames = numcore::Tensor::from_data({rows, cols}, std::move(data));
    seq.joint_count = cols / 3;
    if (format == FileFormat::kUiprmdAngles) {
        seq.device = Device::kVicon;
        seq.frame_rate = 100.0;
    } else {
        seq.device = Device::kKinect;
        seq.frame_rate = 30.0;
    }
    const SequenceNameInfo info = parse_sequence_name(seq.id);
    if (!info.movement.empty()) {
        seq.label = info.incorrect ? Label::kIncorrect : Label::kCorrect;
    }
    return seq;
}

void save_sequence(const std::string& path, const SkeletalSequence& seq, char delimiter) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("save_sequence: cannot open " + path);
    const std::size_t T = seq.frame_count();
    const std::size_t D = seq.feature_count();
    char buf[40];
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t d = 0; d < D; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", seq.frames.at(t, d));
            if (d > 0) os.put(delimiter);
            os << buf;
        }
        os.put('\n');
    }
    if (!os) throw IoError("save_sequence: write failed: " + path);
}

SequenceNameInfo parse_sequence_name(const std::string& filename) {
    const std::string stem = std::filesystem::path(filename).stem().string();
    SequenceNameInfo info;
    std::size_t i = 0;
    while (i < stem.size()) {
        std::size_t j = stem.find('_', i);
        if (j == std::string::npos) j = stem.size();
        const std::string tok = stem.substr(i, j - i);
        if (tok.size() >= 2 && std::isdigit(static_cast<unsigned char>(tok[1]))) {
            bool digits = true;
            for (std::size_t k = 1; k < tok.size(); ++k) {
                digits = digits && std::isdigit(static_cast<unsigned char>(tok[k])) != 0;
            }
            if (digits) {
                if (tok[0] == 'm') info.movement = tok;
                if (tok[0] == 's') info.subject = tok;
                if (tok[0] == 'e') info.episode = tok;
            }
        }
        if (tok == "inc") info.incorrect = true;
        i = j + 1;
    }
    return info;
}

void write_dataset_manifest(const std::string& path,
                            const std::vector<SkeletalSequence>& sequences,
                            const std::vector<std::string>& source_files) {
    if (!source_files.empty() && source_files.size() != sequences.size()) {
        throw ParameterError("write_dataset_manifest: file list size mismatch");
    }
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const SkeletalSequence& s = sequences[i];
        const SequenceNameInfo info = parse_sequence_name(s.id);
        nlohmann::json row;
        row["file"] = source_files.empty() ? s.id : source_files[i];
        row["exercise"] = info.movement;
        row["subject"] = info.subject;
        row["label"] = to_string(s.label);
        row["T"] = s.frame_count();
        row["M"] = s.joint_count;
        rows.push_back(std::move(row));
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("write_dataset_manifest: cannot open " + path);
    os << rows.dump(2) << '\n';
}

}  // namespace mqa::skeldata
