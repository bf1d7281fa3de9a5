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

#include <optional>
#include <string>
#include <vector>

#include "mqa/skeldata/sequence.hpp"

namespace mqa::skeldata {

enum class FileFormat { kUiprmdAngles, kKimore };

/// Reads a plain-text sequence: one frame per row, comma- or
/// whitespace-separated angle values, column count divisible by 3.
/// Parse failures name the file and 1-based line number.
SkeletalSequence load_sequence(const std::string& path, FileFormat format);

/// Writes frames with enough digits (%.17g) that load_sequence restores the
/// exact same bits.
void save_sequence(const std::string& path, const SkeletalSequence& seq,
                   char delimiter = ',');

/// Identifier fields recoverable from UI-PRMD style names such as
/// "m01_s04_e07_angles.txt" (movement, subject, episode; "_inc" marks an
/// incorrect repetition).
struct SequenceNameInfo {
    std::string movement;  // "m01" or ""
    std::string subject;   // "s04" or ""
    std::string episode;   // "e07" or ""
    bool incorrect = false;
};

SequenceNameInfo parse_sequence_name(const std::string& filename);

/// JSON manifest rows for a loaded dataset: file, exercise, subject, label,
/// T, M per sequence.
void write_dataset_manifest(const std::string& path,
                            const std::vector<SkeletalSequence>& sequences,
                            const std::vector<std::string>& source_files);

}  // namespace mqa::skeldata
