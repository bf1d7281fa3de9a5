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
#include <map>
#include <string>
#include <vector>

#include "mqa/harness/train.hpp"
#include "mqa/scoregen/autoencoder.hpp"
#include "mqa/skeldata/io.hpp"

namespace mqa::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything the commands need, loaded from one JSON config file. Every
/// key is optional; these defaults are the paper-scale configuration.
struct CliConfig {
    skeldata::FileFormat format = skeldata::FileFormat::kUiprmdAngles;
    std::size_t resample_T = 240;  // canonical frame count, 0 = leave as-is

    std::vector<augment::AugmentationSpec> augment_policy;

    // Score generation.
    std::size_t ae_latent = 8;
    std::size_t ae_hidden1 = 256;
    std::size_t ae_hidden2 = 64;
    double ae_lambda = 1e-4;
    std::size_t ae_epochs = 200;
    std::size_t ae_batch_size = 8;
    double ae_lr = 0.0005;
    std::size_t gmm_components = 0;  // 0 selects by BIC up to gmm_max_components
    std::size_t gmm_max_components = 4;

    harness::TrainConfig train;
    /// "auto" picks a preset by joint count (39/25/22) and falls back to
    /// `partition_parts` contiguous groups; or one of "vicon39", "kinect25",
    /// "uiprmd22", "even".
    std::string body_partition = "auto";
    std::size_t partition_parts = 5;

    // synth command.
    std::string synth_kind = "exercise";  // "exercise" | "overfit" | "partsignal"
    std::size_t synth_count = 10;         // per class for "exercise", total otherwise
    std::size_t synth_T = 240;
    std::size_t synth_joints = 5;

    /// The canonical serialized form: one JSON object with sorted keys and
    /// every field present. Parsing its output reproduces the config.
    std::string canonical_json() const;
};

/// Reads a JSON config; unknown keys raise ParseError naming the key.
/// A missing file raises IoError.
CliConfig load_cli_config(const std::string& path);

/// FNV-1a 64 over the canonical serialization, as 16 hex digits. Stable
/// across key order and formatting of the source file.
std::string config_hash(const CliConfig& cfg);

/// The partition selected by cfg.body_partition for a joint count.
mqaformer::BodyPartition choose_partition(const CliConfig& cfg, std::size_t joints);

/// Every file a command writes, plus the volatile zone (timestamp and wall
/// clock timings). Byte-identity of reruns holds for all artifacts and for
/// the manifest outside "volatile".
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> artifacts;  // paths relative to the output dir
    std::string timestamp;               // volatile, ISO 8601 UTC
    std::map<std::string, double> timing_ms;  // volatile
};

/// JSON with kind "run_manifest"; volatile fields live under "volatile".
/// The manifest itself is appended to `artifacts` before writing, so the
/// caller's copy matches the file.
void write_manifest(const std::string& out_dir, RunManifest& manifest);

/// Sequences from every regular file in the directory, sorted by filename;
/// ids are file stems, labels parsed from "_inc" in the name. DataError on
/// an empty directory.
std::vector<skeldata::SkeletalSequence> load_dataset_dir(const std::string& dir,
                                                         skeldata::FileFormat format);

/// Commands. Each writes its artifacts under out_dir, then a
/// manifest.json, and returns the manifest. Failures throw; callers map
/// exceptions to a nonzero exit.

/// Augments every input sequence once under the policy; writes
/// <id>_aug.txt, a per-example original/augmented long-format trace CSV,
/// and dataset.json.
RunManifest cmd_augment(const CliConfig& cfg, const std::string& input_dir,
                        const std::string& out_dir, std::uint64_t seed);

/// Trains the denoising autoencoder on correct repetitions, fits the
/// mixture, calibrates scoring, and writes labels.csv, score_model.json,
/// autoencoder.ckpt, and sd_report.json (within/between-subject separation).
RunManifest cmd_genscores(const CliConfig& cfg, const std::string& input_dir,
                          const std::string& out_dir, std::uint64_t seed);

/// Trains one scorer on a labeled dataset; writes scorer.ckpt,
/// training_log.csv, and train_summary.json.
RunManifest cmd_train(const CliConfig& cfg, const std::string& input_dir,
                      const std::string& labels_path, const std::string& out_dir,
                      std::uint64_t seed);

/// Evaluates a saved scorer; writes eval.json with full-set MAE and the MAE
/// on the reproduced training-time validation split.
RunManifest cmd_eval(const CliConfig& cfg, const std::string& input_dir,
                     const std::string& labels_path, const std::string& model_path,
                     const std::string& out_dir, std::uint64_t seed);

/// run_experiment once per embedder kind; writes ablate.csv (one row per
/// kind) and ablate.json. Wall-clock per batch goes to the manifest.
RunManifest cmd_ablate(const CliConfig& cfg, const std::string& input_dir,
                       const std::string& labels_path, const std::string& out_dir,
                       std::uint64_t seed);

/// Scores one sequence with a saved model and writes its attention CSVs.
RunManifest cmd_attention(const CliConfig& cfg, const std::string& model_path,
                          const std::string& sequence_path, const std::string& out_dir);

/// Writes a synthetic dataset: sequence .txt files plus labels.csv for the
/// scored kinds ("overfit", "partsignal").
RunManifest cmd_synth(const CliConfig& cfg, const std::string& out_dir,
                      std::uint64_t seed);

}  // namespace mqa::cli
