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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mqa/augment/augment.hpp"
#include "mqa/mqaformer/scorer.hpp"
#include "mqa/scoregen/scoring.hpp"
#include "mqa/skeldata/sequence.hpp"

namespace mqa::harness {

/// One training example: a repetition plus its quality-score target.
struct LabeledSequence {
    skeldata::SkeletalSequence sequence;
    double score = 0.0;  // in [0, 1]
};

/// Joins sequences to generated labels by sequence id. DataError when a
/// sequence has no label or a label falls outside [0, 1].
std::vector<LabeledSequence> attach_labels(
    const std::vector<skeldata::SkeletalSequence>& sequences,
    const std::vector<scoregen::LabeledScore>& labels);

struct TrainConfig {
    double lr = 0.0005;
    std::size_t batch_size = 8;
    std::size_t max_epochs = 2000;
    std::size_t patience = 100;  // epochs of no validation improvement
    double split_ratio = 0.8;
    std::size_t runs = 5;
    std::uint64_t seed = 0;
    std::vector<augment::AugmentationSpec> augment_policy;
    /// Applies augment_policy to every training batch, so the scorer never
    /// sees the original frames. Validation is always clean.
    bool augment_training = true;

    mqaformer::EmbedderConfig embedder;
    std::size_t T = 240;
    std::size_t W = 40;
    std::size_t K = 256;
    std::size_t heads = 4;
    std::size_t blocks = 2;

    /// The embedder config with W/K overridden, wrapped in a ScorerConfig.
    mqaformer::ScorerConfig scorer_config() const;

    /// ConfigError on invalid fields, including the scorer_config checks.
    void validate() const;
};

struct EpochLog {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainingResult {
    mqaformer::ScorerModel model;
    std::vector<EpochLog> log;
    double best_val_loss = 0.0;
    std::size_t best_epoch = 0;  // epoch of the returned checkpoint
    double ms_per_batch = 0.0;   // wall clock over forward+backward+step
};

/// Adam on mean batch BCE with early stopping: training stops after
/// `patience` epochs without a new best validation loss or at max_epochs,
/// and the best-validation parameters are restored into the returned model.
/// Sequences are resampled to cfg.T when their frame count differs.
/// The same cfg and seed always return an identical checkpoint.
TrainingResult train_scorer_on(const TrainConfig& cfg,
                               const std::vector<LabeledSequence>& train,
                               const std::vector<LabeledSequence>& validation);

/// The seeded shuffle-split used by train_scorer and run_experiment: the
/// first floor(split_ratio*n) shuffled sequences train, the rest validate,
/// clamped so both sides stay non-empty. Deterministic in cfg.seed, so the
/// validation side of a saved checkpoint can be reproduced later.
std::pair<std::vector<LabeledSequence>, std::vector<LabeledSequence>>
split_for_training(const TrainConfig& cfg, const std::vector<LabeledSequence>& data);

/// split_for_training, then train_scorer_on.
TrainingResult train_scorer(const TrainConfig& cfg,
                            const std::vector<LabeledSequence>& data);

/// Mean |prediction - label|; order-invariant. DataError on an empty set.
double evaluate_mae(const mqaformer::ScorerModel& model,
                    const std::vector<LabeledSequence>& xs);

/// CSV "epoch,train_loss,val_loss" with 9-decimal losses.
void write_training_log_csv(const std::string& path, const std::vector<EpochLog>& log);

struct RunResult {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;        // populated when failed
    double mae = 0.0;         // validation MAE of the returned checkpoint
    double ms_per_batch = 0.0;
    std::size_t epochs = 0;
    std::size_t best_epoch = 0;
};

struct EvalReport {
    std::vector<RunResult> runs;
    double mean_mae = 0.0;      // over non-failed runs
    double ms_per_batch = 0.0;  // mean over non-failed runs
    /// Validation MAE grouped by the movement tag parsed from sequence ids
    /// ("m01", ...; unparseable ids group under "all"), averaged over runs.
    std::map<std::string, double> per_exercise_mae;
};

using TrainFn = std::function<TrainingResult(const TrainConfig&,
                                             const std::vector<LabeledSequence>&,
                                             const std::vector<LabeledSequence>&)>;

/// cfg.runs independent train/evaluate cycles. Run i re-seeds weights,
/// shuffling, and the data split with cfg.seed + i. A failed run is recorded
/// and the remaining runs continue; TrainingError only when every run fails.
/// `train` defaults to train_scorer_on and is injectable for tests.
EvalReport run_experiment(const TrainConfig& cfg,
                          const std::vector<LabeledSequence>& dataset,
                          const TrainFn& train = {});

/// Report serialization. Wall-clock fields are volatile between reruns, so
/// both writers take include_timing; reproducible pipelines exclude timing
/// here and route it to the run manifest instead.
void write_eval_report_json(const std::string& path, const EvalReport& report,
                            bool include_timing = true);
/// CSV "run,seed,mae,epochs,best_epoch[,ms_per_batch],failed,error".
void write_eval_report_csv(const std::string& path, const EvalReport& report,
                           bool include_timing = true);

}  // namespace mqa::harness
