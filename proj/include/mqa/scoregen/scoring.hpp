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

#include <string>
#include <utility>
#include <vector>

#include "mqa/scoregen/autoencoder.hpp"
#include "mqa/scoregen/gmm.hpp"
#include "mqa/skeldata/sequence.hpp"

namespace mqa::scoregen {

/// Logistic map from performance metric to quality score:
/// score(d) = 1 / (1 + exp(alpha * (d - delta))).
struct ScoringCalibration {
    double alpha = 1.0;  // steepness per metric unit, > 0
    double delta = 0.0;  // metric value that maps to score 0.5
};

/// From correct-repetition metrics: delta = mean + 3*std and
/// alpha = ln(19) / (3*std) (sample std, ddof = 1), so the mean metric maps
/// to exactly 0.95 and delta to 0.5. Throws CalibrationError when the
/// metrics have zero variance.
ScoringCalibration calibrate_scoring(const std::vector<double>& metrics_correct);

/// Quality score in (0, 1), strictly decreasing in d.
double score_from_metric(const ScoringCalibration& cal, double d);

/// Normalized mean difference on min-shifted metrics:
/// SD = (mu_inc - mu_cor) / (mu_inc + mu_cor) after subtracting the global
/// minimum from every value; 0 when the denominator vanishes. Invariant
/// under common shifts and positive rescaling; range [-1, 1].
double separation_degree(const std::vector<double>& metrics_correct,
                         const std::vector<double>& metrics_incorrect);

struct LabeledScore {
    std::string sequence_id;
    double score = 0.0;  // quality score in [0, 1]
};

/// encode_latent -> performance_metric -> score_from_metric per sequence.
/// Component failures are re-thrown with the sequence id prepended.
std::vector<LabeledScore> generate_labels(const Autoencoder& ae,
                                          const ExerciseModel& model,
                                          const ScoringCalibration& cal,
                                          const std::vector<skeldata::SkeletalSequence>& xs);

/// CSV with header "sequence_id,score", scores printed with 6 decimals.
void write_label_csv(const std::string& path, const std::vector<LabeledScore>& labels);
std::vector<LabeledScore> load_label_csv(const std::string& path);

/// JSON sidecar holding the mixture parameters and the calibration.
void save_score_model(const std::string& path, const ExerciseModel& model,
                      const ScoringCalibration& cal);
std::pair<ExerciseModel, ScoringCalibration> load_score_model(const std::string& path);

}  // namespace mqa::scoregen
