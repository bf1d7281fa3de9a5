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
#include <string>
#include <vector>

#include "mqa/mqaformer/embedder.hpp"
#include "mqa/mqaformer/encoder.hpp"
#include "mqa/numcore/params.hpp"
#include "mqa/skeldata/sequence.hpp"

namespace mqa::mqaformer {

struct ScorerConfig {
    EmbedderConfig embedder;
    std::size_t T = 240;   // canonical frames per sequence, a multiple of W
    std::size_t blocks = 2;
    std::size_t heads = 4;
    std::size_t ff_hidden = 0;  // 0 selects the default 2*K
    std::size_t head_hidden1 = 128;
    std::size_t head_hidden2 = 32;

    std::size_t window_count() const { return embedder.W ? T / embedder.W : 0; }
    std::size_t ff_dim() const { return ff_hidden ? ff_hidden : 2 * embedder.K; }

    /// ConfigError on inconsistent fields, including K not divisible by
    /// heads and T not a positive multiple of W.
    void validate() const;
};

/// Windowed transformer scorer: window_slice -> embed -> positional add ->
/// encoder blocks -> flattened tokens -> dense head -> sigmoid score.
/// Move-only: layers hold pointers into the owned parameter set. A built
/// model is immutable during forward passes and safe to share across
/// readers; training updates parameters and needs exclusive access.
class ScorerModel {
public:
    ScorerModel(ScorerConfig cfg, std::uint64_t seed);
    ScorerModel(const ScorerModel&) = delete;
    ScorerModel& operator=(const ScorerModel&) = delete;
    ScorerModel(ScorerModel&&) = default;
    ScorerModel& operator=(ScorerModel&&) = default;

    const ScorerConfig& config() const { return cfg_; }
    numcore::ParameterSet& params() { return params_; }
    const numcore::ParameterSet& params() const { return params_; }
    const numcore::Tensor& positional_table() const { return positional_; }
    const Embedder& embedder() const { return embedder_; }

    /// Per-channel input statistics, applied to every sequence before
    /// windowing so the encoder sees unit-scale features regardless of the
    /// recording's units. Length-D tensors; zero stddevs become 1. Defaults
    /// to the identity; trainers freeze these from the training set, and
    /// save/load round-trips them.
    void set_standardization(numcore::Tensor mean, numcore::Tensor stddev);
    const numcore::Tensor& input_mean() const { return input_mean_; }
    const numcore::Tensor& input_std() const { return input_std_; }

    /// Builds the full differentiable graph for one sequence; returns the
    /// 1-by-1 sigmoid output node. The sequence must be T-by-D.
    numcore::Value forward(numcore::Graph& g, const skeldata::SkeletalSequence& x,
                           AttentionRecord* record = nullptr) const;

    void save(const std::string& path) const;
    static ScorerModel load(const std::string& path);

private:
    ScorerConfig cfg_;
    numcore::ParameterSet params_;
    Embedder embedder_;
    std::vector<EncoderBlock> blocks_;
    numcore::DenseLayer head1_, head2_, head3_;
    numcore::Tensor positional_;  // N-by-K, fixed sinusoidal, not a parameter
    numcore::Tensor input_mean_, input_std_;  // length D, not parameters
};

struct ScorePrediction {
    double score = 0.0;  // in (0, 1)
    AttentionRecord attention;
};

/// Forward pass without gradients.
ScorePrediction predict_score(const ScorerModel& model, const skeldata::SkeletalSequence& x);

/// Writes one CSV per attention matrix next to `prefix`:
/// <prefix>_encoder_l<layer>_h<head>.csv with window indices, and
/// <prefix>_parts_h<head>.csv with part names as labels. Returns the paths.
std::vector<std::string> write_attention_csvs(const std::string& prefix,
                                              const AttentionRecord& record,
                                              const std::vector<std::string>& part_names);

}  // namespace mqa::mqaformer
