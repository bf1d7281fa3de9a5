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
#include <vector>

#include "mqa/mqaformer/attention.hpp"
#include "mqa/numcore/graph.hpp"
#include "mqa/numcore/nn.hpp"
#include "mqa/numcore/params.hpp"

namespace mqa::mqaformer {

/// Fixed N-by-K sinusoidal table: row pos has sin(pos * w_i) in column 2i
/// and cos(pos * w_i) in column 2i+1, with w_i = 10000^(-2i/K). Row 0 is
/// therefore 0 in sin columns and 1 in cos columns.
numcore::Tensor sinusoidal_positions(std::size_t N, std::size_t K);

/// z + table rows 0..N-1. The table may be taller than z but never narrower
/// or shorter; mismatches raise DimensionError.
numcore::Value add_positional(numcore::Graph& g, numcore::Value z,
                              const numcore::Tensor& table);

/// Pre-norm transformer encoder block:
///   x = x + attention(norm1(x)); x = x + ff(norm2(x))
/// with a two-layer ReLU feed-forward.
struct EncoderBlock {
    std::size_t dim = 0;
    numcore::LayerNorm norm1, norm2;
    MultiHeadAttention attention;
    numcore::DenseLayer ff1, ff2;

    /// ConfigError unless dim is divisible by heads.
    static EncoderBlock create(numcore::ParameterSet& params, const std::string& name,
                               std::size_t dim, std::size_t heads, std::size_t ff_hidden,
                               numcore::Rng& rng);

    numcore::Value apply(numcore::Graph& g, numcore::Value x,
                         std::vector<numcore::Tensor>* attn_out = nullptr) const;
};

/// Runs the block stack on an N-by-K input, preserving shape. When record is
/// non-null, one layer entry of per-head N-by-N matrices is appended per
/// block. Attention FLOPs accumulate under the "encoder_attention" segment.
numcore::Value encoder_forward(numcore::Graph& g, numcore::Value zp,
                               const std::vector<EncoderBlock>& blocks,
                               AttentionRecord* record = nullptr);

}  // namespace mqa::mqaformer
