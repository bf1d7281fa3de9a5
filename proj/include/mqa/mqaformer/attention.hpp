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

#include "mqa/numcore/graph.hpp"
#include "mqa/numcore/nn.hpp"
#include "mqa/numcore/params.hpp"
#include "mqa/numcore/rng.hpp"

namespace mqa::mqaformer {

/// Attention matrices captured during one forward pass. Every matrix is
/// row-stochastic: entries nonnegative, each row summing to 1.
struct AttentionRecord {
    /// encoder[layer][head] is that head's N-by-N window attention.
    std::vector<std::vector<numcore::Tensor>> encoder;
    /// part_attention[head] is a parts-by-parts matrix, averaged over the
    /// N windows of the pass. Empty unless the embedder is hfe_a.
    std::vector<numcore::Tensor> part_attention;
};

/// Scaled dot-product multi-head self-attention over the rows of an
/// N-by-dim input, with an output projection back to dim. head_dim is
/// explicit so callers with dim not divisible by the head count (the
/// part-attention path) can still size heads sensibly.
struct MultiHeadAttention {
    std::size_t dim = 0;
    std::size_t heads = 0;
    std::size_t head_dim = 0;
    numcore::DenseLayer wq, wk, wv, wo;

    static MultiHeadAttention create(numcore::ParameterSet& params,
                                     const std::string& name, std::size_t dim,
                                     std::size_t heads, std::size_t head_dim,
                                     numcore::Rng& rng);

    /// x: N-by-dim -> N-by-dim. flop_segment names the counter wrapping the
    /// QK^T, scaling, softmax, and AV stages (projections excluded), so the
    /// counted work scales exactly with N^2. attn_out, when given, receives
    /// one N-by-N matrix per head.
    numcore::Value apply(numcore::Graph& g, numcore::Value x,
                         const std::string& flop_segment,
                         std::vector<numcore::Tensor>* attn_out = nullptr) const;
};

}  // namespace mqa::mqaformer
