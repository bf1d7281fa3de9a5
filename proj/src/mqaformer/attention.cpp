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

#include "mqa/mqaformer/attention.hpp"

#include <cmath>

#include "mqa/errors.hpp"

namespace mqa::mqaformer {

using numcore::DenseLayer;
using numcore::Graph;
using numcore::Init;
using numcore::ParameterSet;
using numcore::Rng;
using numcore::Value;

MultiHeadAttention MultiHeadAttention::create(ParameterSet& params,
                                              const std::string& name, std::size_t dim,
                                              std::size_t heads, std::size_t head_dim,
                                              Rng& rng) {
    if (dim == 0 || heads == 0 || head_dim == 0) {
        throw ConfigError("attention " + name + ": dim, heads, head_dim must be positive");
    }
    MultiHeadAttention mha;
    mha.dim = dim;
    mha.heads = heads;
    mha.head_dim = head_dim;
    const std::size_t proj = heads * head_dim;
    mha.wq = DenseLayer::create(params, name + ".wq", dim, proj, Init::kXavier, rng);
    mha.wk = DenseLayer::create(params, name + ".wk", dim, proj, Init::kXavier, rng);
    mha.wv = DenseLayer::create(params, name + ".wv", dim, proj, Init::kXavier, rng);
    mha.wo = DenseLayer::create(params, name + ".wo", proj, dim, Init::kXavier, rng);
    return mha;
}

Value MultiHeadAttention::apply(Graph& g, Value x, const std::string& flop_segment,
                                std::vector<numcore::Tensor>* attn_out) const {
    const Value q = wq.apply(g, x);
    const Value k = wk.apply(g, x);
    const Value v = wv.apply(g, x);

    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
    std::vector<Value> head_outputs;
    head_outputs.reserve(heads);

    g.begin_flop_segment(flop_segment);
    for (std::size_t h = 0; h < heads; ++h) {
        std::vector<std::size_t> cols(head_dim);
        for (std::size_t i = 0; i < head_dim; ++i) cols[i] = h * head_dim + i;
        const Value qh = g.gather_cols(q, cols);
        const Value kh = g.gather_cols(k, cols);
        const Value vh = g.gather_cols(v, cols);
        const Value attn = g.softmax(g.scale(g.matmul(qh, g.transpose(kh)), inv_sqrt));
        if (attn_out != nullptr) attn_out->push_back(g.value(attn));
        head_outputs.push_back(g.matmul(attn, vh));
    }
    g.end_flop_segment();

    return wo.apply(g, g.concat_cols(head_outputs));
}

}  // namespace mqa::mqaformer
