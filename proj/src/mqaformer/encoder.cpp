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

#include "mqa/mqaformer/encoder.hpp"

#include <cmath>

#include "mqa/errors.hpp"

namespace mqa::mqaformer {

using numcore::DenseLayer;
using numcore::Graph;
using numcore::Init;
using numcore::LayerNorm;
using numcore::ParameterSet;
using numcore::Rng;
using numcore::Tensor;
using numcore::Value;

Tensor sinusoidal_positions(std::size_t N, std::size_t K) {
    if (N == 0 || K == 0) {
        throw ParameterError("sinusoidal_positions: N and K must be positive");
    }
    Tensor table({N, K}, 0.0);
    for (std::size_t pos = 0; pos < N; ++pos) {
        for (std::size_t i = 0; 2 * i < K; ++i) {
            const double omega =
                std::pow(10000.0, -2.0 * static_cast<double>(i) / static_cast<double>(K));
            const double angle = static_cast<double>(pos) * omega;
            table.at(pos, 2 * i) = std::sin(angle);
            if (2 * i + 1 < K) table.at(pos, 2 * i + 1) = std::cos(angle);
        }
    }
    return table;
}

Value add_positional(Graph& g, Value z, const Tensor& table) {
    const Tensor& zt = g.value(z);
    if (zt.ndim() != 2 || table.ndim() != 2) {
        throw DimensionError("add_positional: tokens and table must be 2-D");
    }
    const std::size_t N = zt.rows();
    if (table.rows() < N || table.cols() != zt.cols()) {
        throw DimensionError("add_positional: table is " + std::to_string(table.rows()) +
                             "x" + std::to_string(table.cols()) + ", tokens are " +
                             std::to_string(N) + "x" + std::to_string(zt.cols()));
    }
    Tensor slice({N, table.cols()}, 0.0);
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < table.cols(); ++c) slice.at(r, c) = table.at(r, c);
    }
    return g.add(z, g.constant(std::move(slice)));
}

EncoderBlock EncoderBlock::create(ParameterSet& params, const std::string& name,
                                  std::size_t dim, std::size_t heads,
                                  std::size_t ff_hidden, Rng& rng) {
    if (heads == 0 || dim % heads != 0) {
        throw ConfigError("encoder block " + name + ": token dim " + std::to_string(dim) +
                          " not divisible by " + std::to_string(heads) + " heads");
    }
    if (ff_hidden == 0) {
        throw ConfigError("encoder block " + name + ": ff_hidden must be positive");
    }
    EncoderBlock block;
    block.dim = dim;
    block.norm1 = LayerNorm::create(params, name + ".norm1", dim);
    block.norm2 = LayerNorm::create(params, name + ".norm2", dim);
    block.attention = MultiHeadAttention::create(params, name + ".attn", dim, heads,
                                                 dim / heads, rng);
    block.ff1 = DenseLayer::create(params, name + ".ff1", dim, ff_hidden, Init::kHe, rng);
    block.ff2 = DenseLayer::create(params, name + ".ff2", ff_hidden, dim, Init::kXavier,
                                   rng);
    return block;
}

Value EncoderBlock::apply(Graph& g, Value x,
                          std::vector<numcore::Tensor>* attn_out) const {
    const Value attended =
        attention.apply(g, norm1.apply(g, x), "encoder_attention", attn_out);
    x = g.add(x, attended);
    const Value ff = ff2.apply(g, g.relu(ff1.apply(g, norm2.apply(g, x))));
    return g.add(x, ff);
}

Value encoder_forward(Graph& g, Value zp, const std::vector<EncoderBlock>& blocks,
                      AttentionRecord* record) {
    Value x = zp;
    for (const EncoderBlock& block : blocks) {
        std::vector<Tensor> attn;
        x = block.apply(g, x, record != nullptr ? &attn : nullptr);
        if (record != nullptr) record->encoder.push_back(std::move(attn));
    }
    return x;
}

}  // namespace mqa::mqaformer
