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

#include "mqa/numcore/graph.hpp"
#include "mqa/numcore/params.hpp"
#include "mqa/numcore/rng.hpp"
#include "mqa/numcore/tensor.hpp"

namespace mqa::numcore {

enum class Init {
    kHe,      // normal(0, sqrt(2/fan_in)); layers followed by ReLU
    kXavier,  // normal(0, sqrt(1/fan_in)); linear/sigmoid outputs
    kZero,
};

/// Fills a tensor in place; fan_in is the receptive input size.
void init_tensor(Tensor& t, Init kind, std::size_t fan_in, Rng& rng);

/// Dense affine layer. Holds non-owning handles into a ParameterSet, so the
/// set must outlive the layer.
struct DenseLayer {
    Parameter* W = nullptr;  // in-by-out
    Parameter* b = nullptr;  // out

    static DenseLayer create(ParameterSet& params, const std::string& name,
                             std::size_t in, std::size_t out, Init kind, Rng& rng);

    /// x: R-by-in -> R-by-out.
    Value apply(Graph& g, Value x) const {
        return g.add_row(g.matmul(x, g.param(W)), g.param(b));
    }
};

/// Valid 1-D convolution over time with per-channel bias.
struct Conv1dLayer {
    Parameter* kernels = nullptr;  // C-by-k-by-D
    Parameter* bias = nullptr;     // C
    std::size_t stride = 1;

    static Conv1dLayer create(ParameterSet& params, const std::string& name,
                              std::size_t channels, std::size_t kernel_len,
                              std::size_t in_features, std::size_t stride, Init kind,
                              Rng& rng);

    /// x: T-by-D -> T'-by-C.
    Value apply(Graph& g, Value x) const {
        return g.add_row(g.conv1d(x, g.param(kernels), stride), g.param(bias));
    }
};

/// Per-row layer normalization with learnable gain and bias.
struct LayerNorm {
    Parameter* gain = nullptr;  // n, initialized to 1
    Parameter* bias = nullptr;  // n, initialized to 0

    static LayerNorm create(ParameterSet& params, const std::string& name, std::size_t n);

    Value apply(Graph& g, Value x) const {
        return g.layer_norm(x, g.param(gain), g.param(bias));
    }
};

}  // namespace mqa::numcore
