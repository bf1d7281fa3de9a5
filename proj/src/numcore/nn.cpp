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

#include "mqa/numcore/nn.hpp"

#include <cmath>

#include "mqa/errors.hpp"

namespace mqa::numcore {

void init_tensor(Tensor& t, Init kind, std::size_t fan_in, Rng& rng) {
    if (kind == Init::kZero) {
        t.fill(0.0);
        return;
    }
    if (fan_in == 0) throw ParameterError("init_tensor: zero fan_in");
    const double scale = kind == Init::kHe
                             ? std::sqrt(2.0 / static_cast<double>(fan_in))
                             : std::sqrt(1.0 / static_cast<double>(fan_in));
    for (double& d : t.data()) d = rng.normal(0.0, scale);
}

DenseLayer DenseLayer::create(ParameterSet& params, const std::string& name,
                              std::size_t in, std::size_t out, Init kind, Rng& rng) {
    Tensor w({in, out}, 0.0);
    init_tensor(w, kind, in, rng);
    DenseLayer layer;
    layer.W = params.add(name + ".W", std::move(w));
    layer.b = params.add(name + ".b", Tensor({out}, 0.0));
    return layer;
}

Conv1dLayer Conv1dLayer::create(ParameterSet& params, const std::string& name,
                                std::size_t channels, std::size_t kernel_len,
                                std::size_t in_features, std::size_t stride, Init kind,
                                Rng& rng) {
    Tensor k({channels, kernel_len, in_features}, 0.0);
    init_tensor(k, kind, kernel_len * in_features, rng);
    Conv1dLayer layer;
    layer.kernels = params.add(name + ".kernels", std::move(k));
    layer.bias = params.add(name + ".bias", Tensor({channels}, 0.0));
    layer.stride = stride;
    return layer;
}

LayerNorm LayerNorm::create(ParameterSet& params, const std::string& name, std::size_t n) {
    LayerNorm layer;
    layer.gain = params.add(name + ".gain", Tensor({n}, 1.0));
    layer.bias = params.add(name + ".bias", Tensor({n}, 0.0));
    return layer;
}

}  // namespace mqa::numcore
