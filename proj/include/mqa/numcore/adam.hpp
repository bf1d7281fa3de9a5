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
#include <vector>

#include "mqa/numcore/params.hpp"
#include "mqa/numcore/tensor.hpp"

namespace mqa::numcore {

struct AdamConfig {
    double lr = 0.0005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam. Moment accumulators are laid out in the parameter
/// set's iteration order and locked to its shapes on the first step.
class AdamState {
public:
    explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

    /// One update using each Parameter's accumulated grad. Does not zero
    /// gradients; callers own that via ParameterSet::zero_grads().
    void step(ParameterSet& params);

    std::uint64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::uint64_t step_ = 0;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
};

/// Free-function spelling of AdamState::step.
inline void adam_step(AdamState& state, ParameterSet& params) { state.step(params); }

}  // namespace mqa::numcore
