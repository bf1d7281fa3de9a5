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

#include "mqa/numcore/adam.hpp"

#include <cmath>

#include "mqa/errors.hpp"

namespace mqa::numcore {

void AdamState::step(ParameterSet& params) {
    if (m_.empty()) {
        for (const Parameter& p : params) {
            m_.emplace_back(p.value.shape(), 0.0);
            v_.emplace_back(p.value.shape(), 0.0);
        }
    }
    if (m_.size() != params.size()) {
        throw ParameterError("adam: parameter count changed between steps");
    }
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    std::size_t idx = 0;
    for (Parameter& p : params) {
        Tensor& m = m_[idx];
        Tensor& v = v_[idx];
        ++idx;
        if (!m.same_shape(p.value)) {
            throw ParameterError("adam: shape changed for parameter " + p.name);
        }
        double* w = p.value.data().data();
        const double* g = p.grad.data().data();
        double* md = m.data().data();
        double* vd = v.data().data();
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            md[i] = cfg_.beta1 * md[i] + (1.0 - cfg_.beta1) * g[i];
            vd[i] = cfg_.beta2 * vd[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double mhat = md[i] / bc1;
            const double vhat = vd[i] / bc2;
            w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }
}

}  // namespace mqa::numcore
