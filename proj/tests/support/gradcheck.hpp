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

#include <algorithm>
#include <cmath>
#include <vector>

#include "mqa/numcore/graph.hpp"
#include "mqa/numcore/params.hpp"

namespace mqa::testing {

/// Compares reverse-mode gradients against central finite differences.
///
/// `build` must construct the forward computation in the given Graph from the
/// current parameter values and return the scalar loss node. It is invoked
/// once for the analytic gradient and twice per parameter element for the
/// numeric one, so keep models small.
///
/// Returns the maximum relative error max |a-n| / max(1, |a|, |n|).
template <typename BuildFn>
double max_rel_grad_err(numcore::ParameterSet& params, BuildFn build,
                        double step = 1e-4) {
    params.zero_grads();
    {
        numcore::Graph g;
        g.backward(build(g));
    }
    std::vector<numcore::Tensor> analytic;
    for (const numcore::Parameter& p : params) analytic.push_back(p.grad);

    const auto eval = [&]() {
        numcore::Graph g;
        return g.value(build(g)).item();
    };

    double max_err = 0.0;
    std::size_t pi = 0;
    for (numcore::Parameter& p : params) {
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double orig = p.value.data()[i];
            p.value.data()[i] = orig + step;
            const double fp = eval();
            p.value.data()[i] = orig - step;
            const double fm = eval();
            p.value.data()[i] = orig;
            const double numeric = (fp - fm) / (2.0 * step);
            const double exact = analytic[pi].data()[i];
            const double rel = std::abs(exact - numeric) /
                               std::max({1.0, std::abs(exact), std::abs(numeric)});
            max_err = std::max(max_err, rel);
        }
        ++pi;
    }
    return max_err;
}

}  // namespace mqa::testing
