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
#include <utility>
#include <vector>

#include "mqa/numcore/params.hpp"
#include "mqa/numcore/tensor.hpp"

namespace mqa::numcore {

/// In-memory image of a checkpoint file: the hyperparameter record (JSON
/// text, uninterpreted here) and the named parameter tensors in file order.
struct Checkpoint {
    std::string hyperparams_json;
    std::vector<std::pair<std::string, Tensor>> params;

    const Tensor* find(const std::string& name) const {
        for (const auto& [n, t] : params) {
            if (n == name) return &t;
        }
        return nullptr;
    }
};

/// Binary layout (all integers little-endian; see docs/checkpoint_format.md):
///   magic "MQA1" | u32 version=1 | u64 json_len | json bytes |
///   u64 param_count | per param: u64 name_len, name, u64 ndim,
///   ndim*u64 dims, product(dims)*f64 payload.
void save_checkpoint(const std::string& path, const ParameterSet& params,
                     const std::string& hyperparams_json);

Checkpoint load_checkpoint(const std::string& path);

/// Copies checkpoint tensors into an existing parameter set. Every checkpoint
/// entry must match a present parameter by name and shape, and vice versa.
void restore_parameters(ParameterSet& params, const Checkpoint& ckpt);

}  // namespace mqa::numcore
