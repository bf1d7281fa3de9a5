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
#include <deque>
#include <string>
#include <vector>

#include "mqa/errors.hpp"
#include "mqa/numcore/tensor.hpp"

namespace mqa::numcore {

/// A named trainable tensor with an accumulated gradient of the same shape.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter(std::string n, Tensor v)
        : name(std::move(n)), value(std::move(v)), grad(value.shape(), 0.0) {}
};

/// Owns the parameters of a model. Backed by a deque so that Parameter*
/// handles held by layers stay valid as parameters are added and when the
/// set itself is moved.
class ParameterSet {
public:
    ParameterSet() = default;
    ParameterSet(const ParameterSet&) = delete;
    ParameterSet& operator=(const ParameterSet&) = delete;
    ParameterSet(ParameterSet&&) = default;
    ParameterSet& operator=(ParameterSet&&) = default;

    Parameter* add(std::string name, Tensor value) {
        for (const Parameter& p : params_) {
            if (p.name == name) {
                throw ParameterError("duplicate parameter name: " + name);
            }
        }
        params_.emplace_back(std::move(name), std::move(value));
        return &params_.back();
    }

    Parameter* find(const std::string& name) {
        for (Parameter& p : params_) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }

    const Parameter* find(const std::string& name) const {
        for (const Parameter& p : params_) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }

    void zero_grads() {
        for (Parameter& p : params_) p.grad.fill(0.0);
    }

    /// Copies values (not grads) from a structurally identical set. Used to
    /// snapshot and restore best-so-far weights during training.
    void assign_values_from(const ParameterSet& other) {
        if (other.size() != size()) {
            throw ParameterError("parameter sets differ in size");
        }
        auto it = params_.begin();
        auto ot = other.params_.begin();
        for (; it != params_.end(); ++it, ++ot) {
            if (it->name != ot->name || !it->value.same_shape(ot->value)) {
                throw ParameterError("parameter mismatch at " + it->name);
            }
            it->value = ot->value;
        }
    }

    /// Deep copy of names and values with zeroed gradients.
    ParameterSet clone_values() const {
        ParameterSet out;
        for (const Parameter& p : params_) {
            out.params_.emplace_back(p.name, p.value);
        }
        return out;
    }

    std::size_t size() const { return params_.size(); }
    bool empty() const { return params_.empty(); }

    std::size_t value_count() const {
        std::size_t n = 0;
        for (const Parameter& p : params_) n += p.value.size();
        return n;
    }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

private:
    std::deque<Parameter> params_;
};

}  // namespace mqa::numcore
