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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mqa::numcore {

/// Dense row-major tensor of 64-bit floats. Plain value type: copying copies
/// the payload. Shapes are immutable after construction except through
/// reshaped(), which returns a new tensor.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

    static Tensor scalar(double v);
    static Tensor vec(std::vector<double> values);
    static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const;
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    /// 2-D accessors; throw DimensionError when the rank does not match.
    std::size_t rows() const;
    std::size_t cols() const;

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double at(std::size_t r, std::size_t c) const;
    double& at(std::size_t r, std::size_t c);
    double at3(std::size_t i, std::size_t j, std::size_t k) const;
    double& at3(std::size_t i, std::size_t j, std::size_t k);

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    /// Scalar extraction; throws ContractError unless size() == 1.
    double item() const;

    void fill(double v);
    Tensor reshaped(std::vector<std::size_t> new_shape) const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// "[2x3]" style shape rendering for error messages.
std::string shape_string(const Tensor& t);
std::string shape_string(const std::vector<std::size_t>& shape);

}  // namespace mqa::numcore
