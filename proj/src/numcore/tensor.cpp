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

#include "mqa/numcore/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mqa/errors.hpp"

namespace mqa::numcore {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {}

Tensor Tensor::scalar(double v) {
    Tensor t({1});
    t.data_[0] = v;
    return t;
}

Tensor Tensor::vec(std::vector<double> values) {
    Tensor t;
    t.shape_ = {values.size()};
    t.data_ = std::move(values);
    return t;
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Tensor t({r, c});
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("Tensor::matrix: ragged rows");
        for (double v : row) t.data_[i++] = v;
    }
    return t;
}

Tensor Tensor::from_data(std::vector<std::size_t> shape, std::vector<double> data) {
    if (shape_product(shape) != data.size()) {
        throw DimensionError("Tensor::from_data: shape " + shape_string(shape) +
                             " does not match " + std::to_string(data.size()) + " elements");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
}

std::size_t Tensor::dim(std::size_t i) const {
    if (i >= shape_.size()) throw DimensionError("Tensor::dim: axis out of range");
    return shape_[i];
}

std::size_t Tensor::rows() const {
    if (ndim() != 2) throw DimensionError("Tensor::rows: want 2-D, have " + shape_string(*this));
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (ndim() != 2) throw DimensionError("Tensor::cols: want 2-D, have " + shape_string(*this));
    return shape_[1];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    return data_[r * cols() + c];
}

double& Tensor::at(std::size_t r, std::size_t c) {
    return data_[r * cols() + c];
}

double Tensor::at3(std::size_t i, std::size_t j, std::size_t k) const {
    if (ndim() != 3) throw DimensionError("Tensor::at3: want 3-D, have " + shape_string(*this));
    return data_[(i * shape_[1] + j) * shape_[2] + k];
}

double& Tensor::at3(std::size_t i, std::size_t j, std::size_t k) {
    if (ndim() != 3) throw DimensionError("Tensor::at3: want 3-D, have " + shape_string(*this));
    return data_[(i * shape_[1] + j) * shape_[2] + k];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double Tensor::item() const {
    if (size() != 1) {
        throw ContractError("Tensor::item: want a scalar, have " + shape_string(*this));
    }
    return data_[0];
}

void Tensor::fill(double v) {
    for (double& x : data_) x = v;
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
    if (shape_product(new_shape) != size()) {
        throw DimensionError("Tensor::reshaped: " + shape_string(*this) + " -> " +
                             shape_string(new_shape) + " changes element count");
    }
    Tensor t;
    t.shape_ = std::move(new_shape);
    t.data_ = data_;
    return t;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::string shape_string(const Tensor& t) { return shape_string(t.shape()); }

}  // namespace mqa::numcore
