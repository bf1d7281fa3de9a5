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
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mqa/errors.hpp"
#include "mqa/numcore/params.hpp"
#include "mqa/numcore/tensor.hpp"

namespace mqa::numcore {

/// Handle to a node of a Graph. Only meaningful together with the Graph that
/// produced it.
struct Value {
    static constexpr std::uint32_t kInvalid = 0xFFFFFFFFu;
    std::uint32_t id = kInvalid;

    bool valid() const { return id != kInvalid; }
};

/// Reverse-mode automatic differentiation tape.
///
/// Nodes are appended in execution order, so the tape is topologically
/// ordered by construction. backward() walks it once in reverse and then
/// accumulates gradients of parameter leaves into Parameter::grad.
///
/// The graph also counts floating-point operations. Documented cost model
/// (data-movement ops such as transpose/reshape/gather/concat/stack cost 0):
///   matmul(m,k,n)            2*m*k*n
///   conv1d(T',C,k,D)         2*T'*C*k*D
///   softmax(rows,cols)       5*rows*cols
///   layer_norm(rows,cols)    8*rows*cols
///   relu                     n          sigmoid   4n
///   add/sub/mul/scale/add_row   n (output elements)
///   global_max_pool          n (input elements)
///   sum/mean/l1_norm         n          mse_loss  3n      bce_loss 6n
/// Named segments (begin_flop_segment/end_flop_segment) accumulate the cost
/// of the ops recorded while they are open; segments may nest.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;
    Graph(Graph&&) = delete;
    Graph& operator=(Graph&&) = delete;

    // Leaves.
    Value constant(Tensor t);
    /// Parameter leaf; repeated calls with the same pointer return the same node.
    Value param(Parameter* p);

    // Node access.
    const Tensor& value(Value v) const;
    const Tensor& grad(Value v) const;
    std::size_t node_count() const { return nodes_.size(); }

    // Linear algebra.
    Value matmul(Value a, Value b);
    Value transpose(Value x);

    // Shape manipulation (zero-cost data movement).
    Value reshape(Value x, std::vector<std::size_t> shape);
    Value gather_cols(Value x, std::vector<std::size_t> cols);
    Value concat_cols(const std::vector<Value>& xs);
    Value stack_rows(const std::vector<Value>& xs);

    // Elementwise arithmetic.
    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    Value scale(Value x, double s);
    /// Adds a length-C row vector to every row of an R-by-C matrix.
    Value add_row(Value x, Value row);

    // Nonlinearities and normalization.
    Value relu(Value x);
    Value sigmoid(Value x);
    /// Softmax along the last axis (per row for matrices).
    Value softmax(Value x);
    /// Per-row normalization over the last axis, then affine by gain/bias.
    Value layer_norm(Value x, Value gain, Value bias);

    // Convolution and pooling.
    /// x: T-by-D, kernels: C-by-k-by-D, valid cross-correlation over time.
    /// Output: T'-by-C with T' = floor((T-k)/stride)+1.
    Value conv1d(Value x, Value kernels, std::size_t stride);
    /// x: P-by-K -> length-K column maxima; gradient routes to the argmax.
    Value global_max_pool(Value x);

    // Reductions and losses (all produce scalar nodes).
    Value sum(Value x);
    Value mean(Value x);
    Value l1_norm(Value x);
    Value mse_loss(Value pred, Value target);
    /// Mean elementwise binary cross entropy; predictions are clamped to
    /// [eps, 1-eps] with eps = 1e-7 and the clamp passes gradients through.
    Value bce_loss(Value pred, Value target);

    /// Reverse pass from a scalar loss node. Zeroes all node gradients,
    /// seeds d(loss)/d(loss) = 1, then accumulates into Parameter::grad
    /// (adding to whatever is already there, so callers batch by summing).
    void backward(Value loss);

    // FLOP accounting.
    std::uint64_t flop_total() const { return flop_total_; }
    void reset_flops();
    void begin_flop_segment(const std::string& name);
    void end_flop_segment();
    /// Total recorded for a named segment (0 when never opened).
    std::uint64_t flop_segment(const std::string& name) const;
    const std::map<std::string, std::uint64_t>& flop_segments() const { return segments_; }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void()> back;  // empty for leaves
        Parameter* parameter = nullptr;
    };

    Value push(Tensor value, std::function<void()> back, Parameter* p = nullptr);
    Node& node(Value v);
    const Node& node(Value v) const;
    Tensor& grad_mut(Value v) { return node(v).grad; }
    void add_flops(std::uint64_t n);

    // Deque keeps value()/grad() references stable while the tape grows.
    std::deque<Node> nodes_;
    std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
    std::uint64_t flop_total_ = 0;
    std::map<std::string, std::uint64_t> segments_;
    std::vector<std::string> open_segments_;
};

}  // namespace mqa::numcore
