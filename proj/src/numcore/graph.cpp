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

#include "mqa/numcore/graph.hpp"

#include <algorithm>
#include <cmath>

namespace mqa::numcore {

namespace {

constexpr double kBceEps = 1e-7;
constexpr double kLayerNormEps = 1e-5;

// Rows/cols of a tensor viewed as a matrix; 1-D tensors are single rows.
struct MatView {
    std::size_t rows;
    std::size_t cols;
};

MatView as_matrix(const Tensor& t, const char* op) {
    if (t.ndim() == 1) return {1, t.dim(0)};
    if (t.ndim() == 2) return {t.dim(0), t.dim(1)};
    throw DimensionError(std::string(op) + ": expected 1-D or 2-D tensor, got shape " +
                         shape_string(t));
}

}  // namespace

Value Graph::push(Tensor value, std::function<void()> back, Parameter* p) {
    Node n;
    n.grad = Tensor(value.shape(), 0.0);
    n.value = std::move(value);
    n.back = std::move(back);
    n.parameter = p;
    nodes_.push_back(std::move(n));
    return Value{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Graph::Node& Graph::node(Value v) {
    if (!v.valid() || v.id >= nodes_.size()) {
        throw ContractError("invalid graph value handle");
    }
    return nodes_[v.id];
}

const Graph::Node& Graph::node(Value v) const {
    if (!v.valid() || v.id >= nodes_.size()) {
        throw ContractError("invalid graph value handle");
    }
    return nodes_[v.id];
}

void Graph::add_flops(std::uint64_t n) {
    flop_total_ += n;
    for (const std::string& s : open_segments_) segments_[s] += n;
}

void Graph::reset_flops() {
    flop_total_ = 0;
    segments_.clear();
    open_segments_.clear();
}

void Graph::begin_flop_segment(const std::string& name) {
    open_segments_.push_back(name);
    segments_.emplace(name, 0);  // record the segment even if no ops follow
}

void Graph::end_flop_segment() {
    if (open_segments_.empty()) {
        throw ContractError("end_flop_segment without matching begin");
    }
    open_segments_.pop_back();
}

std::uint64_t Graph::flop_segment(const std::string& name) const {
    auto it = segments_.find(name);
    return it == segments_.end() ? 0 : it->second;
}

Value Graph::constant(Tensor t) { return push(std::move(t), {}); }

Value Graph::param(Parameter* p) {
    if (p == nullptr) throw ParameterError("param: null parameter");
    auto it = param_nodes_.find(p);
    if (it != param_nodes_.end()) return Value{it->second};
    Value v = push(p->value, {}, p);
    param_nodes_.emplace(p, v.id);
    return v;
}

const Tensor& Graph::value(Value v) const { return node(v).value; }
const Tensor& Graph::grad(Value v) const { return node(v).grad; }

Value Graph::matmul(Value a, Value b) {
    const Tensor& ta = node(a).value;
    const Tensor& tb = node(b).value;
    if (ta.ndim() != 2 || tb.ndim() != 2) {
        throw DimensionError("matmul: expected 2-D operands, got " + shape_string(ta) +
                             " and " + shape_string(tb));
    }
    const std::size_t m = ta.dim(0), k = ta.dim(1), k2 = tb.dim(0), n = tb.dim(1);
    if (k != k2) {
        throw DimensionError("matmul: inner dimensions disagree: " + shape_string(ta) +
                             " x " + shape_string(tb));
    }
    Tensor out({m, n}, 0.0);
    const double* A = ta.data().data();
    const double* B = tb.data().data();
    double* C = out.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = A[i * k + p];
            const double* Bp = B + p * n;
            double* Ci = C + i * n;
            for (std::size_t j = 0; j < n; ++j) Ci[j] += aip * Bp[j];
        }
    }
    add_flops(2ULL * m * k * n);
    Value v = push(std::move(out), {});
    node(v).back = [this, a, b, v, m, k, n]() {
        const double* G = node(v).grad.data().data();
        const double* A = node(a).value.data().data();
        const double* B = node(b).value.data().data();
        double* dA = node(a).grad.data().data();
        double* dB = node(b).grad.data().data();
        // dA = G * B^T
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
                double acc = 0.0;
                const double* Gi = G + i * n;
                const double* Bp = B + p * n;
                for (std::size_t j = 0; j < n; ++j) acc += Gi[j] * Bp[j];
                dA[i * k + p] += acc;
            }
        }
        // dB = A^T * G
        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t i = 0; i < m; ++i) {
                const double aip = A[i * k + p];
                const double* Gi = G + i * n;
                double* dBp = dB + p * n;
                for (std::size_t j = 0; j < n; ++j) dBp[j] += aip * Gi[j];
            }
        }
    };
    return v;
}

Value Graph::transpose(Value x) {
    const Tensor& t = node(x).value;
    if (t.ndim() != 2) {
        throw DimensionError("transpose: expected 2-D tensor, got " + shape_string(t));
    }
    const std::size_t r = t.dim(0), c = t.dim(1);
    Tensor out({c, r}, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) out.at(j, i) = t.at(i, j);
    }
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v, r, c]() {
        const Tensor& g = node(v).grad;
        Tensor& dx = node(x).grad;
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) dx.at(i, j) += g.at(j, i);
        }
    };
    return v;
}

Value Graph::reshape(Value x, std::vector<std::size_t> shape) {
    const Tensor& t = node(x).value;
    Tensor out = t.reshaped(shape);
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v]() {
        const double* g = node(v).grad.data().data();
        double* dx = node(x).grad.data().data();
        const std::size_t n = node(x).grad.size();
        for (std::size_t i = 0; i < n; ++i) dx[i] += g[i];
    };
    return v;
}

Value Graph::gather_cols(Value x, std::vector<std::size_t> cols) {
    const Tensor& t = node(x).value;
    if (t.ndim() != 2) {
        throw DimensionError("gather_cols: expected 2-D tensor, got " + shape_string(t));
    }
    const std::size_t r = t.dim(0), c = t.dim(1);
    for (std::size_t j : cols) {
        if (j >= c) throw DimensionError("gather_cols: column index out of range");
    }
    Tensor out({r, cols.size()}, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out.at(i, j) = t.at(i, cols[j]);
    }
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v, cols = std::move(cols), r]() {
        const Tensor& g = node(v).grad;
        Tensor& dx = node(x).grad;
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < cols.size(); ++j) dx.at(i, cols[j]) += g.at(i, j);
        }
    };
    return v;
}

Value Graph::concat_cols(const std::vector<Value>& xs) {
    if (xs.empty()) throw DimensionError("concat_cols: no inputs");
    std::size_t rows = 0, total_cols = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const MatView m = as_matrix(node(xs[i]).value, "concat_cols");
        if (i == 0) {
            rows = m.rows;
        } else if (m.rows != rows) {
            throw DimensionError("concat_cols: row counts disagree");
        }
        total_cols += m.cols;
    }
    Tensor out({rows, total_cols}, 0.0);
    std::size_t off = 0;
    for (Value x : xs) {
        const Tensor& t = node(x).value;
        const MatView m = as_matrix(t, "concat_cols");
        const double* src = t.data().data();
        for (std::size_t i = 0; i < m.rows; ++i) {
            for (std::size_t j = 0; j < m.cols; ++j) {
                out.at(i, off + j) = src[i * m.cols + j];
            }
        }
        off += m.cols;
    }
    Value v = push(std::move(out), {});
    node(v).back = [this, xs, v]() {
        const Tensor& g = node(v).grad;
        std::size_t off = 0;
        for (Value x : xs) {
            Tensor& dx = node(x).grad;
            const MatView m = as_matrix(dx, "concat_cols");
            double* dst = dx.data().data();
            for (std::size_t i = 0; i < m.rows; ++i) {
                for (std::size_t j = 0; j < m.cols; ++j) {
                    dst[i * m.cols + j] += g.at(i, off + j);
                }
            }
            off += m.cols;
        }
    };
    return v;
}

Value Graph::stack_rows(const std::vector<Value>& xs) {
    if (xs.empty()) throw DimensionError("stack_rows: no inputs");
    std::size_t cols = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const MatView m = as_matrix(node(xs[i]).value, "stack_rows");
        if (m.rows != 1) throw DimensionError("stack_rows: every input must be a single row");
        if (i == 0) {
            cols = m.cols;
        } else if (m.cols != cols) {
            throw DimensionError("stack_rows: row lengths disagree");
        }
    }
    Tensor out({xs.size(), cols}, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double* src = node(xs[i]).value.data().data();
        for (std::size_t j = 0; j < cols; ++j) out.at(i, j) = src[j];
    }
    Value v = push(std::move(out), {});
    node(v).back = [this, xs, v, cols]() {
        const Tensor& g = node(v).grad;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double* dx = node(xs[i]).grad.data().data();
            for (std::size_t j = 0; j < cols; ++j) dx[j] += g.at(i, j);
        }
    };
    return v;
}

Value Graph::add(Value a, Value b) {
    const Tensor& ta = node(a).value;
    const Tensor& tb = node(b).value;
    if (!ta.same_shape(tb)) {
        throw DimensionError("add: shape mismatch: " + shape_string(ta) + " vs " +
                             shape_string(tb));
    }
    Tensor out = ta;
    double* o = out.data().data();
    const double* y = tb.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) o[i] += y[i];
    add_flops(out.size());
    Value v = push(std::move(out), {});
    node(v).back = [this, a, b, v]() {
        const double* g = node(v).grad.data().data();
        double* da = node(a).grad.data().data();
        double* db = node(b).grad.data().data();
        const std::size_t n = node(v).grad.size();
        for (std::size_t i = 0; i < n; ++i) {
            da[i] += g[i];
            db[i] += g[i];
        }
    };
    return v;
}

Value Graph::sub(Value a, Value b) {
    const Tensor& ta = node(a).value;
    const Tensor& tb = node(b).value;
    if (!ta.same_shape(tb)) {
        throw DimensionError("sub: shape mismatch: " + shape_string(ta) + " vs " +
                             shape_string(tb));
    }
    Tensor out = ta;
    double* o = out.data().data();
    const double* y = tb.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) o[i] -= y[i];
    add_flops(out.size());
    Value v = push(std::move(out), {});
    node(v).back = [this, a, b, v]() {
        const double* g = node(v).grad.data().data();
        double* da = node(a).grad.data().data();
        double* db = node(b).grad.data().data();
        const std::size_t n = node(v).grad.size();
        for (std::size_t i = 0; i < n; ++i) {
            da[i] += g[i];
            db[i] -= g[i];
        }
    };
    return v;
}

Value Graph::mul(Value a, Value b) {
    const Tensor& ta = node(a).value;
    const Tensor& tb = node(b).value;
    if (!ta.same_shape(tb)) {
        throw DimensionError("mul: shape mismatch: " + shape_string(ta) + " vs " +
                             shape_string(tb));
    }
    Tensor out = ta;
    double* o = out.data().data();
    const double* y = tb.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) o[i] *= y[i];
    add_flops(out.size());
    Value v = push(std::move(out), {});
    node(v).back = [this, a, b, v]() {
        const double* g = node(v).grad.data().data();
        const double* x = node(a).value.data().data();
        const double* y = node(b).value.data().data();
        double* da = node(a).grad.data().data();
        double* db = node(b).grad.data().data();
        const std::size_t n = node(v).grad.size();
        for (std::size_t i = 0; i < n; ++i) {
            da[i] += g[i] * y[i];
            db[i] += g[i] * x[i];
        }
    };
    return v;
}

Value Graph::scale(Value x, double s) {
    Tensor out = node(x).value;
    double* o = out.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) o[i] *= s;
    add_flops(out.size());
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v, s]() {
        const double* g = node(v).grad.data().data();
        double* dx = node(x).grad.data().data();
        const std::size_t n = node(v).grad.size();
        for (std::size_t i = 0; i < n; ++i) dx[i] += s * g[i];
    };
    return v;
}

Value Graph::add_row(Value x, Value row) {
    const Tensor& tx = node(x).value;
    const Tensor& tr = node(row).value;
    const MatView mx = as_matrix(tx, "add_row");
    const MatView mr = as_matrix(tr, "add_row");
    if (mr.rows != 1 || mr.cols != mx.cols) {
        throw DimensionError("add_row: row shape " + shape_string(tr) +
                             " incompatible with matrix " + shape_string(tx));
    }
    Tensor out = tx;
    double* o = out.data().data();
    const double* r = tr.data().data();
    for (std::size_t i = 0; i < mx.rows; ++i) {
        for (std::size_t j = 0; j < mx.cols; ++j) o[i * mx.cols + j] += r[j];
    }
    add_flops(out.size());
    Value v = push(std::move(out), {});
    node(v).back = [this, x, row, v, mx]() {
        const double* g = node(v).grad.data().data();
        double* dx = node(x).grad.data().data();
        double* dr = node(row).grad.data().data();
        for (std::size_t i = 0; i < mx.rows; ++i) {
            for (std::size_t j = 0; j < mx.cols; ++j) {
                dx[i * mx.cols + j] += g[i * mx.cols + j];
                dr[j] += g[i * mx.cols + j];
            }
        }
    };
    return v;
}

Value Graph::relu(Value x) {
    Tensor out = node(x).value;
    double* o = out.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) o[i] = o[i] > 0.0 ? o[i] : 0.0;
    add_flops(out.size());
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v]() {
        const double* g = node(v).grad.data().data();
        const double* in = node(x).value.data().data();
        double* dx = node(x).grad.data().data();
        const std::size_t n = node(v).grad.size();
        for (std::size_t i = 0; i < n; ++i) dx[i] += in[i] > 0.0 ? g[i] : 0.0;
    };
    return v;
}

Value Graph::sigmoid(Value x) {
    Tensor out = node(x).value;
    double* o = out.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double z = o[i];
        if (z >= 0.0) {
            o[i] = 1.0 / (1.0 + std::exp(-z));
        } else {
            const double e = std::exp(z);
            o[i] = e / (1.0 + e);
        }
    }
    add_flops(4 * out.size());
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v]() {
        const double* g = node(v).grad.data().data();
        const double* y = node(v).value.data().data();
        double* dx = node(x).grad.data().data();
        const std::size_t n = node(v).grad.size();
        for (std::size_t i = 0; i < n; ++i) dx[i] += g[i] * y[i] * (1.0 - y[i]);
    };
    return v;
}

Value Graph::softmax(Value x) {
    const Tensor& t = node(x).value;
    const MatView m = as_matrix(t, "softmax");
    Tensor out = t;
    double* o = out.data().data();
    for (std::size_t i = 0; i < m.rows; ++i) {
        double* row = o + i * m.cols;
        double mx = row[0];
        for (std::size_t j = 1; j < m.cols; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < m.cols; ++j) row[j] /= sum;
    }
    add_flops(5ULL * m.rows * m.cols);
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v, m]() {
        const double* g = node(v).grad.data().data();
        const double* y = node(v).value.data().data();
        double* dx = node(x).grad.data().data();
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double* gi = g + i * m.cols;
            const double* yi = y + i * m.cols;
            double dot = 0.0;
            for (std::size_t j = 0; j < m.cols; ++j) dot += gi[j] * yi[j];
            for (std::size_t j = 0; j < m.cols; ++j) {
                dx[i * m.cols + j] += yi[j] * (gi[j] - dot);
            }
        }
    };
    return v;
}

Value Graph::layer_norm(Value x, Value gain, Value bias) {
    const Tensor& t = node(x).value;
    const MatView m = as_matrix(t, "layer_norm");
    if (m.cols < 2) {
        throw DimensionError("layer_norm: needs at least 2 features per row");
    }
    const Tensor& tg = node(gain).value;
    const Tensor& tb = node(bias).value;
    if (tg.size() != m.cols || tb.size() != m.cols) {
        throw DimensionError("layer_norm: gain/bias length must equal feature count");
    }
    Tensor out = t;
    Tensor xhat(t.shape(), 0.0);       // kept for the backward pass
    std::vector<double> inv_std(m.rows, 0.0);
    double* o = out.data().data();
    double* xh = xhat.data().data();
    const double* g = tg.data().data();
    const double* b = tb.data().data();
    for (std::size_t i = 0; i < m.rows; ++i) {
        double* row = o + i * m.cols;
        double mean = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) mean += row[j];
        mean /= static_cast<double>(m.cols);
        double var = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            const double d = row[j] - mean;
            var += d * d;
        }
        var /= static_cast<double>(m.cols);
        const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        inv_std[i] = inv;
        for (std::size_t j = 0; j < m.cols; ++j) {
            const double h = (row[j] - mean) * inv;
            xh[i * m.cols + j] = h;
            row[j] = h * g[j] + b[j];
        }
    }
    add_flops(8ULL * m.rows * m.cols);
    Value v = push(std::move(out), {});
    node(v).back = [this, x, gain, bias, v, m, xhat = std::move(xhat),
                    inv_std = std::move(inv_std)]() {
        const double* gr = node(v).grad.data().data();
        const double* xh = xhat.data().data();
        const double* g = node(gain).value.data().data();
        double* dx = node(x).grad.data().data();
        double* dg = node(gain).grad.data().data();
        double* db = node(bias).grad.data().data();
        const double nc = static_cast<double>(m.cols);
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double* gi = gr + i * m.cols;
            const double* hi = xh + i * m.cols;
            double sum_dh = 0.0, sum_dh_h = 0.0;
            for (std::size_t j = 0; j < m.cols; ++j) {
                const double dh = gi[j] * g[j];
                sum_dh += dh;
                sum_dh_h += dh * hi[j];
                dg[j] += gi[j] * hi[j];
                db[j] += gi[j];
            }
            const double inv = inv_std[i];
            for (std::size_t j = 0; j < m.cols; ++j) {
                const double dh = gi[j] * g[j];
                dx[i * m.cols + j] += inv * (dh - sum_dh / nc - hi[j] * sum_dh_h / nc);
            }
        }
    };
    return v;
}

Value Graph::conv1d(Value x, Value kernels, std::size_t stride) {
    const Tensor& tx = node(x).value;
    const Tensor& tk = node(kernels).value;
    if (tx.ndim() != 2) {
        throw DimensionError("conv1d: input must be T-by-D, got " + shape_string(tx));
    }
    if (tk.ndim() != 3) {
        throw DimensionError("conv1d: kernels must be C-by-k-by-D, got " + shape_string(tk));
    }
    if (stride == 0) throw ParameterError("conv1d: stride must be positive");
    const std::size_t T = tx.dim(0), D = tx.dim(1);
    const std::size_t C = tk.dim(0), K = tk.dim(1), Dk = tk.dim(2);
    if (Dk != D) {
        throw DimensionError("conv1d: kernel feature dim " + std::to_string(Dk) +
                             " != input feature dim " + std::to_string(D));
    }
    if (K > T) {
        throw DimensionError("conv1d: kernel length " + std::to_string(K) +
                             " exceeds input length " + std::to_string(T));
    }
    const std::size_t To = (T - K) / stride + 1;
    Tensor out({To, C}, 0.0);
    for (std::size_t t = 0; t < To; ++t) {
        for (std::size_t c = 0; c < C; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < K; ++i) {
                const double* xr = tx.data().data() + (t * stride + i) * D;
                const double* kr = tk.data().data() + (c * K + i) * D;
                for (std::size_t d = 0; d < D; ++d) acc += xr[d] * kr[d];
            }
            out.at(t, c) = acc;
        }
    }
    add_flops(2ULL * To * C * K * D);
    Value v = push(std::move(out), {});
    node(v).back = [this, x, kernels, v, stride, T, D, C, K, To]() {
        const Tensor& g = node(v).grad;
        const Tensor& tx = node(x).value;
        const Tensor& tk = node(kernels).value;
        double* dx = node(x).grad.data().data();
        double* dk = node(kernels).grad.data().data();
        (void)T;
        for (std::size_t t = 0; t < To; ++t) {
            for (std::size_t c = 0; c < C; ++c) {
                const double go = g.at(t, c);
                if (go == 0.0) continue;
                for (std::size_t i = 0; i < K; ++i) {
                    const std::size_t row = t * stride + i;
                    const double* xr = tx.data().data() + row * D;
                    const double* kr = tk.data().data() + (c * K + i) * D;
                    double* dxr = dx + row * D;
                    double* dkr = dk + (c * K + i) * D;
                    for (std::size_t d = 0; d < D; ++d) {
                        dxr[d] += go * kr[d];
                        dkr[d] += go * xr[d];
                    }
                }
            }
        }
    };
    return v;
}

Value Graph::global_max_pool(Value x) {
    const Tensor& t = node(x).value;
    if (t.ndim() != 2 || t.dim(0) == 0 || t.dim(1) == 0) {
        throw DimensionError("global_max_pool: expected non-empty P-by-K tensor, got " +
                             shape_string(t));
    }
    const std::size_t P = t.dim(0), K = t.dim(1);
    Tensor out({K}, 0.0);
    std::vector<std::size_t> argmax(K, 0);
    for (std::size_t j = 0; j < K; ++j) {
        double best = t.at(0, j);
        std::size_t bi = 0;
        for (std::size_t i = 1; i < P; ++i) {
            if (t.at(i, j) > best) {
                best = t.at(i, j);
                bi = i;
            }
        }
        out.data()[j] = best;
        argmax[j] = bi;
    }
    add_flops(P * K);
    Value v = push(std::move(out), {});
    node(v).back = [this, x, v, argmax = std::move(argmax), K]() {
        const double* g = node(v).grad.data().data();
        Tensor& dx = node(x).grad;
        for (std::size_t j = 0; j < K; ++j) dx.at(argmax[j], j) += g[j];
    };
    return v;
}

Value Graph::sum(Value x) {
    const Tensor& t = node(x).value;
    double acc = 0.0;
    for (double d : t.data()) acc += d;
    add_flops(t.size());
    Value v = push(Tensor::scalar(acc), {});
    node(v).back = [this, x, v]() {
        const double g = node(v).grad.data()[0];
        double* dx = node(x).grad.data().data();
        const std::size_t n = node(x).grad.size();
        for (std::size_t i = 0; i < n; ++i) dx[i] += g;
    };
    return v;
}

Value Graph::mean(Value x) {
    const Tensor& t = node(x).value;
    if (t.size() == 0) throw DimensionError("mean: empty tensor");
    double acc = 0.0;
    for (double d : t.data()) acc += d;
    const double inv = 1.0 / static_cast<double>(t.size());
    add_flops(t.size());
    Value v = push(Tensor::scalar(acc * inv), {});
    node(v).back = [this, x, v, inv]() {
        const double g = node(v).grad.data()[0] * inv;
        double* dx = node(x).grad.data().data();
        const std::size_t n = node(x).grad.size();
        for (std::size_t i = 0; i < n; ++i) dx[i] += g;
    };
    return v;
}

Value Graph::l1_norm(Value x) {
    const Tensor& t = node(x).value;
    double acc = 0.0;
    for (double d : t.data()) acc += std::abs(d);
    add_flops(2 * t.size());
    Value v = push(Tensor::scalar(acc), {});
    node(v).back = [this, x, v]() {
        const double g = node(v).grad.data()[0];
        const double* in = node(x).value.data().data();
        double* dx = node(x).grad.data().data();
        const std::size_t n = node(x).grad.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (in[i] > 0.0) {
                dx[i] += g;
            } else if (in[i] < 0.0) {
                dx[i] -= g;
            }
        }
    };
    return v;
}

Value Graph::mse_loss(Value pred, Value target) {
    const Tensor& tp = node(pred).value;
    const Tensor& tt = node(target).value;
    if (!tp.same_shape(tt)) {
        throw DimensionError("mse_loss: shape mismatch: " + shape_string(tp) + " vs " +
                             shape_string(tt));
    }
    if (tp.size() == 0) throw DimensionError("mse_loss: empty tensors");
    const double* p = tp.data().data();
    const double* t = tt.data().data();
    double acc = 0.0;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        const double d = p[i] - t[i];
        acc += d * d;
    }
    const double inv = 1.0 / static_cast<double>(tp.size());
    add_flops(3 * tp.size());
    Value v = push(Tensor::scalar(acc * inv), {});
    node(v).back = [this, pred, target, v, inv]() {
        const double g = node(v).grad.data()[0];
        const double* p = node(pred).value.data().data();
        const double* t = node(target).value.data().data();
        double* dp = node(pred).grad.data().data();
        double* dt = node(target).grad.data().data();
        const std::size_t n = node(pred).grad.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double d = 2.0 * (p[i] - t[i]) * inv * g;
            dp[i] += d;
            dt[i] -= d;
        }
    };
    return v;
}

Value Graph::bce_loss(Value pred, Value target) {
    const Tensor& tp = node(pred).value;
    const Tensor& tt = node(target).value;
    if (!tp.same_shape(tt)) {
        throw DimensionError("bce_loss: shape mismatch: " + shape_string(tp) + " vs " +
                             shape_string(tt));
    }
    if (tp.size() == 0) throw DimensionError("bce_loss: empty tensors");
    const double* p = tp.data().data();
    const double* t = tt.data().data();
    double acc = 0.0;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        const double pc = std::clamp(p[i], kBceEps, 1.0 - kBceEps);
        acc -= t[i] * std::log(pc) + (1.0 - t[i]) * std::log(1.0 - pc);
    }
    const double inv = 1.0 / static_cast<double>(tp.size());
    add_flops(6 * tp.size());
    Value v = push(Tensor::scalar(acc * inv), {});
    node(v).back = [this, pred, target, v, inv]() {
        const double g = node(v).grad.data()[0];
        const double* p = node(pred).value.data().data();
        const double* t = node(target).value.data().data();
        double* dp = node(pred).grad.data().data();
        double* dt = node(target).grad.data().data();
        const std::size_t n = node(pred).grad.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double pc = std::clamp(p[i], kBceEps, 1.0 - kBceEps);
            // Clamp passes gradient through so saturated predictions recover.
            dp[i] += g * inv * (pc - t[i]) / (pc * (1.0 - pc));
            dt[i] += g * inv * (std::log(1.0 - pc) - std::log(pc));
        }
    };
    return v;
}

void Graph::backward(Value loss) {
    Node& ln = node(loss);
    if (ln.value.size() != 1) {
        throw ContractError("backward: loss must be scalar, got shape " +
                            shape_string(ln.value));
    }
    for (Node& n : nodes_) n.grad.fill(0.0);
    ln.grad.data()[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].back) nodes_[i].back();
    }
    for (Node& n : nodes_) {
        if (n.parameter == nullptr) continue;
        double* dst = n.parameter->grad.data().data();
        const double* src = n.grad.data().data();
        for (std::size_t i = 0; i < n.grad.size(); ++i) dst[i] += src[i];
    }
}

}  // namespace mqa::numcore
