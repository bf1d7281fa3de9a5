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

#include "mqa/mqaformer/embedder.hpp"

#include <algorithm>

#include "mqa/errors.hpp"

namespace mqa::mqaformer {

using numcore::Conv1dLayer;
using numcore::DenseLayer;
using numcore::Graph;
using numcore::Init;
using numcore::ParameterSet;
using numcore::Rng;
using numcore::Value;

std::string to_string(EmbedderKind k) {
    switch (k) {
        case EmbedderKind::kMlp: return "mlp";
        case EmbedderKind::kCnn: return "cnn";
        case EmbedderKind::kHfe: return "hfe";
        case EmbedderKind::kHfeA: return "hfe_a";
    }
    throw ContractError("to_string: unknown embedder kind");
}

EmbedderKind embedder_kind_from_string(const std::string& s) {
    if (s == "mlp") return EmbedderKind::kMlp;
    if (s == "cnn") return EmbedderKind::kCnn;
    if (s == "hfe") return EmbedderKind::kHfe;
    if (s == "hfe_a") return EmbedderKind::kHfeA;
    throw ParseError("unknown embedder kind '" + s + "' (mlp, cnn, hfe, hfe_a)");
}

std::size_t BodyPartition::joint_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.size();
    return n;
}

void BodyPartition::validate(std::size_t joints) const {
    if (parts.empty()) throw ConfigError("body partition: no parts defined");
    if (names.size() != parts.size()) {
        throw ConfigError("body partition: " + std::to_string(names.size()) +
                          " names for " + std::to_string(parts.size()) + " parts");
    }
    std::vector<std::size_t> seen(joints, 0);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        if (parts[p].empty()) {
            throw ConfigError("body partition: part '" + names[p] + "' is empty");
        }
        for (std::size_t j : parts[p]) {
            if (j >= joints) {
                throw ConfigError("body partition: part '" + names[p] + "' names joint " +
                                  std::to_string(j) + ", model has " +
                                  std::to_string(joints));
            }
            ++seen[j];
        }
    }
    for (std::size_t j = 0; j < joints; ++j) {
        if (seen[j] != 1) {
            throw ConfigError("body partition: joint " + std::to_string(j) + " appears " +
                              std::to_string(seen[j]) + " times; need exactly 1");
        }
    }
}

namespace {

std::vector<std::size_t> index_range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(i);
    return out;
}

}  // namespace

BodyPartition BodyPartition::vicon39() {
    BodyPartition b;
    b.names = {"trunk_head", "left_arm", "right_arm", "left_leg", "right_leg"};
    b.parts = {index_range(0, 9), index_range(9, 16), index_range(16, 23),
               index_range(23, 31), index_range(31, 39)};
    return b;
}

BodyPartition BodyPartition::kinect25() {
    // Kinect V2 joint indices: spine chain 0,1,20 with neck 2 and head 3;
    // arms 4-7 / 8-11 plus hand tips and thumbs 21-24; legs 12-15 / 16-19.
    BodyPartition b;
    b.names = {"trunk_head", "left_arm", "right_arm", "left_leg", "right_leg"};
    b.parts = {{0, 1, 2, 3, 20},      {4, 5, 6, 7, 21, 22}, {8, 9, 10, 11, 23, 24},
               {12, 13, 14, 15},      {16, 17, 18, 19}};
    return b;
}

BodyPartition BodyPartition::uiprmd22() {
    BodyPartition b;
    b.names = {"trunk_head", "left_arm", "right_arm", "left_leg", "right_leg"};
    b.parts = {index_range(0, 6), index_range(6, 10), index_range(10, 14),
               index_range(14, 18), index_range(18, 22)};
    return b;
}

BodyPartition BodyPartition::even(std::size_t joints, std::size_t parts) {
    if (parts == 0 || joints < parts) {
        throw ConfigError("body partition: need 1 <= parts <= joints, got " +
                          std::to_string(parts) + " parts for " + std::to_string(joints) +
                          " joints");
    }
    BodyPartition b;
    const std::size_t base = joints / parts;
    const std::size_t extra = joints % parts;
    std::size_t at = 0;
    for (std::size_t p = 0; p < parts; ++p) {
        const std::size_t len = base + (p < extra ? 1 : 0);
        b.names.push_back("part" + std::to_string(p));
        b.parts.push_back(index_range(at, at + len));
        at += len;
    }
    return b;
}

void EmbedderConfig::validate() const {
    if (K == 0) throw ConfigError("embedder: K must be positive");
    if (W == 0) throw ConfigError("embedder: W must be positive");
    if (D == 0) throw ConfigError("embedder: D must be positive");
    switch (kind) {
        case EmbedderKind::kMlp:
            if (mlp_hidden1 == 0 || mlp_hidden2 == 0) {
                throw ConfigError("embedder: mlp hidden sizes must be positive");
            }
            break;
        case EmbedderKind::kCnn: {
            if (cnn_channels1 == 0 || cnn_channels2 == 0 || cnn_kernel1 == 0 ||
                cnn_kernel2 == 0) {
                throw ConfigError("embedder: cnn channels and kernels must be positive");
            }
            const std::size_t receptive = cnn_kernel1 + cnn_kernel2 - 1;
            if (W < receptive) {
                throw DimensionError("embedder: window " + std::to_string(W) +
                                     " shorter than cnn receptive field " +
                                     std::to_string(receptive));
            }
            break;
        }
        case EmbedderKind::kHfe:
        case EmbedderKind::kHfeA: {
            if (D % 3 != 0) {
                throw ConfigError("embedder: hierarchical kinds need 3 features per joint, "
                                  "D = " +
                                  std::to_string(D));
            }
            body_parts.validate(D / 3);
            if (part_channels == 0 || part_kernel == 0 || K_part == 0) {
                throw ConfigError("embedder: part sub-network sizes must be positive");
            }
            if (W < part_kernel) {
                throw DimensionError("embedder: window " + std::to_string(W) +
                                     " shorter than part receptive field " +
                                     std::to_string(part_kernel));
            }
            if (kind == EmbedderKind::kHfeA && hfe_attention_heads == 0) {
                throw ConfigError("embedder: hfe_a needs at least one attention head");
            }
            break;
        }
    }
}

Embedder Embedder::create(ParameterSet& params, const EmbedderConfig& cfg, Rng& rng) {
    cfg.validate();
    Embedder e;
    e.cfg_ = cfg;
    switch (cfg.kind) {
        case EmbedderKind::kMlp: {
            const std::size_t flat = cfg.W * cfg.D;
            e.mlp1_ = DenseLayer::create(params, "embed.mlp1", flat, cfg.mlp_hidden1,
                                         Init::kHe, rng);
            e.mlp2_ = DenseLayer::create(params, "embed.mlp2", cfg.mlp_hidden1,
                                         cfg.mlp_hidden2, Init::kHe, rng);
            e.mlp3_ = DenseLayer::create(params, "embed.mlp3", cfg.mlp_hidden2, cfg.K,
                                         Init::kXavier, rng);
            break;
        }
        case EmbedderKind::kCnn: {
            e.conv1_ = Conv1dLayer::create(params, "embed.conv1", cfg.cnn_channels1,
                                           cfg.cnn_kernel1, cfg.D, 1, Init::kHe, rng);
            e.conv2_ = Conv1dLayer::create(params, "embed.conv2", cfg.cnn_channels2,
                                           cfg.cnn_kernel2, cfg.cnn_channels1, 1,
                                           Init::kHe, rng);
            e.cnn_out_ = DenseLayer::create(params, "embed.cnn_out", cfg.cnn_channels2,
                                            cfg.K, Init::kXavier, rng);
            break;
        }
        case EmbedderKind::kHfe:
        case EmbedderKind::kHfeA: {
            const std::size_t n_parts = cfg.body_parts.size();
            for (std::size_t p = 0; p < n_parts; ++p) {
                const std::string base = "embed.part" + std::to_string(p);
                const std::size_t in_features = 3 * cfg.body_parts.parts[p].size();
                e.part_conv_.push_back(Conv1dLayer::create(params, base + ".conv",
                                                           cfg.part_channels,
                                                           cfg.part_kernel, in_features,
                                                           1, Init::kHe, rng));
                e.part_dense_.push_back(DenseLayer::create(params, base + ".dense",
                                                           cfg.part_channels, cfg.K_part,
                                                           Init::kHe, rng));
            }
            if (cfg.kind == EmbedderKind::kHfe) {
                e.hfe_out_ = DenseLayer::create(params, "embed.hfe_out",
                                                n_parts * cfg.K_part, cfg.K,
                                                Init::kXavier, rng);
            } else {
                const std::size_t head_dim =
                    std::max<std::size_t>(1, cfg.K_part / cfg.hfe_attention_heads);
                e.part_attention_ =
                    MultiHeadAttention::create(params, "embed.part_attention", cfg.K_part,
                                               cfg.hfe_attention_heads, head_dim, rng);
                e.hfe_out_ = DenseLayer::create(params, "embed.hfe_out", cfg.K_part,
                                                cfg.K, Init::kXavier, rng);
            }
            break;
        }
    }
    return e;
}

Value Embedder::part_vector(Graph& g, Value window, std::size_t part) const {
    std::vector<std::size_t> cols;
    cols.reserve(3 * cfg_.body_parts.parts[part].size());
    for (std::size_t j : cfg_.body_parts.parts[part]) {
        cols.push_back(3 * j);
        cols.push_back(3 * j + 1);
        cols.push_back(3 * j + 2);
    }
    Value x = g.gather_cols(window, cols);
    x = g.relu(part_conv_[part].apply(g, x));
    x = g.reshape(g.global_max_pool(x), {1, cfg_.part_channels});
    return g.relu(part_dense_[part].apply(g, x));
}

Value Embedder::embed(Graph& g, Value window,
                      std::vector<numcore::Tensor>* part_attn) const {
    switch (cfg_.kind) {
        case EmbedderKind::kMlp: {
            Value h = g.reshape(window, {1, cfg_.W * cfg_.D});
            h = g.relu(mlp1_.apply(g, h));
            h = g.relu(mlp2_.apply(g, h));
            return mlp3_.apply(g, h);
        }
        case EmbedderKind::kCnn: {
            Value h = g.relu(conv1_.apply(g, window));
            h = g.relu(conv2_.apply(g, h));
            const Value pooled =
                g.reshape(g.global_max_pool(h), {1, cfg_.cnn_channels2});
            return cnn_out_.apply(g, pooled);
        }
        case EmbedderKind::kHfe: {
            std::vector<Value> vectors;
            vectors.reserve(cfg_.body_parts.size());
            for (std::size_t p = 0; p < cfg_.body_parts.size(); ++p) {
                vectors.push_back(part_vector(g, window, p));
            }
            return hfe_out_.apply(g, g.concat_cols(vectors));
        }
        case EmbedderKind::kHfeA: {
            std::vector<Value> vectors;
            vectors.reserve(cfg_.body_parts.size());
            for (std::size_t p = 0; p < cfg_.body_parts.size(); ++p) {
                vectors.push_back(part_vector(g, window, p));
            }
            const Value stacked = g.stack_rows(vectors);
            const Value mixed =
                part_attention_.apply(g, stacked, "part_attention", part_attn);
            const Value pooled =
                g.reshape(g.global_max_pool(mixed), {1, cfg_.K_part});
            return hfe_out_.apply(g, pooled);
        }
    }
    throw ContractError("Embedder::embed: unknown kind");
}

std::vector<numcore::Tensor> Embedder::part_features(const numcore::Tensor& window) const {
    if (cfg_.kind != EmbedderKind::kHfe && cfg_.kind != EmbedderKind::kHfeA) {
        throw ConfigError("part_features: embedder was built as " + to_string(cfg_.kind));
    }
    Graph g;
    const Value w = g.constant(window);
    std::vector<numcore::Tensor> out;
    out.reserve(cfg_.body_parts.size());
    for (std::size_t p = 0; p < cfg_.body_parts.size(); ++p) {
        out.push_back(g.value(part_vector(g, w, p)).reshaped({cfg_.K_part}));
    }
    return out;
}

namespace {

void require_kind(const Embedder& e, EmbedderKind want, const char* op) {
    if (e.config().kind != want) {
        throw ConfigError(std::string(op) + ": embedder was built as " +
                          to_string(e.config().kind));
    }
}

}  // namespace

Value embed_mlp(const Embedder& e, Graph& g, Value window) {
    require_kind(e, EmbedderKind::kMlp, "embed_mlp");
    return e.embed(g, window);
}

Value embed_cnn(const Embedder& e, Graph& g, Value window) {
    require_kind(e, EmbedderKind::kCnn, "embed_cnn");
    return e.embed(g, window);
}

Value embed_hfe(const Embedder& e, Graph& g, Value window) {
    require_kind(e, EmbedderKind::kHfe, "embed_hfe");
    return e.embed(g, window);
}

Value embed_hfe_a(const Embedder& e, Graph& g, Value window,
                  std::vector<numcore::Tensor>& part_attn) {
    require_kind(e, EmbedderKind::kHfeA, "embed_hfe_a");
    return e.embed(g, window, &part_attn);
}

}  // namespace mqa::mqaformer
