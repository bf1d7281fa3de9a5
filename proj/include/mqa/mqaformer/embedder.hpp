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
#include <string>
#include <vector>

#include "mqa/mqaformer/attention.hpp"
#include "mqa/numcore/graph.hpp"
#include "mqa/numcore/nn.hpp"
#include "mqa/numcore/params.hpp"

namespace mqa::mqaformer {

enum class EmbedderKind { kMlp, kCnn, kHfe, kHfeA };

std::string to_string(EmbedderKind k);
EmbedderKind embedder_kind_from_string(const std::string& s);

/// Ordered, named joint-index groups. For the hierarchical embedders the
/// groups must partition {0..M-1} exactly. The named presets follow the
/// usual five-region anatomy (trunk+head, arms, legs); the source trackers
/// never publish per-part layouts, so the groupings are this library's own.
struct BodyPartition {
    std::vector<std::string> names;
    std::vector<std::vector<std::size_t>> parts;

    std::size_t size() const { return parts.size(); }
    std::size_t joint_count() const;

    /// Requires every index in {0..joints-1} to appear exactly once.
    void validate(std::size_t joints) const;

    static BodyPartition vicon39();
    static BodyPartition kinect25();
    static BodyPartition uiprmd22();
    /// joints split into `parts` contiguous groups, sizes differing by <= 1.
    static BodyPartition even(std::size_t joints, std::size_t parts);
};

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::kMlp;
    std::size_t K = 256;  // token dimension
    std::size_t W = 40;   // window length
    std::size_t D = 0;    // features per frame, 3 per joint
    BodyPartition body_parts;             // hfe/hfe_a only
    std::size_t hfe_attention_heads = 5;  // hfe_a only
    std::size_t K_part = 64;              // per-part feature size

    std::size_t mlp_hidden1 = 256;
    std::size_t mlp_hidden2 = 256;
    std::size_t cnn_channels1 = 64;
    std::size_t cnn_kernel1 = 5;
    std::size_t cnn_channels2 = 128;
    std::size_t cnn_kernel2 = 3;
    std::size_t part_channels = 32;
    std::size_t part_kernel = 3;

    /// ConfigError on inconsistent fields; DimensionError when W is shorter
    /// than the convolutional receptive field of the selected kind.
    void validate() const;
};

/// One of four window-to-token maps:
///   mlp:   flatten, two dense+ReLU layers, linear to K
///   cnn:   two conv1d+ReLU stages over time, max pool over time, linear to K
///   hfe:   per-part conv+ReLU, pool over time, dense+ReLU to K_part;
///          part vectors concatenated, linear to K
///   hfe_a: hfe part vectors stacked parts-by-K_part, multi-head attention
///          over parts, max pool over parts, linear to K
class Embedder {
public:
    static Embedder create(numcore::ParameterSet& params, const EmbedderConfig& cfg,
                           numcore::Rng& rng);

    const EmbedderConfig& config() const { return cfg_; }

    /// window: W-by-D -> 1-by-K token. For hfe_a, each head's parts-by-parts
    /// attention matrix is appended to part_attn when it is non-null.
    numcore::Value embed(numcore::Graph& g, numcore::Value window,
                         std::vector<numcore::Tensor>* part_attn = nullptr) const;

    /// Forward-only pre-concatenation sub-network outputs (hfe/hfe_a): one
    /// length-K_part vector per body part. ConfigError for other kinds.
    std::vector<numcore::Tensor> part_features(const numcore::Tensor& window) const;

private:
    /// The shared hfe/hfe_a sub-network of one part: 1-by-K_part.
    numcore::Value part_vector(numcore::Graph& g, numcore::Value window,
                               std::size_t part) const;

    EmbedderConfig cfg_;
    numcore::DenseLayer mlp1_, mlp2_, mlp3_;
    numcore::Conv1dLayer conv1_, conv2_;
    numcore::DenseLayer cnn_out_;
    std::vector<numcore::Conv1dLayer> part_conv_;
    std::vector<numcore::DenseLayer> part_dense_;
    numcore::DenseLayer hfe_out_;
    MultiHeadAttention part_attention_;
};

/// Kind-checked aliases for the four maps; ConfigError when the embedder was
/// built for a different kind.
numcore::Value embed_mlp(const Embedder& e, numcore::Graph& g, numcore::Value window);
numcore::Value embed_cnn(const Embedder& e, numcore::Graph& g, numcore::Value window);
numcore::Value embed_hfe(const Embedder& e, numcore::Graph& g, numcore::Value window);
numcore::Value embed_hfe_a(const Embedder& e, numcore::Graph& g, numcore::Value window,
                           std::vector<numcore::Tensor>& part_attn);

}  // namespace mqa::mqaformer
