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

#include "mqa/mqaformer/scorer.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mqa/errors.hpp"
#include "mqa/numcore/checkpoint.hpp"
#include "mqa/numcore/rng.hpp"

namespace mqa::mqaformer {

using numcore::DenseLayer;
using numcore::Graph;
using numcore::Init;
using numcore::Rng;
using numcore::Tensor;
using numcore::Value;
using skeldata::SkeletalSequence;

void ScorerConfig::validate() const {
    embedder.validate();
    if (T == 0 || T % embedder.W != 0) {
        throw ConfigError("scorer: T = " + std::to_string(T) +
                          " must be a positive multiple of W = " +
                          std::to_string(embedder.W));
    }
    if (blocks == 0) throw ConfigError("scorer: need at least one encoder block");
    if (heads == 0 || embedder.K % heads != 0) {
        throw ConfigError("scorer: token dim " + std::to_string(embedder.K) +
                          " not divisible by " + std::to_string(heads) + " heads");
    }
    if (head_hidden1 == 0 || head_hidden2 == 0) {
        throw ConfigError("scorer: head hidden sizes must be positive");
    }
}

ScorerModel::ScorerModel(ScorerConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    Rng rng(seed);
    embedder_ = Embedder::create(params_, cfg_.embedder, rng);
    const std::size_t K = cfg_.embedder.K;
    for (std::size_t b = 0; b < cfg_.blocks; ++b) {
        blocks_.push_back(EncoderBlock::create(params_, "block" + std::to_string(b), K,
                                               cfg_.heads, cfg_.ff_dim(), rng));
    }
    const std::size_t N = cfg_.window_count();
    head1_ = DenseLayer::create(params_, "head1", N * K, cfg_.head_hidden1, Init::kHe,
                                rng);
    head2_ = DenseLayer::create(params_, "head2", cfg_.head_hidden1, cfg_.head_hidden2,
                                Init::kHe, rng);
    head3_ = DenseLayer::create(params_, "head3", cfg_.head_hidden2, 1, Init::kXavier,
                                rng);
    positional_ = sinusoidal_positions(N, K);
    input_mean_ = Tensor({cfg_.embedder.D}, 0.0);
    input_std_ = Tensor({cfg_.embedder.D}, 1.0);
}

void ScorerModel::set_standardization(Tensor mean, Tensor stddev) {
    if (mean.size() != cfg_.embedder.D || stddev.size() != cfg_.embedder.D) {
        throw DimensionError("scorer: standardization length must be D");
    }
    for (double& s : stddev.data()) {
        if (s < 1e-12) s = 1.0;
    }
    input_mean_ = std::move(mean);
    input_std_ = std::move(stddev);
}

Value ScorerModel::forward(Graph& g, const SkeletalSequence& x,
                           AttentionRecord* record) const {
    if (x.frame_count() != cfg_.T || x.feature_count() != cfg_.embedder.D) {
        throw DimensionError("scorer: sequence " + x.id + " is " +
                             std::to_string(x.frame_count()) + "x" +
                             std::to_string(x.feature_count()) + ", model expects " +
                             std::to_string(cfg_.T) + "x" +
                             std::to_string(cfg_.embedder.D));
    }
    SkeletalSequence scaled = x;
    for (std::size_t t = 0; t < scaled.frame_count(); ++t) {
        for (std::size_t c = 0; c < cfg_.embedder.D; ++c) {
            scaled.frames.at(t, c) = (x.frames.at(t, c) - input_mean_[c]) / input_std_[c];
        }
    }
    const skeldata::WindowedSequence windows =
        skeldata::window_slice(scaled, cfg_.embedder.W);

    const bool want_parts =
        record != nullptr && cfg_.embedder.kind == EmbedderKind::kHfeA;
    std::vector<Tensor> window_part_attn;  // N * heads matrices, window-major

    std::vector<Value> tokens;
    tokens.reserve(windows.N);
    for (const Tensor& w : windows.windows) {
        tokens.push_back(embedder_.embed(g, g.constant(w),
                                         want_parts ? &window_part_attn : nullptr));
    }

    Value z = g.stack_rows(tokens);
    z = add_positional(g, z, positional_);
    z = encoder_forward(g, z, blocks_, record);

    if (want_parts && !window_part_attn.empty()) {
        const std::size_t heads = cfg_.embedder.hfe_attention_heads;
        record->part_attention.assign(heads, Tensor());
        for (std::size_t h = 0; h < heads; ++h) {
            Tensor mean = window_part_attn[h];
            for (std::size_t w = 1; w < windows.N; ++w) {
                const Tensor& m = window_part_attn[w * heads + h];
                for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += m[i];
            }
            const double inv = 1.0 / static_cast<double>(windows.N);
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] *= inv;
            record->part_attention[h] = std::move(mean);
        }
    }

    Value h = g.reshape(z, {1, windows.N * cfg_.embedder.K});
    h = g.relu(head1_.apply(g, h));
    h = g.relu(head2_.apply(g, h));
    return g.sigmoid(head3_.apply(g, h));
}

ScorePrediction predict_score(const ScorerModel& model, const SkeletalSequence& x) {
    ScorePrediction out;
    Graph g;
    const Value score = model.forward(g, x, &out.attention);
    out.score = g.value(score).item();
    return out;
}

namespace {

nlohmann::json partition_to_json(const BodyPartition& b) {
    return nlohmann::json{{"names", b.names}, {"parts", b.parts}};
}

BodyPartition partition_from_json(const nlohmann::json& j) {
    BodyPartition b;
    b.names = j.at("names").get<std::vector<std::string>>();
    b.parts = j.at("parts").get<std::vector<std::vector<std::size_t>>>();
    return b;
}

}  // namespace

void ScorerModel::save(const std::string& path) const {
    nlohmann::json hp;
    hp["kind"] = "scorer";
    hp["T"] = cfg_.T;
    hp["blocks"] = cfg_.blocks;
    hp["heads"] = cfg_.heads;
    hp["ff_hidden"] = cfg_.ff_hidden;
    hp["head_hidden1"] = cfg_.head_hidden1;
    hp["head_hidden2"] = cfg_.head_hidden2;
    nlohmann::json e;
    e["kind"] = to_string(cfg_.embedder.kind);
    e["K"] = cfg_.embedder.K;
    e["W"] = cfg_.embedder.W;
    e["D"] = cfg_.embedder.D;
    e["hfe_attention_heads"] = cfg_.embedder.hfe_attention_heads;
    e["K_part"] = cfg_.embedder.K_part;
    e["mlp_hidden1"] = cfg_.embedder.mlp_hidden1;
    e["mlp_hidden2"] = cfg_.embedder.mlp_hidden2;
    e["cnn_channels1"] = cfg_.embedder.cnn_channels1;
    e["cnn_kernel1"] = cfg_.embedder.cnn_kernel1;
    e["cnn_channels2"] = cfg_.embedder.cnn_channels2;
    e["cnn_kernel2"] = cfg_.embedder.cnn_kernel2;
    e["part_channels"] = cfg_.embedder.part_channels;
    e["part_kernel"] = cfg_.embedder.part_kernel;
    if (cfg_.embedder.kind == EmbedderKind::kHfe ||
        cfg_.embedder.kind == EmbedderKind::kHfeA) {
        e["body_parts"] = partition_to_json(cfg_.embedder.body_parts);
    }
    hp["embedder"] = std::move(e);
    numcore::ParameterSet snapshot = params_.clone_values();
    snapshot.add("input_mean", input_mean_);
    snapshot.add("input_std", input_std_);
    numcore::save_checkpoint(path, snapshot, hp.dump());
}

ScorerModel ScorerModel::load(const std::string& path) {
    const numcore::Checkpoint ckpt = numcore::load_checkpoint(path);
    nlohmann::json hp;
    try {
        hp = nlohmann::json::parse(ckpt.hyperparams_json);
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError("scorer checkpoint " + path + ": bad hyperparams: " + ex.what());
    }
    if (hp.value("kind", "") != std::string("scorer")) {
        throw ParseError("checkpoint " + path + " is not a scorer");
    }
    ScorerConfig cfg;
    try {
        cfg.T = hp.at("T").get<std::size_t>();
        cfg.blocks = hp.at("blocks").get<std::size_t>();
        cfg.heads = hp.at("heads").get<std::size_t>();
        cfg.ff_hidden = hp.at("ff_hidden").get<std::size_t>();
        cfg.head_hidden1 = hp.at("head_hidden1").get<std::size_t>();
        cfg.head_hidden2 = hp.at("head_hidden2").get<std::size_t>();
        const nlohmann::json& e = hp.at("embedder");
        cfg.embedder.kind = embedder_kind_from_string(e.at("kind").get<std::string>());
        cfg.embedder.K = e.at("K").get<std::size_t>();
        cfg.embedder.W = e.at("W").get<std::size_t>();
        cfg.embedder.D = e.at("D").get<std::size_t>();
        cfg.embedder.hfe_attention_heads = e.at("hfe_attention_heads").get<std::size_t>();
        cfg.embedder.K_part = e.at("K_part").get<std::size_t>();
        cfg.embedder.mlp_hidden1 = e.at("mlp_hidden1").get<std::size_t>();
        cfg.embedder.mlp_hidden2 = e.at("mlp_hidden2").get<std::size_t>();
        cfg.embedder.cnn_channels1 = e.at("cnn_channels1").get<std::size_t>();
        cfg.embedder.cnn_kernel1 = e.at("cnn_kernel1").get<std::size_t>();
        cfg.embedder.cnn_channels2 = e.at("cnn_channels2").get<std::size_t>();
        cfg.embedder.cnn_kernel2 = e.at("cnn_kernel2").get<std::size_t>();
        cfg.embedder.part_channels = e.at("part_channels").get<std::size_t>();
        cfg.embedder.part_kernel = e.at("part_kernel").get<std::size_t>();
        if (e.contains("body_parts")) {
            cfg.embedder.body_parts = partition_from_json(e.at("body_parts"));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError("scorer checkpoint " + path + ": bad hyperparams: " + ex.what());
    }
    ScorerModel model(cfg, 0);
    const Tensor* mean = ckpt.find("input_mean");
    const Tensor* stddev = ckpt.find("input_std");
    if (mean == nullptr || stddev == nullptr) {
        throw ParseError("checkpoint " + path + " lacks standardization tensors");
    }
    model.set_standardization(*mean, *stddev);
    numcore::Checkpoint weights;
    weights.hyperparams_json = ckpt.hyperparams_json;
    for (const auto& [name, tensor] : ckpt.params) {
        if (name != "input_mean" && name != "input_std") {
            weights.params.emplace_back(name, tensor);
        }
    }
    numcore::restore_parameters(model.params_, weights);
    return model;
}

namespace {

void write_matrix_csv(const std::string& path, const Tensor& m,
                      const std::vector<std::string>& labels) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("write_attention_csvs: cannot open " + path);
    os << "row,col,weight\n";
    char buf[32];
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.9f", m.at(r, c));
            os << labels[r] << ',' << labels[c] << ',' << buf << '\n';
        }
    }
    if (!os) throw IoError("write_attention_csvs: write failed: " + path);
}

}  // namespace

std::vector<std::string> write_attention_csvs(const std::string& prefix,
                                              const AttentionRecord& record,
                                              const std::vector<std::string>& part_names) {
    std::vector<std::string> paths;
    for (std::size_t layer = 0; layer < record.encoder.size(); ++layer) {
        for (std::size_t head = 0; head < record.encoder[layer].size(); ++head) {
            const Tensor& m = record.encoder[layer][head];
            std::vector<std::string> labels;
            labels.reserve(m.rows());
            for (std::size_t i = 0; i < m.rows(); ++i) {
                labels.push_back("w" + std::to_string(i));
            }
            const std::string path = prefix + "_encoder_l" + std::to_string(layer) +
                                     "_h" + std::to_string(head) + ".csv";
            write_matrix_csv(path, m, labels);
            paths.push_back(path);
        }
    }
    for (std::size_t head = 0; head < record.part_attention.size(); ++head) {
        const Tensor& m = record.part_attention[head];
        std::vector<std::string> labels;
        if (part_names.size() == m.rows()) {
            labels = part_names;
        } else {
            for (std::size_t i = 0; i < m.rows(); ++i) {
                labels.push_back("part" + std::to_string(i));
            }
        }
        const std::string path = prefix + "_parts_h" + std::to_string(head) + ".csv";
        write_matrix_csv(path, m, labels);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace mqa::mqaformer
