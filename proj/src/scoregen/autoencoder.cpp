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

#include "mqa/scoregen/autoencoder.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "mqa/errors.hpp"
#include "mqa/numcore/adam.hpp"
#include "mqa/numcore/checkpoint.hpp"
#include "mqa/numcore/rng.hpp"

namespace mqa::scoregen {

using numcore::Graph;
using numcore::Tensor;
using numcore::Value;
using skeldata::SkeletalSequence;

Autoencoder::Autoencoder(AutoencoderConfig cfg, std::uint64_t seed) : cfg_(cfg) {
    if (cfg_.D == 0 || cfg_.T == 0) {
        throw ConfigError("autoencoder: T and D must be positive");
    }
    if (cfg_.L == 0) throw ConfigError("autoencoder: latent dimension must be positive");
    numcore::Rng rng(seed);
    const std::size_t in = cfg_.input_dim();
    using numcore::DenseLayer;
    using numcore::Init;
    enc1_ = DenseLayer::create(params_, "enc1", in, cfg_.hidden1, Init::kHe, rng);
    enc2_ = DenseLayer::create(params_, "enc2", cfg_.hidden1, cfg_.hidden2, Init::kHe, rng);
    enc3_ = DenseLayer::create(params_, "enc3", cfg_.hidden2, cfg_.L, Init::kXavier, rng);
    dec1_ = DenseLayer::create(params_, "dec1", cfg_.L, cfg_.hidden2, Init::kHe, rng);
    dec2_ = DenseLayer::create(params_, "dec2", cfg_.hidden2, cfg_.hidden1, Init::kHe, rng);
    dec3_ = DenseLayer::create(params_, "dec3", cfg_.hidden1, in, Init::kXavier, rng);
    feat_mean_ = Tensor({in}, 0.0);
    feat_std_ = Tensor({in}, 1.0);
}

void Autoencoder::set_standardization(Tensor mean, Tensor stddev) {
    if (mean.size() != cfg_.input_dim() || stddev.size() != cfg_.input_dim()) {
        throw DimensionError("autoencoder: standardization length must be T*D");
    }
    for (double& s : stddev.data()) {
        if (s < 1e-12) s = 1.0;
    }
    feat_mean_ = std::move(mean);
    feat_std_ = std::move(stddev);
}

Tensor Autoencoder::standardize(const Tensor& flat_batch) const {
    if (flat_batch.ndim() != 2 || flat_batch.cols() != cfg_.input_dim()) {
        throw DimensionError("autoencoder: batch must be R-by-" +
                             std::to_string(cfg_.input_dim()) + ", got " +
                             shape_string(flat_batch));
    }
    Tensor out = flat_batch;
    const std::size_t d = cfg_.input_dim();
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            out.at(r, c) = (out.at(r, c) - feat_mean_[c]) / feat_std_[c];
        }
    }
    return out;
}

Value Autoencoder::encode(Graph& g, Value x_std) const {
    Value h = g.relu(enc1_.apply(g, x_std));
    h = g.relu(enc2_.apply(g, h));
    return enc3_.apply(g, h);
}

Value Autoencoder::decode(Graph& g, Value z) const {
    Value h = g.relu(dec1_.apply(g, z));
    h = g.relu(dec2_.apply(g, h));
    return dec3_.apply(g, h);
}

Value Autoencoder::encoder_l1(Graph& g) const {
    Value total = g.l1_norm(g.param(enc1_.W));
    total = g.add(total, g.l1_norm(g.param(enc2_.W)));
    return g.add(total, g.l1_norm(g.param(enc3_.W)));
}

Tensor Autoencoder::encode_sequence(const SkeletalSequence& x) const {
    if (x.frame_count() != cfg_.T || x.feature_count() != cfg_.D) {
        throw DimensionError("autoencoder: sequence " + x.id + " is " +
                             shape_string(x.frames) + ", model expects " +
                             std::to_string(cfg_.T) + "x" + std::to_string(cfg_.D));
    }
    const Tensor flat = x.frames.reshaped({1, cfg_.input_dim()});
    Graph g;
    Value z = encode(g, g.constant(standardize(flat)));
    return g.value(z).reshaped({cfg_.L});
}

double Autoencoder::reconstruction_error(const Tensor& input_flat,
                                         const Tensor& target_flat) const {
    Graph g;
    Value recon = decode(g, encode(g, g.constant(standardize(input_flat))));
    Value loss = g.mse_loss(recon, g.constant(standardize(target_flat)));
    return g.value(loss).item();
}

void Autoencoder::save(const std::string& path) const {
    nlohmann::json hp;
    hp["kind"] = "autoencoder";
    hp["T"] = cfg_.T;
    hp["D"] = cfg_.D;
    hp["L"] = cfg_.L;
    hp["hidden1"] = cfg_.hidden1;
    hp["hidden2"] = cfg_.hidden2;
    hp["lambda"] = cfg_.lambda;
    numcore::ParameterSet snapshot = params_.clone_values();
    snapshot.add("feat_mean", feat_mean_);
    snapshot.add("feat_std", feat_std_);
    numcore::save_checkpoint(path, snapshot, hp.dump());
}

Autoencoder Autoencoder::load(const std::string& path) {
    const numcore::Checkpoint ck = numcore::load_checkpoint(path);
    nlohmann::json hp;
    try {
        hp = nlohmann::json::parse(ck.hyperparams_json);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("autoencoder checkpoint " + path + ": bad hyperparams: " + e.what());
    }
    if (hp.value("kind", "") != std::string("autoencoder")) {
        throw ParseError("checkpoint " + path + " is not an autoencoder");
    }
    AutoencoderConfig cfg;
    cfg.T = hp.at("T").get<std::size_t>();
    cfg.D = hp.at("D").get<std::size_t>();
    cfg.L = hp.at("L").get<std::size_t>();
    cfg.hidden1 = hp.at("hidden1").get<std::size_t>();
    cfg.hidden2 = hp.at("hidden2").get<std::size_t>();
    cfg.lambda = hp.at("lambda").get<double>();

    Autoencoder ae(cfg, 0);
    const Tensor* mean = ck.find("feat_mean");
    const Tensor* stddev = ck.find("feat_std");
    if (mean == nullptr || stddev == nullptr) {
        throw ParseError("checkpoint " + path + " lacks standardization tensors");
    }
    ae.set_standardization(*mean, *stddev);
    numcore::Checkpoint weights;
    weights.hyperparams_json = ck.hyperparams_json;
    for (const auto& [name, tensor] : ck.params) {
        if (name != "feat_mean" && name != "feat_std") weights.params.emplace_back(name, tensor);
    }
    numcore::restore_parameters(ae.params_, weights);
    return ae;
}

numcore::Tensor encode_latent(const Autoencoder& ae, const SkeletalSequence& x) {
    return ae.encode_sequence(x);
}

namespace {

Tensor flatten_sequences(const std::vector<SkeletalSequence>& seqs,
                         const AutoencoderConfig& cfg) {
    Tensor out({seqs.size(), cfg.input_dim()}, 0.0);
    for (std::size_t r = 0; r < seqs.size(); ++r) {
        const double* src = seqs[r].frames.data().data();
        std::copy(src, src + cfg.input_dim(), out.data().data() + r * cfg.input_dim());
    }
    return out;
}

}  // namespace

AutoencoderTraining train_denoising_autoencoder(
    const std::vector<SkeletalSequence>& data,
    const std::vector<augment::AugmentationSpec>& policy, AutoencoderConfig cfg,
    std::size_t epochs, std::uint64_t seed, std::size_t batch_size, double lr) {
    if (data.empty()) throw TrainingError("train_denoising_autoencoder: no data");
    if (cfg.lambda < 0.0) throw ConfigError("train_denoising_autoencoder: lambda < 0");
    if (batch_size == 0) throw ConfigError("train_denoising_autoencoder: batch_size 0");
    for (const SkeletalSequence& s : data) {
        if (s.frame_count() != cfg.T || s.feature_count() != cfg.D) {
            throw DimensionError("train_denoising_autoencoder: sequence " + s.id + " is " +
                                 shape_string(s.frames) + ", expected " +
                                 std::to_string(cfg.T) + "x" + std::to_string(cfg.D));
        }
    }

    AutoencoderTraining result{Autoencoder(cfg, numcore::derive_seed(seed, 0)), {}};
    Autoencoder& ae = result.model;

    // Standardization statistics from the clean training data, frozen before
    // the first update.
    {
        const std::size_t din = cfg.input_dim();
        Tensor mean({din}, 0.0);
        Tensor stddev({din}, 0.0);
        for (const SkeletalSequence& s : data) {
            const double* src = s.frames.data().data();
            for (std::size_t c = 0; c < din; ++c) mean[c] += src[c];
        }
        for (std::size_t c = 0; c < din; ++c) mean[c] /= static_cast<double>(data.size());
        for (const SkeletalSequence& s : data) {
            const double* src = s.frames.data().data();
            for (std::size_t c = 0; c < din; ++c) {
                const double d = src[c] - mean[c];
                stddev[c] += d * d;
            }
        }
        for (std::size_t c = 0; c < din; ++c) {
            stddev[c] = std::sqrt(stddev[c] / static_cast<double>(data.size()));
        }
        ae.set_standardization(std::move(mean), std::move(stddev));
    }

    numcore::AdamConfig adam_cfg;
    adam_cfg.lr = lr;
    numcore::AdamState adam(adam_cfg);

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    numcore::Rng shuffler(numcore::derive_seed(seed, 1));
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffler.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < data.size(); begin += batch_size) {
            const std::size_t end = std::min(begin + batch_size, data.size());
            std::vector<SkeletalSequence> clean;
            clean.reserve(end - begin);
            for (std::size_t r = begin; r < end; ++r) clean.push_back(data[order[r]]);
            const std::uint64_t batch_seed =
                numcore::derive_seed(seed, 1000003ULL * (epoch + 1) + begin);
            const std::vector<SkeletalSequence> augmented =
                augment::augment_batch(clean, policy, batch_seed);

            const Tensor clean_flat = flatten_sequences(clean, cfg);
            const Tensor aug_flat = flatten_sequences(augmented, cfg);

            ae.params().zero_grads();
            Graph g;
            Value recon = ae.decode(g, ae.encode(g, g.constant(ae.standardize(aug_flat))));
            Value loss = g.mse_loss(recon, g.constant(ae.standardize(clean_flat)));
            if (cfg.lambda > 0.0) {
                loss = g.add(loss, g.scale(ae.encoder_l1(g), cfg.lambda));
            }
            epoch_loss += g.value(loss).item();
            ++batches;
            g.backward(loss);
            adam.step(ae.params());
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(batches));
    }
    return result;
}

}  // namespace mqa::scoregen
