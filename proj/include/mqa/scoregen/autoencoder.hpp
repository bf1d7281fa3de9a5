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

#include "mqa/augment/augment.hpp"
#include "mqa/numcore/graph.hpp"
#include "mqa/numcore/nn.hpp"
#include "mqa/numcore/params.hpp"
#include "mqa/skeldata/sequence.hpp"

namespace mqa::scoregen {

struct AutoencoderConfig {
    std::size_t T = 240;  // canonical frames per sequence
    std::size_t D = 0;    // features per frame
    std::size_t L = 8;    // latent dimension
    std::size_t hidden1 = 256;
    std::size_t hidden2 = 64;
    double lambda = 1e-4;  // L1 weight on encoder weight matrices

    std::size_t input_dim() const { return T * D; }
};

/// Dense autoencoder over flattened T*D sequences: encoder
/// input -> hidden1 -> hidden2 -> L, decoder mirrored. Inputs are
/// standardized per feature with statistics frozen from the training set.
/// Move-only: layers hold pointers into the owned parameter set.
class Autoencoder {
public:
    Autoencoder(AutoencoderConfig cfg, std::uint64_t seed);
    Autoencoder(const Autoencoder&) = delete;
    Autoencoder& operator=(const Autoencoder&) = delete;
    Autoencoder(Autoencoder&&) = default;
    Autoencoder& operator=(Autoencoder&&) = default;

    const AutoencoderConfig& config() const { return cfg_; }
    numcore::ParameterSet& params() { return params_; }
    const numcore::ParameterSet& params() const { return params_; }

    /// Per-feature statistics (length T*D). Zero-variance features get
    /// standard deviation 1 so standardization stays finite.
    void set_standardization(numcore::Tensor mean, numcore::Tensor stddev);
    const numcore::Tensor& feature_mean() const { return feat_mean_; }
    const numcore::Tensor& feature_std() const { return feat_std_; }

    /// (x - mean) / std per column of an R-by-(T*D) batch.
    numcore::Tensor standardize(const numcore::Tensor& flat_batch) const;

    /// Graph builders over standardized batches.
    numcore::Value encode(numcore::Graph& g, numcore::Value x_std) const;
    numcore::Value decode(numcore::Graph& g, numcore::Value z) const;

    /// Sum of |w| over encoder weight matrices (biases excluded).
    numcore::Value encoder_l1(numcore::Graph& g) const;

    /// Flattens a sequence (frame count must equal the configured T),
    /// standardizes, runs the encoder; returns the length-L latent code.
    numcore::Tensor encode_sequence(const skeldata::SkeletalSequence& x) const;

    /// Mean squared reconstruction error of a standardized batch against a
    /// standardized target batch (forward only).
    double reconstruction_error(const numcore::Tensor& input_flat,
                                const numcore::Tensor& target_flat) const;

    void save(const std::string& path) const;
    static Autoencoder load(const std::string& path);

private:
    AutoencoderConfig cfg_;
    numcore::ParameterSet params_;
    numcore::DenseLayer enc1_, enc2_, enc3_;
    numcore::DenseLayer dec1_, dec2_, dec3_;
    numcore::Tensor feat_mean_;
    numcore::Tensor feat_std_;
};

/// Spec-level alias: the latent code of one repetition.
numcore::Tensor encode_latent(const Autoencoder& ae, const skeldata::SkeletalSequence& x);

struct AutoencoderTraining {
    Autoencoder model;
    std::vector<double> loss_history;  // per-epoch mean batch loss
};

/// Trains reconstruction of clean batches from augmented ones:
/// loss = MSE(decode(encode(augmented)), clean) + lambda * L1(encoder W).
/// Every batch is augmented via augment_batch; a pace spec with factor 1
/// makes the policy an identity. Sequences must all have cfg.T frames.
AutoencoderTraining train_denoising_autoencoder(
    const std::vector<skeldata::SkeletalSequence>& data,
    const std::vector<augment::AugmentationSpec>& policy, AutoencoderConfig cfg,
    std::size_t epochs, std::uint64_t seed, std::size_t batch_size = 8,
    double lr = 0.0005);

}  // namespace mqa::scoregen
