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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mqa/errors.hpp"
#include "mqa/numcore/rng.hpp"
#include "mqa/scoregen/autoencoder.hpp"
#include "mqa/scoregen/gmm.hpp"
#include "mqa/scoregen/scoring.hpp"
#include "support/tempdir.hpp"

using namespace mqa;
using namespace mqa::scoregen;
using mqa::numcore::Tensor;
using mqa::skeldata::SkeletalSequence;
using mqa::testing::TempDir;

namespace {

constexpr double kPi = 3.14159265358979323846;

SkeletalSequence smooth_sequence(std::size_t T, std::size_t M, std::uint64_t seed,
                                 const std::string& id = "seq") {
    numcore::Rng rng(seed);
    SkeletalSequence s;
    s.id = id;
    s.joint_count = M;
    s.frames = Tensor({T, 3 * M}, 0.0);
    for (std::size_t d = 0; d < 3 * M; ++d) {
        const double amp = rng.uniform(0.5, 2.0);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double offset = rng.uniform(-1.0, 1.0);
        for (std::size_t t = 0; t < T; ++t) {
            s.frames.at(t, d) = offset + amp * std::sin(0.7 * static_cast<double>(t) + phase);
        }
    }
    return s;
}

Tensor cluster_latents(const std::vector<std::pair<double, double>>& centers,
                       std::size_t per_center, std::uint64_t seed) {
    numcore::Rng rng(seed);
    Tensor out({centers.size() * per_center, 2}, 0.0);
    std::size_t r = 0;
    for (const auto& [cx, cy] : centers) {
        for (std::size_t i = 0; i < per_center; ++i, ++r) {
            out.at(r, 0) = cx + rng.normal();
            out.at(r, 1) = cy + rng.normal();
        }
    }
    return out;
}

ExerciseModel standard_normal_model(std::size_t L) {
    ExerciseModel m;
    m.components = 1;
    m.latent_dim = L;
    m.weights = {1.0};
    m.means.push_back(Tensor({L}, 0.0));
    Tensor cov({L, L}, 0.0);
    for (std::size_t i = 0; i < L; ++i) cov.at(i, i) = 1.0;
    m.covariances.push_back(std::move(cov));
    m.loglik_trace.push_back(0.0);
    m.finalize();
    return m;
}

}  // namespace

TEST_CASE("calibration: mean 1, sample std 1 gives delta 4 and alpha ln19/3") {
    const ScoringCalibration cal = calibrate_scoring({0.0, 1.0, 2.0});
    CHECK(std::abs(cal.delta - 4.0) < 1e-12);
    CHECK(std::abs(cal.alpha - std::log(19.0) / 3.0) < 1e-12);

    // The anchors of the map: the mean metric scores 0.95, delta scores 0.5.
    CHECK(std::abs(score_from_metric(cal, 1.0) - 0.95) < 1e-9);
    CHECK(std::abs(score_from_metric(cal, 4.0) - 0.5) < 1e-12);

    CHECK_THROWS_AS(calibrate_scoring({1.0}), CalibrationError);
    CHECK_THROWS_AS(calibrate_scoring({2.0, 2.0, 2.0}), CalibrationError);
}

TEST_CASE("score_from_metric: logistic values and strict monotonicity") {
    ScoringCalibration cal;
    cal.alpha = 1.0;
    cal.delta = 0.0;
    CHECK(std::abs(score_from_metric(cal, std::log(3.0)) - 0.25) < 1e-12);
    CHECK(std::abs(score_from_metric(cal, 0.0) - 0.5) < 1e-12);

    double prev = 1.0;
    for (double d = -30.0; d <= 30.0; d += 0.5) {
        const double s = score_from_metric(cal, d);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
        CHECK(s < prev);
        prev = s;
    }
    // Symmetry about delta.
    for (double x : {0.1, 1.0, 7.5}) {
        CHECK(std::abs(score_from_metric(cal, -x) + score_from_metric(cal, x) - 1.0) <
              1e-12);
    }
    // Extreme metrics saturate without producing NaN.
    CHECK(score_from_metric(cal, 1e9) == 0.0);
    CHECK(score_from_metric(cal, -1e9) == 1.0);

    ScoringCalibration bad;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(score_from_metric(bad, 1.0), CalibrationError);
}

TEST_CASE("separation degree: plug-in value, invariances, edge cases") {
    CHECK(separation_degree({2.0, 2.0}, {2.0, 2.0}) == 0.0);

    // Min-shifted means are 1 and 3: (3 - 1) / (3 + 1).
    CHECK(std::abs(separation_degree({0.0, 2.0}, {3.0, 3.0}) - 0.5) < 1e-12);

    const std::vector<double> cor = {0.3, 0.9, 0.4, 0.7};
    const std::vector<double> inc = {1.9, 2.4, 3.0, 2.2};
    const double base = separation_degree(cor, inc);
    CHECK(base > 0.0);

    auto shifted = [](std::vector<double> v, double by) {
        for (double& d : v) d += by;
        return v;
    };
    auto scaled = [](std::vector<double> v, double by) {
        for (double& d : v) d *= by;
        return v;
    };
    CHECK(std::abs(separation_degree(shifted(cor, 17.5), shifted(inc, 17.5)) - base) <
          1e-12);
    CHECK(std::abs(separation_degree(scaled(cor, 3.25), scaled(inc, 3.25)) - base) <
          1e-12);

    // Worse correct repetitions flip the sign.
    CHECK(separation_degree(inc, cor) == -base);

    CHECK_THROWS_AS(separation_degree({}, {1.0}), DataError);
    CHECK_THROWS_AS(separation_degree({1.0}, {}), DataError);
}

TEST_CASE("gmm: single component recovers sample mean and covariance") {
    numcore::Rng rng(11);
    const std::size_t n = 300;
    Tensor latents({n, 2}, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        const double b = rng.normal();
        latents.at(i, 0) = 1.5 + 2.0 * a;
        latents.at(i, 1) = -0.5 + 0.8 * a + 0.6 * b;
    }

    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m0 += latents.at(i, 0);
        m1 += latents.at(i, 1);
    }
    m0 /= n;
    m1 /= n;
    double c00 = 0.0, c01 = 0.0, c11 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d0 = latents.at(i, 0) - m0;
        const double d1 = latents.at(i, 1) - m1;
        c00 += d0 * d0;
        c01 += d0 * d1;
        c11 += d1 * d1;
    }
    c00 /= n;
    c01 /= n;
    c11 /= n;

    const ExerciseModel model = fit_gmm_em(latents, 1, 5);
    REQUIRE(model.components == 1);
    CHECK(model.weights[0] == 1.0);
    CHECK(std::abs(model.means[0][0] - m0) < 1e-9);
    CHECK(std::abs(model.means[0][1] - m1) < 1e-9);
    CHECK(std::abs(model.covariances[0].at(0, 0) - (c00 + kCovarianceFloor)) < 1e-9);
    CHECK(std::abs(model.covariances[0].at(0, 1) - c01) < 1e-9);
    CHECK(std::abs(model.covariances[0].at(1, 1) - (c11 + kCovarianceFloor)) < 1e-9);
}

TEST_CASE("gmm: two well-separated components are recovered") {
    const Tensor latents = cluster_latents({{-5.0, -5.0}, {5.0, 5.0}}, 100, 14);
    ExerciseModel model = fit_gmm_em(latents, 2, 3);
    REQUIRE(model.components == 2);

    std::size_t lo = model.means[0][0] < model.means[1][0] ? 0 : 1;
    std::size_t hi = 1 - lo;
    CHECK(std::abs(model.means[lo][0] - (-5.0)) < 0.2);
    CHECK(std::abs(model.means[lo][1] - (-5.0)) < 0.2);
    CHECK(std::abs(model.means[hi][0] - 5.0) < 0.2);
    CHECK(std::abs(model.means[hi][1] - 5.0) < 0.2);
    CHECK(std::abs(model.weights[0] - 0.5) < 0.05);
    CHECK(std::abs(model.weights[1] - 0.5) < 0.05);
}

TEST_CASE("gmm: EM log-likelihood trace never decreases") {
    const Tensor latents = cluster_latents({{-2.0, 0.0}, {1.0, 1.5}, {0.0, -2.5}}, 40, 31);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ExerciseModel model = fit_gmm_em(latents, 3, seed);
        REQUIRE(model.loglik_trace.size() >= 2);
        for (std::size_t i = 1; i < model.loglik_trace.size(); ++i) {
            const double slack = 1e-8 * (1.0 + std::abs(model.loglik_trace[i - 1]));
            CHECK(model.loglik_trace[i] >= model.loglik_trace[i - 1] - slack);
        }
    }
}

TEST_CASE("gmm: too few samples is a fit error") {
    Tensor latents({5, 2}, 0.5);
    // C=2, L=2 needs at least 2*(2+1) = 6 rows.
    CHECK_THROWS_AS(fit_gmm_em(latents, 2, 1), FitError);
    Tensor two({2, 2}, 0.5);
    CHECK_THROWS_AS(fit_gmm_bic(two, 3, 1), FitError);
}

TEST_CASE("metric of a standard normal at its mean is half ln(2 pi)") {
    const ExerciseModel model = standard_normal_model(1);
    const Tensor z({1}, 0.0);
    CHECK(std::abs(performance_metric(model, z) - 0.5 * std::log(2.0 * kPi)) < 1e-9);
    // One dimension away from the mean adds z^2/2 to the metric.
    const Tensor z2 = Tensor::from_data({1}, {2.0});
    CHECK(std::abs(performance_metric(model, z2) -
                   (0.5 * std::log(2.0 * kPi) + 2.0)) < 1e-9);
}

TEST_CASE("log-likelihood matches a naive density evaluation") {
    ExerciseModel model;
    model.components = 2;
    model.latent_dim = 2;
    model.weights = {0.3, 0.7};
    model.means.push_back(Tensor::from_data({2}, {0.0, 0.0}));
    model.means.push_back(Tensor::from_data({2}, {1.0, 2.0}));
    model.covariances.push_back(Tensor::from_data({2, 2}, {1.0, 0.3, 0.3, 2.0}));
    model.covariances.push_back(Tensor::from_data({2, 2}, {0.5, 0.0, 0.0, 0.5}));
    model.loglik_trace.push_back(0.0);
    model.finalize();

    auto naive = [&](double x0, double x1) {
        double total = 0.0;
        for (std::size_t c = 0; c < 2; ++c) {
            const Tensor& cov = model.covariances[c];
            const double a = cov.at(0, 0), b = cov.at(0, 1), d = cov.at(1, 1);
            const double det = a * d - b * b;
            const double d0 = x0 - model.means[c][0];
            const double d1 = x1 - model.means[c][1];
            const double maha = (d * d0 * d0 - 2.0 * b * d0 * d1 + a * d1 * d1) / det;
            total += model.weights[c] / (2.0 * kPi * std::sqrt(det)) *
                     std::exp(-0.5 * maha);
        }
        return std::log(total);
    };

    for (auto [x0, x1] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {1.0, 2.0}, {-1.5, 0.75}, {3.0, -2.0}}) {
        const Tensor z = Tensor::from_data({2}, {x0, x1});
        CHECK(std::abs(gmm_log_likelihood(model, z) - naive(x0, x1)) < 1e-9);
    }

    const Tensor wrong({3}, 0.0);
    CHECK_THROWS_AS(gmm_log_likelihood(model, wrong), DimensionError);
}

TEST_CASE("bic selects the true component count") {
    const Tensor one_cluster = cluster_latents({{0.0, 0.0}}, 120, 41);
    CHECK(fit_gmm_bic(one_cluster, 3, 7).components == 1);

    const Tensor two_clusters = cluster_latents({{-6.0, 0.0}, {6.0, 0.0}}, 100, 43);
    CHECK(fit_gmm_bic(two_clusters, 4, 7).components == 2);
}

TEST_CASE("bic skips component counts that degenerate numerically") {
    // One near-collapsed blob: with two components the covariance floor can
    // break EM monotonicity, which fit_gmm_em reports as a NumericalError.
    // Selection must treat that candidate as unusable, not fatal.
    numcore::Rng rng(3);
    Tensor blob({8, 3}, 0.0);
    for (std::size_t i = 0; i < blob.rows(); ++i) {
        for (std::size_t j = 0; j < blob.cols(); ++j) {
            blob.at(i, j) = rng.normal(0.0, 1e-4);
        }
    }
    CHECK_THROWS_AS((void)fit_gmm_em(blob, 2, numcore::derive_seed(1, 2)),
                    NumericalError);
    CHECK(fit_gmm_bic(blob, 2, 1).components == 1);
}

TEST_CASE("bic equals its closed form on the fitted model") {
    const Tensor latents = cluster_latents({{0.0, 0.0}}, 80, 47);
    const ExerciseModel model = fit_gmm_em(latents, 2, 9);
    double ll = 0.0;
    for (std::size_t i = 0; i < latents.rows(); ++i) {
        const Tensor z = Tensor::from_data(
            {2}, {latents.at(i, 0), latents.at(i, 1)});
        ll += gmm_log_likelihood(model, z);
    }
    const double C = 2.0, L = 2.0, n = 80.0;
    const double k = (C - 1.0) + C * L + C * L * (L + 1.0) / 2.0;
    CHECK(std::abs(gmm_bic(model, latents) - (k * std::log(n) - 2.0 * ll)) < 1e-9);
}

TEST_CASE("autoencoder: a single constant sequence is memorized immediately") {
    AutoencoderConfig cfg;
    cfg.T = 6;
    cfg.D = 3;
    cfg.L = 2;
    cfg.hidden1 = 8;
    cfg.hidden2 = 4;
    cfg.lambda = 0.0;

    SkeletalSequence s;
    s.id = "const";
    s.joint_count = 1;
    s.frames = Tensor({6, 3}, 2.5);

    augment::AugmentationSpec identity;
    identity.pace_factor = 1.0;

    const AutoencoderTraining run =
        train_denoising_autoencoder({s}, {identity}, cfg, 50, 1);
    REQUIRE(run.loss_history.size() == 50);
    // Constant features standardize to zero, which the net reproduces exactly.
    CHECK(run.loss_history.back() < 1e-12);
}

TEST_CASE("autoencoder: reconstruction loss falls on a small dataset") {
    AutoencoderConfig cfg;
    cfg.T = 6;
    cfg.D = 3;
    cfg.L = 4;
    cfg.hidden1 = 16;
    cfg.hidden2 = 8;
    cfg.lambda = 0.0;

    std::vector<SkeletalSequence> data;
    for (int i = 0; i < 4; ++i) data.push_back(smooth_sequence(6, 1, 100 + i));

    augment::AugmentationSpec identity;
    identity.pace_factor = 1.0;

    const AutoencoderTraining run =
        train_denoising_autoencoder(data, {identity}, cfg, 300, 2, 4, 0.02);
    REQUIRE(run.loss_history.size() == 300);
    CHECK(run.loss_history.back() < 0.05);
    CHECK(run.loss_history.back() < run.loss_history.front());
}

TEST_CASE("autoencoder: large lambda collapses encoder weights") {
    AutoencoderConfig cfg;
    cfg.T = 6;
    cfg.D = 3;
    cfg.L = 2;
    cfg.hidden1 = 8;
    cfg.hidden2 = 4;

    std::vector<SkeletalSequence> data;
    for (int i = 0; i < 4; ++i) data.push_back(smooth_sequence(6, 1, 200 + i));

    augment::AugmentationSpec identity;
    identity.pace_factor = 1.0;

    auto encoder_weight_l1 = [](const Autoencoder& ae) {
        double total = 0.0;
        for (const numcore::Parameter& p : ae.params()) {
            if (p.name.find("enc") == 0 && p.name.find(".W") != std::string::npos) {
                for (double w : p.value.data()) total += std::abs(w);
            }
        }
        return total;
    };

    cfg.lambda = 0.0;
    const AutoencoderTraining plain =
        train_denoising_autoencoder(data, {identity}, cfg, 150, 3, 4, 0.02);
    cfg.lambda = 1000.0;
    const AutoencoderTraining shrunk =
        train_denoising_autoencoder(data, {identity}, cfg, 150, 3, 4, 0.02);

    CHECK(encoder_weight_l1(shrunk.model) < 0.05 * encoder_weight_l1(plain.model));
    // With a dead encoder the reconstruction cannot beat the input variance.
    CHECK(shrunk.loss_history.back() > 0.5);
}

TEST_CASE("autoencoder: denoising training beats clean training on masked input") {
    AutoencoderConfig cfg;
    cfg.T = 8;
    cfg.D = 3;
    cfg.L = 4;
    cfg.hidden1 = 16;
    cfg.hidden2 = 8;
    cfg.lambda = 0.0;

    std::vector<SkeletalSequence> data;
    for (int i = 0; i < 12; ++i) data.push_back(smooth_sequence(8, 1, 300 + i));

    augment::AugmentationSpec identity;
    identity.pace_factor = 1.0;
    augment::AugmentationSpec masking;
    masking.kind = augment::AugmentKind::kMasking;
    masking.h = 2;
    masking.p = 0.5;

    const AutoencoderTraining denoising =
        train_denoising_autoencoder(data, {masking}, cfg, 250, 4, 4, 0.01);
    const AutoencoderTraining clean_only =
        train_denoising_autoencoder(data, {identity}, cfg, 250, 4, 4, 0.01);

    // The same held-out corruption for both models.
    Tensor clean_flat({data.size(), cfg.input_dim()}, 0.0);
    Tensor masked_flat({data.size(), cfg.input_dim()}, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const SkeletalSequence masked =
            augment::augment_masking(data[i], 2, 0.5, 9000 + i);
        for (std::size_t c = 0; c < cfg.input_dim(); ++c) {
            clean_flat.at(i, c) = data[i].frames.data()[c];
            masked_flat.at(i, c) = masked.frames.data()[c];
        }
    }

    const double err_denoising =
        denoising.model.reconstruction_error(masked_flat, clean_flat);
    const double err_clean = clean_only.model.reconstruction_error(masked_flat, clean_flat);
    CHECK(err_denoising < err_clean);
}

TEST_CASE("encode_latent: deterministic, right length, shape checked") {
    AutoencoderConfig cfg;
    cfg.T = 6;
    cfg.D = 3;
    cfg.L = 5;
    cfg.hidden1 = 8;
    cfg.hidden2 = 4;
    Autoencoder ae(cfg, 77);
    ae.set_standardization(Tensor({18}, 0.0), Tensor({18}, 1.0));

    const SkeletalSequence s = smooth_sequence(6, 1, 400);
    const Tensor z1 = encode_latent(ae, s);
    const Tensor z2 = encode_latent(ae, s);
    REQUIRE(z1.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(z1[i] == z2[i]);

    const SkeletalSequence wrong = smooth_sequence(7, 1, 401);
    CHECK_THROWS_AS(encode_latent(ae, wrong), DimensionError);
}

TEST_CASE("autoencoder: save and load round-trips latents bitwise") {
    TempDir dir("ae_io");
    AutoencoderConfig cfg;
    cfg.T = 6;
    cfg.D = 3;
    cfg.L = 3;
    cfg.hidden1 = 8;
    cfg.hidden2 = 4;
    cfg.lambda = 0.25;
    Autoencoder ae(cfg, 88);
    numcore::Rng rng(5);
    Tensor mean({18}, 0.0);
    Tensor stddev({18}, 0.0);
    for (std::size_t i = 0; i < 18; ++i) {
        mean[i] = rng.normal();
        stddev[i] = rng.uniform(0.5, 2.0);
    }
    ae.set_standardization(mean, stddev);

    const std::string path = dir.file("ae.ckpt");
    ae.save(path);
    const Autoencoder back = Autoencoder::load(path);
    CHECK(back.config().T == cfg.T);
    CHECK(back.config().L == cfg.L);
    CHECK(back.config().lambda == cfg.lambda);

    const SkeletalSequence s = smooth_sequence(6, 1, 500);
    const Tensor z1 = encode_latent(ae, s);
    const Tensor z2 = encode_latent(back, s);
    for (std::size_t i = 0; i < z1.size(); ++i) CHECK(z1[i] == z2[i]);

    CHECK_THROWS_AS(Autoencoder::load(dir.file("missing.ckpt")), IoError);
}

TEST_CASE("generate_labels: deterministic scores with id context on failure") {
    AutoencoderConfig cfg;
    cfg.T = 6;
    cfg.D = 3;
    cfg.L = 2;
    cfg.hidden1 = 8;
    cfg.hidden2 = 4;
    Autoencoder ae(cfg, 99);
    ae.set_standardization(Tensor({18}, 0.0), Tensor({18}, 1.0));
    const ExerciseModel model = standard_normal_model(2);
    ScoringCalibration cal;
    cal.alpha = 1.0;
    cal.delta = 1.0;

    std::vector<SkeletalSequence> xs;
    for (int i = 0; i < 3; ++i) {
        xs.push_back(smooth_sequence(6, 1, 600 + i, "rep" + std::to_string(i)));
    }
    const std::vector<LabeledScore> a = generate_labels(ae, model, cal, xs);
    const std::vector<LabeledScore> b = generate_labels(ae, model, cal, xs);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a[i].sequence_id == xs[i].id);
        CHECK(a[i].score == b[i].score);
        CHECK(a[i].score > 0.0);
        CHECK(a[i].score < 1.0);
    }

    xs.push_back(smooth_sequence(9, 1, 700, "bad_length"));
    CHECK_THROWS_WITH_AS(generate_labels(ae, model, cal, xs),
                         doctest::Contains("bad_length"), DataError);
}

TEST_CASE("label csv round-trips ids and six-decimal scores") {
    TempDir dir("labels");
    const std::vector<LabeledScore> labels = {
        {"m01_s01_e01", 0.123456789}, {"m01_s02_e01", 0.5}, {"m01_s03_e01", 1.0}};
    const std::string path = dir.file("labels.csv");
    write_label_csv(path, labels);
    const std::vector<LabeledScore> back = load_label_csv(path);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].sequence_id == labels[i].sequence_id);
        CHECK(std::abs(back[i].score - labels[i].score) < 5e-7);
    }

    std::ofstream(dir.file("bad.csv")) << "not,a,header\n";
    CHECK_THROWS_AS(load_label_csv(dir.file("bad.csv")), ParseError);
    CHECK_THROWS_AS(load_label_csv(dir.file("missing.csv")), IoError);
}

TEST_CASE("score model sidecar round-trips parameters and calibration") {
    TempDir dir("sidecar");
    const Tensor latents = cluster_latents({{-4.0, 1.0}, {4.0, -1.0}}, 60, 51);
    const ExerciseModel model = fit_gmm_em(latents, 2, 13);
    const ScoringCalibration cal = calibrate_scoring({1.0, 2.0, 3.0, 4.5});

    const std::string path = dir.file("score_model.json");
    save_score_model(path, model, cal);
    const auto [back, back_cal] = load_score_model(path);

    CHECK(back.components == 2);
    CHECK(back.latent_dim == 2);
    CHECK(back_cal.alpha == cal.alpha);
    CHECK(back_cal.delta == cal.delta);
    for (std::size_t c = 0; c < 2; ++c) {
        CHECK(back.weights[c] == model.weights[c]);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(back.means[c][i] == model.means[c][i]);
        }
    }
    // The reloaded model scores identically.
    const Tensor z = Tensor::from_data({2}, {0.25, -0.75});
    CHECK(std::abs(gmm_log_likelihood(back, z) - gmm_log_likelihood(model, z)) < 1e-12);

    std::ofstream(dir.file("other.json")) << "{\"kind\":\"something_else\"}\n";
    CHECK_THROWS_AS(load_score_model(dir.file("other.json")), ParseError);
}

TEST_CASE("training input validation") {
    AutoencoderConfig cfg;
    cfg.T = 6;
    cfg.D = 3;
    augment::AugmentationSpec identity;
    identity.pace_factor = 1.0;
    CHECK_THROWS_AS(train_denoising_autoencoder({}, {identity}, cfg, 1, 1),
                    TrainingError);

    std::vector<SkeletalSequence> data = {smooth_sequence(6, 1, 800)};
    CHECK_THROWS_AS(train_denoising_autoencoder(data, {identity}, cfg, 1, 1, 0),
                    ConfigError);
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(train_denoising_autoencoder(data, {identity}, cfg, 1, 1),
                    ConfigError);
    cfg.lambda = 0.0;
    std::vector<SkeletalSequence> wrong = {smooth_sequence(5, 1, 801)};
    CHECK_THROWS_AS(train_denoising_autoencoder(wrong, {identity}, cfg, 1, 1),
                    DimensionError);
}
