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
#include <fstream>
#include <sstream>

#include "mqa/errors.hpp"
#include "mqa/harness/synthetic.hpp"
#include "mqa/harness/train.hpp"
#include "support/tempdir.hpp"

using namespace mqa;
using namespace mqa::harness;
using mqa::testing::TempDir;

namespace {

/// Tiny MLP scorer over T=8, two joints: fast enough to train in tests.
TrainConfig tiny_train_config() {
    TrainConfig cfg;
    cfg.T = 8;
    cfg.W = 4;
    cfg.K = 8;
    cfg.heads = 2;
    cfg.blocks = 1;
    cfg.embedder.kind = mqaformer::EmbedderKind::kMlp;
    cfg.embedder.D = 6;
    cfg.embedder.mlp_hidden1 = 8;
    cfg.embedder.mlp_hidden2 = 8;
    cfg.batch_size = 4;
    cfg.lr = 0.02;
    cfg.max_epochs = 60;
    cfg.patience = 60;
    cfg.augment_training = false;
    return cfg;
}

double recomputed_val_loss(const mqaformer::ScorerModel& model,
                           const std::vector<LabeledSequence>& val) {
    double acc = 0.0;
    for (const LabeledSequence& x : val) {
        const double p = std::clamp(mqaformer::predict_score(model, x.sequence).score,
                                    1e-7, 1.0 - 1e-7);
        acc -= x.score * std::log(p) + (1.0 - x.score) * std::log(1.0 - p);
    }
    return acc / static_cast<double>(val.size());
}

std::vector<double> flat_params(const mqaformer::ScorerModel& model) {
    std::vector<double> out;
    for (const numcore::Parameter& p : model.params()) {
        out.insert(out.end(), p.value.data().begin(), p.value.data().end());
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("train config: validation and scorer wiring") {
    TrainConfig cfg = tiny_train_config();
    cfg.validate();
    const mqaformer::ScorerConfig sc = cfg.scorer_config();
    CHECK(sc.embedder.W == 4);
    CHECK(sc.embedder.K == 8);
    CHECK(sc.T == 8);
    CHECK(sc.blocks == 1);
    CHECK(sc.heads == 2);

    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_train_config();
    cfg.split_ratio = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_train_config();
    cfg.patience = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_train_config();
    cfg.runs = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_train_config();
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_train_config();
    cfg.heads = 3;  // K = 8 not divisible
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    const TrainConfig defaults;
    CHECK(defaults.lr == 0.0005);
    CHECK(defaults.patience == 100);
    CHECK(defaults.split_ratio == 0.8);
    CHECK(defaults.runs == 5);
    CHECK(defaults.max_epochs == 2000);
}

TEST_CASE("attach_labels joins by id and validates the range") {
    std::vector<LabeledSequence> made = make_overfit_dataset(3, 8, 2, 1);
    std::vector<skeldata::SkeletalSequence> seqs;
    for (const LabeledSequence& x : made) seqs.push_back(x.sequence);

    std::vector<scoregen::LabeledScore> labels = {
        {"synth_001", 0.25}, {"synth_000", 0.5}, {"synth_002", 1.0}};
    const std::vector<LabeledSequence> joined = attach_labels(seqs, labels);
    CHECK(joined[0].score == 0.5);
    CHECK(joined[1].score == 0.25);
    CHECK(joined[2].score == 1.0);

    labels.pop_back();
    CHECK_THROWS_AS(attach_labels(seqs, labels), DataError);
    labels = {{"synth_000", 1.5}, {"synth_001", 0.1}, {"synth_002", 0.1}};
    CHECK_THROWS_AS(attach_labels(seqs, labels), DataError);
}

TEST_CASE("synthetic generators: shapes, classes, determinism") {
    const std::vector<LabeledSequence> a = make_overfit_dataset(8, 10, 2, 7);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(a[i].score == ((i % 2 == 0) ? 0.1 : 0.9));
        CHECK(a[i].sequence.frame_count() == 10);
        CHECK(a[i].sequence.feature_count() == 6);
        CHECK(a[i].sequence.id == "synth_00" + std::to_string(i));
    }
    const std::vector<LabeledSequence> b = make_overfit_dataset(8, 10, 2, 7);
    for (std::size_t i = 0; i < 8; ++i) {
        bool same = true;
        for (std::size_t k = 0; k < a[i].sequence.frames.size(); ++k) {
            same = same && a[i].sequence.frames[k] == b[i].sequence.frames[k];
        }
        CHECK(same);
    }

    const auto reps = make_correct_incorrect_dataset(3, 12, 2, 9);
    REQUIRE(reps.size() == 6);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(reps[i].label == skeldata::Label::kCorrect);
        CHECK(reps[i].id.find("_inc") == std::string::npos);
        CHECK(reps[i + 3].label == skeldata::Label::kIncorrect);
        CHECK(reps[i + 3].id.find("_inc") != std::string::npos);
    }

    const mqaformer::BodyPartition parts = mqaformer::BodyPartition::even(4, 2);
    const std::vector<LabeledSequence> sig =
        make_part_signal_dataset(5, 12, parts, {0}, 11);
    REQUIRE(sig.size() == 5);
    CHECK(sig.front().score == doctest::Approx(0.1));
    CHECK(sig.back().score == doctest::Approx(0.9));
    // Part 0 carries the score: peak amplitude grows with it. Joints 2..3
    // (part 1) are distractors whose amplitude stays inside its fixed band
    // regardless of score.
    auto peak = [](const LabeledSequence& x, std::size_t c, double offset) {
        double m = 0.0;
        for (std::size_t t = 0; t < 12; ++t) {
            m = std::max(m, std::abs(x.sequence.frames.at(t, c) - offset));
        }
        return m;
    };
    CHECK(peak(sig[4], 0, 0.0) > 2.0 * peak(sig[0], 0, 0.0));
    for (const LabeledSequence& x : sig) CHECK(peak(x, 6, 1.0) < 2.5);
    // Same seed reproduces the distractors bitwise.
    const std::vector<LabeledSequence> sig2 =
        make_part_signal_dataset(5, 12, parts, {0}, 11);
    for (std::size_t t = 0; t < 12; ++t) {
        CHECK(sig[2].sequence.frames.at(t, 7) == sig2[2].sequence.frames.at(t, 7));
    }
    CHECK_THROWS_AS(make_part_signal_dataset(5, 12, parts, {2}, 11), ConfigError);
}

TEST_CASE("evaluate_mae: zeroed model predicts 0.5 exactly") {
    TrainConfig cfg = tiny_train_config();
    mqaformer::ScorerModel model(cfg.scorer_config(), 3);
    for (numcore::Parameter& p : model.params()) {
        for (double& d : p.value.data()) d = 0.0;
    }
    std::vector<LabeledSequence> xs = make_overfit_dataset(2, 8, 2, 4);
    xs[0].score = 0.0;
    xs[1].score = 1.0;
    CHECK(evaluate_mae(model, xs) == 0.5);

    // Labels equal to the model's own predictions: a perfect predictor.
    std::vector<LabeledSequence> perfect = xs;
    for (LabeledSequence& x : perfect) {
        x.score = mqaformer::predict_score(model, x.sequence).score;
    }
    CHECK(evaluate_mae(model, perfect) == 0.0);

    std::swap(xs[0], xs[1]);
    CHECK(evaluate_mae(model, xs) == 0.5);
    CHECK_THROWS_AS(evaluate_mae(model, {}), DataError);
}

TEST_CASE("train_scorer_on overfits eight synthetic sequences") {
    const std::vector<LabeledSequence> data = make_overfit_dataset(8, 8, 2, 5);
    TrainConfig cfg = tiny_train_config();
    cfg.max_epochs = 400;
    cfg.patience = 400;
    cfg.seed = 6;
    const TrainingResult result = train_scorer_on(cfg, data, data);
    CHECK(evaluate_mae(result.model, data) < 0.05);
    CHECK(result.log.size() <= 400);
    CHECK(result.ms_per_batch > 0.0);
    // Train loss fell over the run.
    CHECK(result.log.back().train_loss < result.log.front().train_loss);
}

TEST_CASE("training standardizes large-amplitude inputs instead of saturating") {
    // Raw recordings can span hundreds of units per channel. Without the
    // frozen per-channel statistics the head saturates at initialization and
    // the clamped loss has no gradient, so training never moves.
    std::vector<LabeledSequence> data = make_overfit_dataset(8, 8, 2, 5);
    for (LabeledSequence& x : data) {
        for (double& d : x.sequence.frames.data()) d = 40.0 * d + 30.0;
    }
    TrainConfig cfg = tiny_train_config();
    cfg.max_epochs = 400;
    cfg.patience = 400;
    cfg.seed = 6;
    const TrainingResult result = train_scorer_on(cfg, data, data);
    CHECK(result.log.back().train_loss < result.log.front().train_loss);
    CHECK(evaluate_mae(result.model, data) < 0.05);
    // Frozen statistics reflect the training amplitudes.
    CHECK(result.model.input_std()[0] > 1.0);
}

TEST_CASE("training is deterministic under a fixed seed") {
    const std::vector<LabeledSequence> data = make_overfit_dataset(6, 8, 2, 12);
    TrainConfig cfg = tiny_train_config();
    cfg.max_epochs = 12;
    cfg.seed = 13;

    // Masking augmentation is part of the determinism contract.
    augment::AugmentationSpec mask;
    mask.kind = augment::AugmentKind::kMasking;
    mask.h = 2;
    mask.p = 0.3;
    cfg.augment_policy = {mask};
    cfg.augment_training = true;

    const TrainingResult a = train_scorer(cfg, data);
    const TrainingResult b = train_scorer(cfg, data);
    CHECK(flat_params(a.model) == flat_params(b.model));
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].train_loss == b.log[i].train_loss);
        CHECK(a.log[i].val_loss == b.log[i].val_loss);
    }

    // The augmentation switch changes what the optimizer sees.
    TrainConfig clean = cfg;
    clean.augment_training = false;
    const TrainingResult c = train_scorer(clean, data);
    CHECK(flat_params(a.model) != flat_params(c.model));
}

TEST_CASE("early stopping restores the best-validation checkpoint") {
    // Validation labels contradict training labels, so validation loss
    // rises as the model fits the training set.
    std::vector<LabeledSequence> train = make_overfit_dataset(6, 8, 2, 14);
    std::vector<LabeledSequence> val = make_overfit_dataset(2, 8, 2, 15);
    for (LabeledSequence& x : val) x.score = 1.0 - x.score;

    TrainConfig cfg = tiny_train_config();
    cfg.max_epochs = 300;
    cfg.patience = 5;
    cfg.seed = 16;
    const TrainingResult result = train_scorer_on(cfg, train, val);

    CHECK(result.log.size() < 300);
    CHECK(result.log.size() == result.best_epoch + 5);
    double min_val = result.log.front().val_loss;
    for (const EpochLog& e : result.log) min_val = std::min(min_val, e.val_loss);
    CHECK(result.best_val_loss == min_val);
    CHECK(recomputed_val_loss(result.model, val) == result.best_val_loss);

    CHECK_THROWS_AS(train_scorer_on(cfg, {}, val), TrainingError);
    CHECK_THROWS_AS(train_scorer_on(cfg, train, {}), TrainingError);
    std::vector<LabeledSequence> bad = train;
    bad[0].score = 2.0;
    CHECK_THROWS_AS(train_scorer_on(cfg, bad, val), DataError);
}

TEST_CASE("sequences with a different frame count are resampled for training") {
    std::vector<LabeledSequence> data = make_overfit_dataset(4, 20, 2, 17);
    TrainConfig cfg = tiny_train_config();  // expects T = 8
    cfg.max_epochs = 2;
    const TrainingResult result = train_scorer_on(cfg, data, data);
    CHECK(result.log.size() == 2);
    CHECK(evaluate_mae(result.model, data) >= 0.0);
}

TEST_CASE("run_experiment: mean over runs, failures flagged and skipped") {
    std::vector<LabeledSequence> data = make_overfit_dataset(10, 8, 2, 18);
    for (std::size_t i = 0; i < data.size(); ++i) {
        // Movement tags m01/m02 drive the per-exercise breakdown.
        data[i].sequence.id =
            (i % 2 == 0 ? "m01_s01_e0" : "m02_s01_e0") + std::to_string(i);
    }
    TrainConfig cfg = tiny_train_config();
    cfg.runs = 3;
    cfg.seed = 40;
    cfg.max_epochs = 3;

    const EvalReport report = run_experiment(cfg, data);
    REQUIRE(report.runs.size() == 3);
    double sum = 0.0;
    for (const RunResult& r : report.runs) {
        CHECK(!r.failed);
        CHECK(r.seed == 40 + r.run_index);
        CHECK(r.mae >= 0.0);
        sum += r.mae;
    }
    CHECK(report.mean_mae == doctest::Approx(sum / 3.0).epsilon(1e-12));
    CHECK(!report.per_exercise_mae.empty());
    for (const auto& [tag, mae] : report.per_exercise_mae) {
        CHECK((tag == "m01" || tag == "m02"));
        CHECK(mae >= 0.0);
    }

    // Reproducibility: the same experiment yields the same report numbers.
    const EvalReport again = run_experiment(cfg, data);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(again.runs[i].mae == report.runs[i].mae);
    }

    // A train function that fails on the second run: flagged, others keep going.
    const TrainFn flaky = [&](const TrainConfig& c,
                              const std::vector<LabeledSequence>& tr,
                              const std::vector<LabeledSequence>& va) {
        if (c.seed == 41) throw TrainingError("injected failure");
        return train_scorer_on(c, tr, va);
    };
    const EvalReport flagged = run_experiment(cfg, data, flaky);
    CHECK(!flagged.runs[0].failed);
    CHECK(flagged.runs[1].failed);
    CHECK(flagged.runs[1].error == "injected failure");
    CHECK(!flagged.runs[2].failed);
    CHECK(flagged.mean_mae ==
          doctest::Approx((flagged.runs[0].mae + flagged.runs[2].mae) / 2.0));

    const TrainFn always_fails = [](const TrainConfig&,
                                    const std::vector<LabeledSequence>&,
                                    const std::vector<LabeledSequence>&)
        -> TrainingResult { throw TrainingError("nope"); };
    CHECK_THROWS_AS(run_experiment(cfg, data, always_fails), TrainingError);
}

TEST_CASE("report and log serialization") {
    TempDir dir("harness_io");
    EvalReport report;
    report.runs.push_back({0, 50, false, "", 0.125, 12.5, 30, 25});
    report.runs.push_back({1, 51, true, "boom, with comma", 0.0, 0.0, 0, 0});
    report.mean_mae = 0.125;
    report.ms_per_batch = 12.5;
    report.per_exercise_mae["m01"] = 0.125;

    const std::string jpath = dir.file("report.json");
    write_eval_report_json(jpath, report, false);
    const std::string j1 = slurp(jpath);
    CHECK(j1.find("ms_per_batch") == std::string::npos);
    CHECK(j1.find("\"mean_mae\": 0.125") != std::string::npos);
    CHECK(j1.find("m01") != std::string::npos);
    write_eval_report_json(jpath, report, false);
    CHECK(slurp(jpath) == j1);  // byte-identical rewrite
    write_eval_report_json(jpath, report, true);
    CHECK(slurp(jpath).find("ms_per_batch") != std::string::npos);

    const std::string cpath = dir.file("report.csv");
    write_eval_report_csv(cpath, report, false);
    const std::string c1 = slurp(cpath);
    CHECK(c1.find("run,seed,mae,epochs,best_epoch,failed,error") == 0);
    CHECK(c1.find("0,50,0.125000,30,25,0,") != std::string::npos);
    CHECK(c1.find("boom; with comma") != std::string::npos);
    write_eval_report_csv(cpath, report, true);
    CHECK(slurp(cpath).find(",ms_per_batch,") != std::string::npos);

    const std::string lpath = dir.file("log.csv");
    write_training_log_csv(lpath, {{1, 0.5, 0.75}, {2, 0.25, 0.5}});
    const std::string l1 = slurp(lpath);
    CHECK(l1.find("epoch,train_loss,val_loss\n1,0.500000000,0.750000000\n") == 0);
}
