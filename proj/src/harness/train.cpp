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

#include "mqa/harness/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "mqa/errors.hpp"
#include "mqa/numcore/adam.hpp"
#include "mqa/numcore/rng.hpp"
#include "mqa/skeldata/io.hpp"

namespace mqa::harness {

using numcore::Graph;
using numcore::Rng;
using numcore::Tensor;
using numcore::Value;
using numcore::derive_seed;

namespace {

// Seed streams, so weights, shuffling, splitting, and augmentation draw from
// independent deterministic sources.
constexpr std::uint64_t kWeightStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kAugmentStream = 3;
constexpr std::uint64_t kSplitStream = 4;

// Matches the clamp inside Graph::bce_loss so validation loss and training
// loss are on the same scale.
constexpr double kBceEps = 1e-7;

double scalar_bce(double pred, double target) {
    const double p = std::clamp(pred, kBceEps, 1.0 - kBceEps);
    return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

void check_labels(const std::vector<LabeledSequence>& xs, const char* what) {
    for (const LabeledSequence& x : xs) {
        if (!(x.score >= 0.0 && x.score <= 1.0)) {
            throw DataError(std::string(what) + ": score " + std::to_string(x.score) +
                            " for sequence " + x.sequence.id + " is outside [0, 1]");
        }
    }
}

std::vector<LabeledSequence> resample_all(const std::vector<LabeledSequence>& xs,
                                          std::size_t T) {
    std::vector<LabeledSequence> out;
    out.reserve(xs.size());
    for (const LabeledSequence& x : xs) {
        if (x.sequence.frame_count() == T) {
            out.push_back(x);
        } else {
            out.push_back({skeldata::resample_sequence(x.sequence, T), x.score});
        }
    }
    return out;
}

// Per-channel mean and population stddev over every frame in the set. The
// scorer standardizes inputs with these, so the head starts in the sigmoid's
// responsive range whatever the recording's units.
std::pair<Tensor, Tensor> channel_statistics(const std::vector<LabeledSequence>& xs) {
    const std::size_t d = xs.front().sequence.feature_count();
    Tensor mean({d}, 0.0);
    Tensor stddev({d}, 0.0);
    std::size_t frames = 0;
    for (const LabeledSequence& x : xs) {
        for (std::size_t t = 0; t < x.sequence.frame_count(); ++t) {
            for (std::size_t c = 0; c < d; ++c) mean[c] += x.sequence.frames.at(t, c);
        }
        frames += x.sequence.frame_count();
    }
    for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<double>(frames);
    for (const LabeledSequence& x : xs) {
        for (std::size_t t = 0; t < x.sequence.frame_count(); ++t) {
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = x.sequence.frames.at(t, c) - mean[c];
                stddev[c] += diff * diff;
            }
        }
    }
    for (std::size_t c = 0; c < d; ++c) {
        stddev[c] = std::sqrt(stddev[c] / static_cast<double>(frames));
    }
    return {std::move(mean), std::move(stddev)};
}

double validation_loss(const mqaformer::ScorerModel& model,
                       const std::vector<LabeledSequence>& val) {
    double acc = 0.0;
    for (const LabeledSequence& x : val) {
        Graph g;
        acc += scalar_bce(g.value(model.forward(g, x.sequence))[0], x.score);
    }
    return acc / static_cast<double>(val.size());
}

std::string exercise_tag(const std::string& id) {
    const skeldata::SequenceNameInfo info = skeldata::parse_sequence_name(id);
    return info.movement.empty() ? std::string("all") : info.movement;
}

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

std::vector<LabeledSequence> attach_labels(
    const std::vector<skeldata::SkeletalSequence>& sequences,
    const std::vector<scoregen::LabeledScore>& labels) {
    std::unordered_map<std::string, double> by_id;
    for (const scoregen::LabeledScore& l : labels) by_id[l.sequence_id] = l.score;
    std::vector<LabeledSequence> out;
    out.reserve(sequences.size());
    for (const skeldata::SkeletalSequence& s : sequences) {
        const auto it = by_id.find(s.id);
        if (it == by_id.end()) {
            throw DataError("attach_labels: no label for sequence " + s.id);
        }
        out.push_back({s, it->second});
    }
    check_labels(out, "attach_labels");
    return out;
}

mqaformer::ScorerConfig TrainConfig::scorer_config() const {
    mqaformer::ScorerConfig sc;
    sc.embedder = embedder;
    sc.embedder.W = W;
    sc.embedder.K = K;
    sc.T = T;
    sc.blocks = blocks;
    sc.heads = heads;
    return sc;
}

void TrainConfig::validate() const {
    if (!(lr > 0.0)) throw ConfigError("TrainConfig: lr must be positive");
    if (batch_size == 0) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (max_epochs == 0) throw ConfigError("TrainConfig: max_epochs must be >= 1");
    if (patience == 0) throw ConfigError("TrainConfig: patience must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw ConfigError("TrainConfig: split_ratio must lie in (0, 1)");
    }
    if (runs == 0) throw ConfigError("TrainConfig: runs must be >= 1");
    scorer_config().validate();
}

TrainingResult train_scorer_on(const TrainConfig& cfg,
                               const std::vector<LabeledSequence>& train,
                               const std::vector<LabeledSequence>& validation) {
    cfg.validate();
    if (train.empty()) throw TrainingError("train_scorer: empty training set");
    if (validation.empty()) throw TrainingError("train_scorer: empty validation set");
    check_labels(train, "train_scorer");
    check_labels(validation, "train_scorer");

    const std::vector<LabeledSequence> tr = resample_all(train, cfg.T);
    const std::vector<LabeledSequence> va = resample_all(validation, cfg.T);

    mqaformer::ScorerModel model(cfg.scorer_config(),
                                 derive_seed(cfg.seed, kWeightStream));
    auto [feat_mean, feat_std] = channel_statistics(tr);
    model.set_standardization(std::move(feat_mean), std::move(feat_std));
    numcore::AdamState adam({cfg.lr});
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream));
    const std::uint64_t aug_root = derive_seed(cfg.seed, kAugmentStream);
    const bool augment = cfg.augment_training && !cfg.augment_policy.empty();

    numcore::ParameterSet best = model.params().clone_values();
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t stall = 0;

    std::vector<EpochLog> log;
    log.reserve(std::min<std::size_t>(cfg.max_epochs, 4096));
    std::vector<std::size_t> order(tr.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    double batch_seconds = 0.0;
    std::size_t batch_steps = 0;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t n = std::min(cfg.batch_size, order.size() - start);
            std::vector<skeldata::SkeletalSequence> seqs;
            std::vector<double> targets;
            seqs.reserve(n);
            targets.reserve(n);
            for (std::size_t k = 0; k < n; ++k) {
                seqs.push_back(tr[order[start + k]].sequence);
                targets.push_back(tr[order[start + k]].score);
            }

            const auto t0 = std::chrono::steady_clock::now();
            if (augment) {
                seqs = augment::augment_batch(seqs, cfg.augment_policy,
                                     derive_seed(aug_root,
                                                 epoch * 1000003ULL + start));
            }
            Graph g;
            Value total = Value{};
            for (std::size_t k = 0; k < n; ++k) {
                const Value pred = model.forward(g, seqs[k]);
                const Value loss =
                    g.bce_loss(pred, g.constant(Tensor({1, 1}, targets[k])));
                total = (k == 0) ? loss : g.add(total, loss);
            }
            total = g.scale(total, 1.0 / static_cast<double>(n));
            model.params().zero_grads();
            g.backward(total);
            adam.step(model.params());
            const auto t1 = std::chrono::steady_clock::now();
            batch_seconds += std::chrono::duration<double>(t1 - t0).count();
            ++batch_steps;

            epoch_loss += g.value(total)[0] * static_cast<double>(n);
        }
        epoch_loss /= static_cast<double>(tr.size());

        const double val_loss = validation_loss(model, va);
        log.push_back({epoch, epoch_loss, val_loss});
        if (val_loss < best_val) {
            best_val = val_loss;
            best_epoch = epoch;
            best.assign_values_from(model.params());
            stall = 0;
        } else if (++stall >= cfg.patience) {
            break;
        }
    }

    model.params().assign_values_from(best);
    const double ms = batch_steps == 0
                          ? 0.0
                          : 1000.0 * batch_seconds / static_cast<double>(batch_steps);
    return {std::move(model), std::move(log), best_val, best_epoch, ms};
}

std::pair<std::vector<LabeledSequence>, std::vector<LabeledSequence>>
split_for_training(const TrainConfig& cfg, const std::vector<LabeledSequence>& data) {
    if (data.size() < 2) {
        throw DataError("split_for_training: need at least 2 sequences to split");
    }
    std::vector<LabeledSequence> shuffled = data;
    Rng rng(derive_seed(cfg.seed, kSplitStream));
    rng.shuffle(shuffled);
    std::size_t cut = static_cast<std::size_t>(cfg.split_ratio *
                                               static_cast<double>(shuffled.size()));
    cut = std::clamp<std::size_t>(cut, 1, shuffled.size() - 1);
    std::vector<LabeledSequence> train(shuffled.begin(), shuffled.begin() + cut);
    std::vector<LabeledSequence> validation(shuffled.begin() + cut, shuffled.end());
    return {std::move(train), std::move(validation)};
}

TrainingResult train_scorer(const TrainConfig& cfg,
                            const std::vector<LabeledSequence>& data) {
    cfg.validate();
    auto [train, validation] = split_for_training(cfg, data);
    return train_scorer_on(cfg, train, validation);
}

double evaluate_mae(const mqaformer::ScorerModel& model,
                    const std::vector<LabeledSequence>& xs) {
    if (xs.empty()) throw DataError("evaluate_mae: empty evaluation set");
    const std::vector<LabeledSequence> rs = resample_all(xs, model.config().T);
    double acc = 0.0;
    for (const LabeledSequence& x : rs) {
        acc += std::abs(mqaformer::predict_score(model, x.sequence).score - x.score);
    }
    return acc / static_cast<double>(rs.size());
}

void write_training_log_csv(const std::string& path, const std::vector<EpochLog>& log) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "epoch,train_loss,val_loss\n";
    char buf[96];
    for (const EpochLog& e : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.9f,%.9f\n", e.epoch, e.train_loss,
                      e.val_loss);
        os << buf;
    }
    if (!os) throw IoError("failed writing " + path);
}

EvalReport run_experiment(const TrainConfig& cfg,
                          const std::vector<LabeledSequence>& dataset,
                          const TrainFn& train) {
    cfg.validate();
    if (dataset.size() < 2) {
        throw DataError("run_experiment: need at least 2 sequences");
    }
    const TrainFn fn = train ? train : TrainFn(train_scorer_on);

    EvalReport report;
    std::map<std::string, std::pair<double, std::size_t>> exercise_acc;
    double mae_sum = 0.0;
    double ms_sum = 0.0;
    std::size_t ok = 0;

    for (std::size_t i = 0; i < cfg.runs; ++i) {
        TrainConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + i;

        RunResult rr;
        rr.run_index = i;
        rr.seed = run_cfg.seed;
        try {
            const auto [tr, va] = split_for_training(run_cfg, dataset);
            TrainingResult result = fn(run_cfg, tr, va);
            rr.mae = evaluate_mae(result.model, va);
            rr.ms_per_batch = result.ms_per_batch;
            rr.epochs = result.log.size();
            rr.best_epoch = result.best_epoch;

            std::map<std::string, std::vector<LabeledSequence>> groups;
            for (const LabeledSequence& x : va) {
                groups[exercise_tag(x.sequence.id)].push_back(x);
            }
            for (const auto& [tag, members] : groups) {
                auto& [sum, count] = exercise_acc[tag];
                sum += evaluate_mae(result.model, members);
                ++count;
            }

            mae_sum += rr.mae;
            ms_sum += rr.ms_per_batch;
            ++ok;
        } catch (const std::exception& e) {
            rr.failed = true;
            rr.error = e.what();
        }
        report.runs.push_back(std::move(rr));
    }

    if (ok == 0) {
        throw TrainingError("run_experiment: every run failed; first error: " +
                            report.runs.front().error);
    }
    report.mean_mae = mae_sum / static_cast<double>(ok);
    report.ms_per_batch = ms_sum / static_cast<double>(ok);
    for (const auto& [tag, acc] : exercise_acc) {
        report.per_exercise_mae[tag] = acc.first / static_cast<double>(acc.second);
    }
    return report;
}

void write_eval_report_json(const std::string& path, const EvalReport& report,
                            bool include_timing) {
    nlohmann::json j;
    j["kind"] = "eval_report";
    j["mean_mae"] = report.mean_mae;
    if (include_timing) j["ms_per_batch"] = report.ms_per_batch;
    nlohmann::json runs = nlohmann::json::array();
    for (const RunResult& r : report.runs) {
        nlohmann::json jr;
        jr["run"] = r.run_index;
        jr["seed"] = r.seed;
        jr["failed"] = r.failed;
        if (r.failed) {
            jr["error"] = r.error;
        } else {
            jr["mae"] = r.mae;
            jr["epochs"] = r.epochs;
            jr["best_epoch"] = r.best_epoch;
            if (include_timing) jr["ms_per_batch"] = r.ms_per_batch;
        }
        runs.push_back(std::move(jr));
    }
    j["runs"] = std::move(runs);
    j["per_exercise_mae"] = report.per_exercise_mae;

    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw IoError("failed writing " + path);
}

void write_eval_report_csv(const std::string& path, const EvalReport& report,
                           bool include_timing) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "run,seed,mae,epochs,best_epoch"
       << (include_timing ? ",ms_per_batch" : "") << ",failed,error\n";
    char buf[64];
    for (const RunResult& r : report.runs) {
        os << r.run_index << ',' << r.seed << ',';
        if (!r.failed) {
            std::snprintf(buf, sizeof buf, "%.6f", r.mae);
            os << buf;
        }
        os << ',' << r.epochs << ',' << r.best_epoch;
        if (include_timing) {
            os << ',';
            if (!r.failed) {
                std::snprintf(buf, sizeof buf, "%.3f", r.ms_per_batch);
                os << buf;
            }
        }
        os << ',' << (r.failed ? 1 : 0) << ',' << csv_safe(r.error) << '\n';
    }
    if (!os) throw IoError("failed writing " + path);
}

}  // namespace mqa::harness
