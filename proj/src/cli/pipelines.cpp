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

#include "mqa/cli/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "mqa/errors.hpp"
#include "mqa/harness/synthetic.hpp"
#include "mqa/scoregen/gmm.hpp"
#include "mqa/scoregen/scoring.hpp"

namespace fs = std::filesystem;

namespace mqa::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGmmSeedStream = 11;
constexpr std::uint64_t kAeSeedStream = 12;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void require_known_keys(const json& j, const std::set<std::string>& allowed,
                        const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (allowed.find(key) == allowed.end()) {
            throw ParseError(std::string("config: unknown key \"") + key + "\" in " +
                             where);
        }
    }
}

json spec_to_json(const augment::AugmentationSpec& s) {
    json j;
    j["kind"] = augment::to_string(s.kind);
    j["pace_factor"] = s.pace_factor;
    j["h"] = s.h;
    j["n"] = s.n;
    j["p"] = s.p;
    j["occlusion_mode"] = augment::to_string(s.occlusion_mode);
    j["seed"] = s.seed;
    return j;
}

augment::AugmentationSpec spec_from_json(const json& j) {
    require_known_keys(
        j, {"kind", "pace_factor", "h", "n", "p", "occlusion_mode", "seed"},
        "augment_policy[]");
    augment::AugmentationSpec s;
    if (j.contains("kind")) {
        s.kind = augment::augment_kind_from_string(j.at("kind").get<std::string>());
    }
    if (j.contains("pace_factor")) s.pace_factor = j.at("pace_factor").get<double>();
    if (j.contains("h")) s.h = j.at("h").get<std::size_t>();
    if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
    if (j.contains("p")) s.p = j.at("p").get<double>();
    if (j.contains("occlusion_mode")) {
        s.occlusion_mode =
            augment::occlusion_mode_from_string(j.at("occlusion_mode").get<std::string>());
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

json embedder_to_json(const mqaformer::EmbedderConfig& e) {
    json j;
    j["kind"] = mqaformer::to_string(e.kind);
    j["hfe_attention_heads"] = e.hfe_attention_heads;
    j["K_part"] = e.K_part;
    j["mlp_hidden1"] = e.mlp_hidden1;
    j["mlp_hidden2"] = e.mlp_hidden2;
    j["cnn_channels1"] = e.cnn_channels1;
    j["cnn_kernel1"] = e.cnn_kernel1;
    j["cnn_channels2"] = e.cnn_channels2;
    j["cnn_kernel2"] = e.cnn_kernel2;
    j["part_channels"] = e.part_channels;
    j["part_kernel"] = e.part_kernel;
    return j;
}

void embedder_from_json(const json& j, mqaformer::EmbedderConfig& e) {
    require_known_keys(j,
                       {"kind", "hfe_attention_heads", "K_part", "mlp_hidden1",
                        "mlp_hidden2", "cnn_channels1", "cnn_kernel1", "cnn_channels2",
                        "cnn_kernel2", "part_channels", "part_kernel"},
                       "train.embedder");
    if (j.contains("kind")) {
        e.kind = mqaformer::embedder_kind_from_string(j.at("kind").get<std::string>());
    }
    if (j.contains("hfe_attention_heads")) {
        e.hfe_attention_heads = j.at("hfe_attention_heads").get<std::size_t>();
    }
    if (j.contains("K_part")) e.K_part = j.at("K_part").get<std::size_t>();
    if (j.contains("mlp_hidden1")) e.mlp_hidden1 = j.at("mlp_hidden1").get<std::size_t>();
    if (j.contains("mlp_hidden2")) e.mlp_hidden2 = j.at("mlp_hidden2").get<std::size_t>();
    if (j.contains("cnn_channels1")) {
        e.cnn_channels1 = j.at("cnn_channels1").get<std::size_t>();
    }
    if (j.contains("cnn_kernel1")) e.cnn_kernel1 = j.at("cnn_kernel1").get<std::size_t>();
    if (j.contains("cnn_channels2")) {
        e.cnn_channels2 = j.at("cnn_channels2").get<std::size_t>();
    }
    if (j.contains("cnn_kernel2")) e.cnn_kernel2 = j.at("cnn_kernel2").get<std::size_t>();
    if (j.contains("part_channels")) {
        e.part_channels = j.at("part_channels").get<std::size_t>();
    }
    if (j.contains("part_kernel")) e.part_kernel = j.at("part_kernel").get<std::size_t>();
}

json train_to_json(const harness::TrainConfig& t) {
    json j;
    j["lr"] = t.lr;
    j["batch_size"] = t.batch_size;
    j["max_epochs"] = t.max_epochs;
    j["patience"] = t.patience;
    j["split_ratio"] = t.split_ratio;
    j["runs"] = t.runs;
    j["seed"] = t.seed;
    j["augment_training"] = t.augment_training;
    j["embedder"] = embedder_to_json(t.embedder);
    j["T"] = t.T;
    j["W"] = t.W;
    j["K"] = t.K;
    j["heads"] = t.heads;
    j["blocks"] = t.blocks;
    return j;
}

void train_from_json(const json& j, harness::TrainConfig& t) {
    require_known_keys(j,
                       {"lr", "batch_size", "max_epochs", "patience", "split_ratio",
                        "runs", "seed", "augment_training", "embedder", "T", "W", "K",
                        "heads", "blocks"},
                       "train");
    if (j.contains("lr")) t.lr = j.at("lr").get<double>();
    if (j.contains("batch_size")) t.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("max_epochs")) t.max_epochs = j.at("max_epochs").get<std::size_t>();
    if (j.contains("patience")) t.patience = j.at("patience").get<std::size_t>();
    if (j.contains("split_ratio")) t.split_ratio = j.at("split_ratio").get<double>();
    if (j.contains("runs")) t.runs = j.at("runs").get<std::size_t>();
    if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("augment_training")) {
        t.augment_training = j.at("augment_training").get<bool>();
    }
    if (j.contains("embedder")) embedder_from_json(j.at("embedder"), t.embedder);
    if (j.contains("T")) t.T = j.at("T").get<std::size_t>();
    if (j.contains("W")) t.W = j.at("W").get<std::size_t>();
    if (j.contains("K")) t.K = j.at("K").get<std::size_t>();
    if (j.contains("heads")) t.heads = j.at("heads").get<std::size_t>();
    if (j.contains("blocks")) t.blocks = j.at("blocks").get<std::size_t>();
}

json config_to_json(const CliConfig& cfg) {
    json j;
    j["format"] = cfg.format == skeldata::FileFormat::kUiprmdAngles ? "uiprmd" : "kimore";
    j["resample_T"] = cfg.resample_T;
    json policy = json::array();
    for (const augment::AugmentationSpec& s : cfg.augment_policy) {
        policy.push_back(spec_to_json(s));
    }
    j["augment_policy"] = std::move(policy);
    j["autoencoder"] = {{"latent", cfg.ae_latent},       {"hidden1", cfg.ae_hidden1},
                        {"hidden2", cfg.ae_hidden2},     {"lambda", cfg.ae_lambda},
                        {"epochs", cfg.ae_epochs},       {"batch_size", cfg.ae_batch_size},
                        {"lr", cfg.ae_lr}};
    j["gmm"] = {{"components", cfg.gmm_components},
                {"max_components", cfg.gmm_max_components}};
    j["train"] = train_to_json(cfg.train);
    j["body_partition"] = cfg.body_partition;
    j["partition_parts"] = cfg.partition_parts;
    j["synth"] = {{"kind", cfg.synth_kind},
                  {"count", cfg.synth_count},
                  {"T", cfg.synth_T},
                  {"joints", cfg.synth_joints}};
    return j;
}

skeldata::SkeletalSequence resampled(const skeldata::SkeletalSequence& x,
                                     std::size_t T) {
    if (T == 0 || x.frame_count() == T) return x;
    return skeldata::resample_sequence(x, T);
}

/// Identity policy so denoising training always has a policy to draw from.
std::vector<augment::AugmentationSpec> effective_policy(const CliConfig& cfg) {
    if (!cfg.augment_policy.empty()) return cfg.augment_policy;
    augment::AugmentationSpec identity;
    identity.kind = augment::AugmentKind::kPace;
    identity.pace_factor = 1.0;
    return {identity};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw IoError("failed writing " + path);
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

/// Subject tag from the sequence id ("s04"), or "" when absent.
std::string subject_tag(const std::string& id) {
    return skeldata::parse_sequence_name(id).subject;
}

double mean_of(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

std::string CliConfig::canonical_json() const { return config_to_json(*this).dump(); }

CliConfig load_cli_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(path + ": config must be a JSON object");

    CliConfig cfg;
    try {
        require_known_keys(j,
                           {"format", "resample_T", "augment_policy", "autoencoder",
                            "gmm", "train", "body_partition", "partition_parts",
                            "synth"},
                           "top level");
        if (j.contains("format")) {
            const std::string f = j.at("format").get<std::string>();
            if (f == "uiprmd") {
                cfg.format = skeldata::FileFormat::kUiprmdAngles;
            } else if (f == "kimore") {
                cfg.format = skeldata::FileFormat::kKimore;
            } else {
                throw ParseError("config: unknown format \"" + f + "\"");
            }
        }
        if (j.contains("resample_T")) cfg.resample_T = j.at("resample_T").get<std::size_t>();
        if (j.contains("augment_policy")) {
            for (const json& js : j.at("augment_policy")) {
                cfg.augment_policy.push_back(spec_from_json(js));
            }
        }
        if (j.contains("autoencoder")) {
            const json& a = j.at("autoencoder");
            require_known_keys(
                a, {"latent", "hidden1", "hidden2", "lambda", "epochs", "batch_size", "lr"},
                "autoencoder");
            if (a.contains("latent")) cfg.ae_latent = a.at("latent").get<std::size_t>();
            if (a.contains("hidden1")) cfg.ae_hidden1 = a.at("hidden1").get<std::size_t>();
            if (a.contains("hidden2")) cfg.ae_hidden2 = a.at("hidden2").get<std::size_t>();
            if (a.contains("lambda")) cfg.ae_lambda = a.at("lambda").get<double>();
            if (a.contains("epochs")) cfg.ae_epochs = a.at("epochs").get<std::size_t>();
            if (a.contains("batch_size")) {
                cfg.ae_batch_size = a.at("batch_size").get<std::size_t>();
            }
            if (a.contains("lr")) cfg.ae_lr = a.at("lr").get<double>();
        }
        if (j.contains("gmm")) {
            const json& g = j.at("gmm");
            require_known_keys(g, {"components", "max_components"}, "gmm");
            if (g.contains("components")) {
                cfg.gmm_components = g.at("components").get<std::size_t>();
            }
            if (g.contains("max_components")) {
                cfg.gmm_max_components = g.at("max_components").get<std::size_t>();
            }
        }
        if (j.contains("train")) train_from_json(j.at("train"), cfg.train);
        if (j.contains("body_partition")) {
            cfg.body_partition = j.at("body_partition").get<std::string>();
        }
        if (j.contains("partition_parts")) {
            cfg.partition_parts = j.at("partition_parts").get<std::size_t>();
        }
        if (j.contains("synth")) {
            const json& s = j.at("synth");
            require_known_keys(s, {"kind", "count", "T", "joints"}, "synth");
            if (s.contains("kind")) cfg.synth_kind = s.at("kind").get<std::string>();
            if (s.contains("count")) cfg.synth_count = s.at("count").get<std::size_t>();
            if (s.contains("T")) cfg.synth_T = s.at("T").get<std::size_t>();
            if (s.contains("joints")) cfg.synth_joints = s.at("joints").get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return cfg;
}

std::string config_hash(const CliConfig& cfg) {
    const std::string text = cfg.canonical_json();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

mqaformer::BodyPartition choose_partition(const CliConfig& cfg, std::size_t joints) {
    const std::string& name = cfg.body_partition;
    if (name == "vicon39") return mqaformer::BodyPartition::vicon39();
    if (name == "kinect25") return mqaformer::BodyPartition::kinect25();
    if (name == "uiprmd22") return mqaformer::BodyPartition::uiprmd22();
    if (name == "even") {
        return mqaformer::BodyPartition::even(joints, cfg.partition_parts);
    }
    if (name != "auto") {
        throw ConfigError("config: unknown body_partition \"" + name + "\"");
    }
    if (joints == 39) return mqaformer::BodyPartition::vicon39();
    if (joints == 25) return mqaformer::BodyPartition::kinect25();
    if (joints == 22) return mqaformer::BodyPartition::uiprmd22();
    return mqaformer::BodyPartition::even(joints,
                                          std::min(cfg.partition_parts, joints));
}

void write_manifest(const std::string& out_dir, RunManifest& manifest) {
    manifest.artifacts.push_back("manifest.json");
    json j;
    j["kind"] = "run_manifest";
    j["command"] = manifest.command;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = manifest.config_hash;
    j["seed"] = manifest.seed;
    j["inputs"] = manifest.inputs;
    j["artifacts"] = manifest.artifacts;
    j["volatile"] = {{"timestamp", manifest.timestamp},
                     {"timing_ms", manifest.timing_ms}};
    write_text((fs::path(out_dir) / "manifest.json").string(), json_text(j));
}

std::vector<skeldata::SkeletalSequence> load_dataset_dir(const std::string& dir,
                                                         skeldata::FileFormat format) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    std::vector<std::string> paths;
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".txt") {
            paths.push_back(e.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw DataError("no .txt sequences in " + dir);

    std::vector<skeldata::SkeletalSequence> out;
    out.reserve(paths.size());
    for (const std::string& p : paths) {
        skeldata::SkeletalSequence s = skeldata::load_sequence(p, format);
        if (s.label == skeldata::Label::kUnlabeled) {
            s.label = skeldata::parse_sequence_name(s.id).incorrect
                          ? skeldata::Label::kIncorrect
                          : skeldata::Label::kCorrect;
        }
        out.push_back(std::move(s));
    }
    return out;
}

RunManifest cmd_augment(const CliConfig& cfg, const std::string& input_dir,
                        const std::string& out_dir, std::uint64_t seed) {
    if (cfg.augment_policy.empty()) {
        throw ConfigError("augment: config has an empty augment_policy");
    }
    fs::create_directories(out_dir);
    const std::vector<skeldata::SkeletalSequence> seqs =
        load_dataset_dir(input_dir, cfg.format);

    RunManifest manifest;
    manifest.command = "augment";
    manifest.config_hash = config_hash(cfg);
    manifest.seed = seed;
    manifest.inputs = {input_dir};
    manifest.timestamp = iso_timestamp();

    Stopwatch watch;
    const std::vector<skeldata::SkeletalSequence> augmented =
        augment::augment_batch(seqs, cfg.augment_policy, seed);
    manifest.timing_ms["augment"] = watch.ms();

    char buf[64];
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        const std::string stem = seqs[i].id;
        const std::string seq_name = stem + "_aug.txt";
        skeldata::save_sequence((fs::path(out_dir) / seq_name).string(), augmented[i]);
        manifest.artifacts.push_back(seq_name);

        const std::string trace_name = stem + "_trace.csv";
        std::ofstream os(fs::path(out_dir) / trace_name);
        if (!os) throw IoError("cannot open " + trace_name + " for writing");
        os << "frame,channel,original,augmented\n";
        const numcore::Tensor& a = seqs[i].frames;
        const numcore::Tensor& b = augmented[i].frames;
        for (std::size_t t = 0; t < a.rows(); ++t) {
            for (std::size_t c = 0; c < a.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f\n", t, c, a.at(t, c),
                              b.at(t, c));
                os << buf;
            }
        }
        if (!os) throw IoError("failed writing " + trace_name);
        manifest.artifacts.push_back(trace_name);
    }

    std::vector<std::string> sources;
    for (const skeldata::SkeletalSequence& s : seqs) {
        sources.push_back(s.id + ".txt");
    }
    skeldata::write_dataset_manifest((fs::path(out_dir) / "dataset.json").string(),
                                     augmented, sources);
    manifest.artifacts.push_back("dataset.json");

    write_manifest(out_dir, manifest);
    return manifest;
}

RunManifest cmd_genscores(const CliConfig& cfg, const std::string& input_dir,
                          const std::string& out_dir, std::uint64_t seed) {
    fs::create_directories(out_dir);
    std::vector<skeldata::SkeletalSequence> seqs = load_dataset_dir(input_dir, cfg.format);
    for (skeldata::SkeletalSequence& s : seqs) s = resampled(s, cfg.resample_T);

    std::vector<skeldata::SkeletalSequence> correct;
    std::vector<skeldata::SkeletalSequence> incorrect;
    for (const skeldata::SkeletalSequence& s : seqs) {
        (s.label == skeldata::Label::kIncorrect ? incorrect : correct).push_back(s);
    }
    if (correct.empty()) throw DataError("gen-scores: no correct-labeled sequences");
    if (incorrect.empty()) throw DataError("gen-scores: no incorrect-labeled sequences");

    RunManifest manifest;
    manifest.command = "gen-scores";
    manifest.config_hash = config_hash(cfg);
    manifest.seed = seed;
    manifest.inputs = {input_dir};
    manifest.timestamp = iso_timestamp();

    scoregen::AutoencoderConfig acfg;
    acfg.T = correct.front().frame_count();
    acfg.D = correct.front().feature_count();
    acfg.L = cfg.ae_latent;
    acfg.hidden1 = cfg.ae_hidden1;
    acfg.hidden2 = cfg.ae_hidden2;
    acfg.lambda = cfg.ae_lambda;

    Stopwatch ae_watch;
    scoregen::AutoencoderTraining training = scoregen::train_denoising_autoencoder(
        correct, effective_policy(cfg), acfg, cfg.ae_epochs,
        numcore::derive_seed(seed, kAeSeedStream), cfg.ae_batch_size, cfg.ae_lr);
    manifest.timing_ms["autoencoder_train"] = ae_watch.ms();
    const scoregen::Autoencoder& ae = training.model;

    numcore::Tensor latents({correct.size(), acfg.L}, 0.0);
    for (std::size_t i = 0; i < correct.size(); ++i) {
        const numcore::Tensor z = ae.encode_sequence(correct[i]);
        for (std::size_t l = 0; l < acfg.L; ++l) latents.at(i, l) = z[l];
    }

    Stopwatch gmm_watch;
    const std::uint64_t gmm_seed = numcore::derive_seed(seed, kGmmSeedStream);
    scoregen::ExerciseModel model =
        cfg.gmm_components == 0
            ? scoregen::fit_gmm_bic(latents, cfg.gmm_max_components, gmm_seed)
            : scoregen::fit_gmm_em(latents, cfg.gmm_components, gmm_seed);
    manifest.timing_ms["gmm_fit"] = gmm_watch.ms();

    auto metrics_of = [&](const std::vector<skeldata::SkeletalSequence>& xs) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (const skeldata::SkeletalSequence& x : xs) {
            out.push_back(scoregen::performance_metric(model, ae.encode_sequence(x)));
        }
        return out;
    };
    const std::vector<double> metrics_correct = metrics_of(correct);
    const std::vector<double> metrics_incorrect = metrics_of(incorrect);

    const scoregen::ScoringCalibration cal =
        scoregen::calibrate_scoring(metrics_correct);
    const std::vector<scoregen::LabeledScore> labels =
        scoregen::generate_labels(ae, model, cal, seqs);

    scoregen::write_label_csv((fs::path(out_dir) / "labels.csv").string(), labels);
    manifest.artifacts.push_back("labels.csv");
    scoregen::save_score_model((fs::path(out_dir) / "score_model.json").string(), model,
                               cal);
    manifest.artifacts.push_back("score_model.json");
    ae.save((fs::path(out_dir) / "autoencoder.ckpt").string());
    manifest.artifacts.push_back("autoencoder.ckpt");

    // Separation report: pooled metrics measure between-subject separation;
    // per-subject separation averages over subjects owning both classes.
    const double between = scoregen::separation_degree(metrics_correct,
                                                       metrics_incorrect);
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_subject;
    for (std::size_t i = 0; i < correct.size(); ++i) {
        by_subject[subject_tag(correct[i].id)].first.push_back(metrics_correct[i]);
    }
    for (std::size_t i = 0; i < incorrect.size(); ++i) {
        by_subject[subject_tag(incorrect[i].id)].second.push_back(metrics_incorrect[i]);
    }
    json per_subject = json::object();
    std::vector<double> subject_sds;
    for (const auto& [tag, metrics] : by_subject) {
        if (metrics.first.empty() || metrics.second.empty()) continue;
        const double sd = scoregen::separation_degree(metrics.first, metrics.second);
        subject_sds.push_back(sd);
        per_subject[tag.empty() ? "all" : tag] = sd;
    }
    json sd_report;
    sd_report["kind"] = "sd_report";
    sd_report["between_subject"] = between;
    sd_report["within_subject"] = subject_sds.empty() ? between : mean_of(subject_sds);
    sd_report["per_subject"] = std::move(per_subject);
    sd_report["n_correct"] = correct.size();
    sd_report["n_incorrect"] = incorrect.size();
    sd_report["gmm_components"] = model.components;
    write_text((fs::path(out_dir) / "sd_report.json").string(), json_text(sd_report));
    manifest.artifacts.push_back("sd_report.json");

    write_manifest(out_dir, manifest);
    return manifest;
}

namespace {

/// Shared by train/eval/ablate: dataset with labels attached and the
/// train config completed from the data (D, partition, seed).
struct LabeledDataset {
    std::vector<harness::LabeledSequence> data;
    harness::TrainConfig train;
};

LabeledDataset prepare_labeled(const CliConfig& cfg, const std::string& input_dir,
                               const std::string& labels_path, std::uint64_t seed) {
    const std::vector<skeldata::SkeletalSequence> seqs =
        load_dataset_dir(input_dir, cfg.format);
    const std::vector<scoregen::LabeledScore> labels =
        scoregen::load_label_csv(labels_path);

    LabeledDataset out;
    out.data = harness::attach_labels(seqs, labels);
    out.train = cfg.train;
    out.train.seed = seed;
    out.train.embedder.D = seqs.front().feature_count();
    const bool hfe = out.train.embedder.kind == mqaformer::EmbedderKind::kHfe ||
                     out.train.embedder.kind == mqaformer::EmbedderKind::kHfeA;
    if (hfe) {
        out.train.embedder.body_parts = choose_partition(cfg, seqs.front().joint_count);
    }
    return out;
}

}  // namespace

RunManifest cmd_train(const CliConfig& cfg, const std::string& input_dir,
                      const std::string& labels_path, const std::string& out_dir,
                      std::uint64_t seed) {
    fs::create_directories(out_dir);
    const LabeledDataset ds = prepare_labeled(cfg, input_dir, labels_path, seed);

    RunManifest manifest;
    manifest.command = "train";
    manifest.config_hash = config_hash(cfg);
    manifest.seed = seed;
    manifest.inputs = {input_dir, labels_path};
    manifest.timestamp = iso_timestamp();

    const auto [train_set, val_set] = harness::split_for_training(ds.train, ds.data);
    Stopwatch watch;
    const harness::TrainingResult result =
        harness::train_scorer_on(ds.train, train_set, val_set);
    manifest.timing_ms["train"] = watch.ms();
    manifest.timing_ms["ms_per_batch"] = result.ms_per_batch;

    result.model.save((fs::path(out_dir) / "scorer.ckpt").string());
    manifest.artifacts.push_back("scorer.ckpt");
    harness::write_training_log_csv((fs::path(out_dir) / "training_log.csv").string(),
                                    result.log);
    manifest.artifacts.push_back("training_log.csv");

    json summary;
    summary["kind"] = "train_summary";
    summary["epochs"] = result.log.size();
    summary["best_epoch"] = result.best_epoch;
    summary["best_val_loss"] = result.best_val_loss;
    summary["train_mae"] = harness::evaluate_mae(result.model, train_set);
    summary["val_mae"] = harness::evaluate_mae(result.model, val_set);
    summary["n_train"] = train_set.size();
    summary["n_val"] = val_set.size();
    write_text((fs::path(out_dir) / "train_summary.json").string(), json_text(summary));
    manifest.artifacts.push_back("train_summary.json");

    write_manifest(out_dir, manifest);
    return manifest;
}

RunManifest cmd_eval(const CliConfig& cfg, const std::string& input_dir,
                     const std::string& labels_path, const std::string& model_path,
                     const std::string& out_dir, std::uint64_t seed) {
    fs::create_directories(out_dir);
    const LabeledDataset ds = prepare_labeled(cfg, input_dir, labels_path, seed);
    const mqaformer::ScorerModel model = mqaformer::ScorerModel::load(model_path);

    RunManifest manifest;
    manifest.command = "eval";
    manifest.config_hash = config_hash(cfg);
    manifest.seed = seed;
    manifest.inputs = {input_dir, labels_path, model_path};
    manifest.timestamp = iso_timestamp();

    Stopwatch watch;
    const auto [train_set, val_set] = harness::split_for_training(ds.train, ds.data);
    json j;
    j["kind"] = "eval";
    j["mae_all"] = harness::evaluate_mae(model, ds.data);
    j["mae_validation_split"] = harness::evaluate_mae(model, val_set);
    j["n"] = ds.data.size();
    j["n_validation"] = val_set.size();
    manifest.timing_ms["eval"] = watch.ms();

    write_text((fs::path(out_dir) / "eval.json").string(), json_text(j));
    manifest.artifacts.push_back("eval.json");

    write_manifest(out_dir, manifest);
    return manifest;
}

RunManifest cmd_ablate(const CliConfig& cfg, const std::string& input_dir,
                       const std::string& labels_path, const std::string& out_dir,
                       std::uint64_t seed) {
    fs::create_directories(out_dir);
    const LabeledDataset base = prepare_labeled(cfg, input_dir, labels_path, seed);

    RunManifest manifest;
    manifest.command = "ablate";
    manifest.config_hash = config_hash(cfg);
    manifest.seed = seed;
    manifest.inputs = {input_dir, labels_path};
    manifest.timestamp = iso_timestamp();

    const std::vector<skeldata::SkeletalSequence> seqs =
        load_dataset_dir(input_dir, cfg.format);
    json rows = json::array();
    std::string csv = "embedder,mean_mae,runs\n";
    char buf[64];
    for (mqaformer::EmbedderKind kind :
         {mqaformer::EmbedderKind::kMlp, mqaformer::EmbedderKind::kCnn,
          mqaformer::EmbedderKind::kHfe, mqaformer::EmbedderKind::kHfeA}) {
        harness::TrainConfig tcfg = base.train;
        tcfg.embedder.kind = kind;
        const bool hfe = kind == mqaformer::EmbedderKind::kHfe ||
                         kind == mqaformer::EmbedderKind::kHfeA;
        if (hfe && tcfg.embedder.body_parts.parts.empty()) {
            tcfg.embedder.body_parts =
                choose_partition(cfg, seqs.front().joint_count);
        }

        Stopwatch watch;
        const harness::EvalReport report = harness::run_experiment(tcfg, base.data);
        const std::string name = mqaformer::to_string(kind);
        manifest.timing_ms[name + "_total"] = watch.ms();
        manifest.timing_ms[name + "_ms_per_batch"] = report.ms_per_batch;

        std::snprintf(buf, sizeof buf, "%s,%.6f,%zu\n", name.c_str(), report.mean_mae,
                      report.runs.size());
        csv += buf;
        json row;
        row["embedder"] = name;
        row["mean_mae"] = report.mean_mae;
        json per_run = json::array();
        for (const harness::RunResult& r : report.runs) {
            per_run.push_back(r.failed ? json{{"failed", true}, {"error", r.error}}
                                       : json{{"mae", r.mae}});
        }
        row["runs"] = std::move(per_run);
        rows.push_back(std::move(row));
    }

    write_text((fs::path(out_dir) / "ablate.csv").string(), csv);
    manifest.artifacts.push_back("ablate.csv");
    json j;
    j["kind"] = "ablate";
    j["rows"] = std::move(rows);
    write_text((fs::path(out_dir) / "ablate.json").string(), json_text(j));
    manifest.artifacts.push_back("ablate.json");

    write_manifest(out_dir, manifest);
    return manifest;
}

RunManifest cmd_attention(const CliConfig& cfg, const std::string& model_path,
                          const std::string& sequence_path, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const mqaformer::ScorerModel model = mqaformer::ScorerModel::load(model_path);
    skeldata::SkeletalSequence seq = skeldata::load_sequence(sequence_path, cfg.format);
    seq = resampled(seq, model.config().T);

    RunManifest manifest;
    manifest.command = "attention";
    manifest.config_hash = config_hash(cfg);
    manifest.inputs = {model_path, sequence_path};
    manifest.timestamp = iso_timestamp();

    Stopwatch watch;
    const mqaformer::ScorePrediction pred = mqaformer::predict_score(model, seq);
    manifest.timing_ms["attention"] = watch.ms();

    const std::vector<std::string> csvs = mqaformer::write_attention_csvs(
        (fs::path(out_dir) / "attention").string(), pred.attention,
        model.config().embedder.body_parts.names);
    for (const std::string& p : csvs) {
        manifest.artifacts.push_back(fs::path(p).filename().string());
    }

    json j;
    j["kind"] = "attention_score";
    j["sequence_id"] = seq.id;
    j["score"] = pred.score;
    write_text((fs::path(out_dir) / "score.json").string(), json_text(j));
    manifest.artifacts.push_back("score.json");

    write_manifest(out_dir, manifest);
    return manifest;
}

RunManifest cmd_synth(const CliConfig& cfg, const std::string& out_dir,
                      std::uint64_t seed) {
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.command = "synth";
    manifest.config_hash = config_hash(cfg);
    manifest.seed = seed;
    manifest.timestamp = iso_timestamp();

    Stopwatch watch;
    std::vector<skeldata::SkeletalSequence> seqs;
    std::vector<scoregen::LabeledScore> labels;
    if (cfg.synth_kind == "exercise") {
        seqs = harness::make_correct_incorrect_dataset(cfg.synth_count, cfg.synth_T,
                                                       cfg.synth_joints, seed);
    } else if (cfg.synth_kind == "overfit") {
        for (harness::LabeledSequence& x : harness::make_overfit_dataset(
                 cfg.synth_count, cfg.synth_T, cfg.synth_joints, seed)) {
            labels.push_back({x.sequence.id, x.score});
            seqs.push_back(std::move(x.sequence));
        }
    } else if (cfg.synth_kind == "partsignal") {
        const mqaformer::BodyPartition parts = choose_partition(cfg, cfg.synth_joints);
        for (harness::LabeledSequence& x : harness::make_part_signal_dataset(
                 cfg.synth_count, cfg.synth_T, parts, {0}, seed)) {
            labels.push_back({x.sequence.id, x.score});
            seqs.push_back(std::move(x.sequence));
        }
    } else {
        throw ConfigError("synth: unknown kind \"" + cfg.synth_kind + "\"");
    }
    manifest.timing_ms["synth"] = watch.ms();

    for (const skeldata::SkeletalSequence& s : seqs) {
        const std::string name = s.id + ".txt";
        skeldata::save_sequence((fs::path(out_dir) / name).string(), s);
        manifest.artifacts.push_back(name);
    }
    if (!labels.empty()) {
        scoregen::write_label_csv((fs::path(out_dir) / "labels.csv").string(), labels);
        manifest.artifacts.push_back("labels.csv");
    }

    write_manifest(out_dir, manifest);
    return manifest;
}

}  // namespace mqa::cli
