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

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mqa/cli/pipelines.hpp"
#include "mqa/errors.hpp"

namespace {

void report(const mqa::cli::RunManifest& manifest, const std::string& out_dir) {
    std::cout << manifest.command << ": wrote " << manifest.artifacts.size()
              << " artifacts, manifest " << out_dir << "/manifest.json\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Movement quality assessment pipeline"};
    app.set_version_flag("--version", mqa::cli::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_flag = 0;
    std::string out_dir = "out";
    app.add_option("--config", config_path, "JSON config file")->envname("MQA_CONFIG");
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_flag, "Override the config seed")
            ->envname("MQA_SEED");
    app.add_option("--out", out_dir, "Output directory")
        ->envname("MQA_OUT")
        ->capture_default_str();

    std::string input_dir;
    std::string labels_path;
    std::string model_path;
    std::string sequence_path;

    CLI::App* c_augment = app.add_subcommand("augment", "Augment a sequence directory");
    c_augment->add_option("--input", input_dir, "Sequence directory")->required();

    CLI::App* c_gen = app.add_subcommand(
        "gen-scores", "Generate quality scores from correct/incorrect repetitions");
    c_gen->add_option("--input", input_dir, "Sequence directory")->required();

    CLI::App* c_train = app.add_subcommand("train", "Train a transformer scorer");
    c_train->add_option("--input", input_dir, "Sequence directory")->required();
    c_train->add_option("--labels", labels_path, "labels.csv with quality scores")
        ->required();

    CLI::App* c_eval = app.add_subcommand("eval", "Evaluate a saved scorer");
    c_eval->add_option("--input", input_dir, "Sequence directory")->required();
    c_eval->add_option("--labels", labels_path, "labels.csv with quality scores")
        ->required();
    c_eval->add_option("--model", model_path, "scorer.ckpt")->required();

    CLI::App* c_ablate =
        app.add_subcommand("ablate", "Compare the four embedding extractors");
    c_ablate->add_option("--input", input_dir, "Sequence directory")->required();
    c_ablate->add_option("--labels", labels_path, "labels.csv with quality scores")
        ->required();

    CLI::App* c_attention =
        app.add_subcommand("attention", "Export attention maps for one sequence");
    c_attention->add_option("--model", model_path, "scorer.ckpt")->required();
    c_attention->add_option("--sequence", sequence_path, "Sequence file")->required();

    CLI::App* c_synth = app.add_subcommand("synth", "Write a synthetic dataset");

    // Global flags may appear before or after the subcommand.
    for (CLI::App* sub :
         {c_augment, c_gen, c_train, c_eval, c_ablate, c_attention, c_synth}) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        mqa::cli::CliConfig cfg;
        if (!config_path.empty()) cfg = mqa::cli::load_cli_config(config_path);
        const std::uint64_t seed =
            seed_opt->count() > 0 ? seed_flag : cfg.train.seed;

        mqa::cli::RunManifest manifest;
        if (c_augment->parsed()) {
            manifest = mqa::cli::cmd_augment(cfg, input_dir, out_dir, seed);
        } else if (c_gen->parsed()) {
            manifest = mqa::cli::cmd_genscores(cfg, input_dir, out_dir, seed);
        } else if (c_train->parsed()) {
            manifest = mqa::cli::cmd_train(cfg, input_dir, labels_path, out_dir, seed);
        } else if (c_eval->parsed()) {
            manifest = mqa::cli::cmd_eval(cfg, input_dir, labels_path, model_path,
                                          out_dir, seed);
        } else if (c_ablate->parsed()) {
            manifest = mqa::cli::cmd_ablate(cfg, input_dir, labels_path, out_dir, seed);
        } else if (c_attention->parsed()) {
            manifest = mqa::cli::cmd_attention(cfg, model_path, sequence_path, out_dir);
        } else if (c_synth->parsed()) {
            manifest = mqa::cli::cmd_synth(cfg, out_dir, seed);
        }
        report(manifest, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
