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

#include "mqa/scoregen/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mqa/errors.hpp"

namespace mqa::scoregen {

ScoringCalibration calibrate_scoring(const std::vector<double>& metrics_correct) {
    if (metrics_correct.size() < 2) {
        throw CalibrationError("calibrate_scoring: need at least 2 metric values");
    }
    const double n = static_cast<double>(metrics_correct.size());
    double mean = 0.0;
    for (double d : metrics_correct) mean += d;
    mean /= n;
    double var = 0.0;
    for (double d : metrics_correct) var += (d - mean) * (d - mean);
    var /= (n - 1.0);
    const double stddev = std::sqrt(var);
    if (!(stddev > 0.0)) {
        throw CalibrationError(
            "calibrate_scoring: metrics have zero variance; collect more varied "
            "correct repetitions");
    }
    ScoringCalibration cal;
    cal.delta = mean + 3.0 * stddev;
    cal.alpha = std::log(19.0) / (3.0 * stddev);
    return cal;
}

double score_from_metric(const ScoringCalibration& cal, double d) {
    if (!(cal.alpha > 0.0)) {
        throw CalibrationError("score_from_metric: calibration alpha must be positive");
    }
    const double z = cal.alpha * (d - cal.delta);
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

double separation_degree(const std::vector<double>& metrics_correct,
                         const std::vector<double>& metrics_incorrect) {
    if (metrics_correct.empty() || metrics_incorrect.empty()) {
        throw DataError("separation_degree: both metric lists must be non-empty");
    }
    double global_min = metrics_correct[0];
    for (double d : metrics_correct) global_min = std::min(global_min, d);
    for (double d : metrics_incorrect) global_min = std::min(global_min, d);

    double mu_cor = 0.0;
    for (double d : metrics_correct) mu_cor += d - global_min;
    mu_cor /= static_cast<double>(metrics_correct.size());
    double mu_inc = 0.0;
    for (double d : metrics_incorrect) mu_inc += d - global_min;
    mu_inc /= static_cast<double>(metrics_incorrect.size());

    const double denom = mu_inc + mu_cor;
    if (denom == 0.0) return 0.0;
    return (mu_inc - mu_cor) / denom;
}

std::vector<LabeledScore> generate_labels(const Autoencoder& ae, const ExerciseModel& model,
                                          const ScoringCalibration& cal,
                                          const std::vector<skeldata::SkeletalSequence>& xs) {
    std::vector<LabeledScore> out;
    out.reserve(xs.size());
    for (const skeldata::SkeletalSequence& x : xs) {
        try {
            const numcore::Tensor z = encode_latent(ae, x);
            const double d = performance_metric(model, z);
            out.push_back({x.id, score_from_metric(cal, d)});
        } catch (const Error& e) {
            throw DataError("generate_labels: sequence " + x.id + ": " + e.what());
        }
    }
    return out;
}

void write_label_csv(const std::string& path, const std::vector<LabeledScore>& labels) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("write_label_csv: cannot open " + path);
    os << "sequence_id,score\n";
    char buf[32];
    for (const LabeledScore& l : labels) {
        std::snprintf(buf, sizeof buf, "%.6f", l.score);
        os << l.sequence_id << ',' << buf << '\n';
    }
    if (!os) throw IoError("write_label_csv: write failed: " + path);
}

std::vector<LabeledScore> load_label_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("load_label_csv: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw ParseError(path + ": empty label file");
    if (line.rfind("sequence_id,score", 0) != 0) {
        throw ParseError(path + ":1: expected header 'sequence_id,score'");
    }
    std::vector<LabeledScore> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::size_t comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": malformed row");
        }
        LabeledScore l;
        l.sequence_id = line.substr(0, comma);
        char* end = nullptr;
        const std::string score_text = line.substr(comma + 1);
        l.score = std::strtod(score_text.c_str(), &end);
        if (end == score_text.c_str()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad score value");
        }
        out.push_back(std::move(l));
    }
    return out;
}

void save_score_model(const std::string& path, const ExerciseModel& model,
                      const ScoringCalibration& cal) {
    nlohmann::json j;
    j["kind"] = "score_model";
    j["components"] = model.components;
    j["latent_dim"] = model.latent_dim;
    j["weights"] = model.weights;
    nlohmann::json means = nlohmann::json::array();
    nlohmann::json covs = nlohmann::json::array();
    for (std::size_t c = 0; c < model.components; ++c) {
        means.push_back(std::vector<double>(model.means[c].data().begin(),
                                            model.means[c].data().end()));
        covs.push_back(std::vector<double>(model.covariances[c].data().begin(),
                                           model.covariances[c].data().end()));
    }
    j["means"] = std::move(means);
    j["covariances"] = std::move(covs);
    j["calibration"] = {{"alpha", cal.alpha}, {"delta", cal.delta}};
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("save_score_model: cannot open " + path);
    os << j.dump(2) << '\n';
}

std::pair<ExerciseModel, ScoringCalibration> load_score_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("load_score_model: cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("load_score_model: " + path + ": " + e.what());
    }
    if (j.value("kind", "") != std::string("score_model")) {
        throw ParseError(path + " is not a score model sidecar");
    }
    ExerciseModel model;
    model.components = j.at("components").get<std::size_t>();
    model.latent_dim = j.at("latent_dim").get<std::size_t>();
    model.weights = j.at("weights").get<std::vector<double>>();
    const std::size_t L = model.latent_dim;
    for (std::size_t c = 0; c < model.components; ++c) {
        model.means.push_back(numcore::Tensor::from_data(
            {L}, j.at("means").at(c).get<std::vector<double>>()));
        model.covariances.push_back(numcore::Tensor::from_data(
            {L, L}, j.at("covariances").at(c).get<std::vector<double>>()));
    }
    model.loglik_trace.push_back(0.0);  // marks the model as fitted
    model.finalize();
    ScoringCalibration cal;
    cal.alpha = j.at("calibration").at("alpha").get<double>();
    cal.delta = j.at("calibration").at("delta").get<double>();
    return {std::move(model), cal};
}

}  // namespace mqa::scoregen
