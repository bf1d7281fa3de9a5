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

#include "mqa/scoregen/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mqa/errors.hpp"
#include "mqa/numcore/rng.hpp"

namespace mqa::scoregen {

using numcore::Rng;
using numcore::Tensor;

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

/// Lower Cholesky factor of an SPD matrix; throws NumericalError otherwise.
Tensor cholesky(const Tensor& a) {
    const std::size_t n = a.rows();
    Tensor l({n, n}, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (sum <= 0.0) {
                    throw NumericalError(
                        "cholesky: matrix not positive definite after flooring");
                }
                l.at(i, j) = std::sqrt(sum);
            } else {
                l.at(i, j) = sum / l.at(j, j);
            }
        }
    }
    return l;
}

/// Squared Mahalanobis distance via forward substitution on the Cholesky
/// factor: solve L y = (x - mu), return |y|^2.
double mahalanobis_sq(const Tensor& chol, const Tensor& x, const Tensor& mu) {
    const std::size_t n = chol.rows();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = x[i] - mu[i];
        for (std::size_t k = 0; k < i; ++k) sum -= chol.at(i, k) * y[k];
        y[i] = sum / chol.at(i, i);
    }
    double acc = 0.0;
    for (double v : y) acc += v * v;
    return acc;
}

double log_sum_exp(const std::vector<double>& xs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : xs) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double sum = 0.0;
    for (double x : xs) sum += std::exp(x - mx);
    return mx + std::log(sum);
}

void add_floor(Tensor& cov) {
    for (std::size_t i = 0; i < cov.rows(); ++i) cov.at(i, i) += kCovarianceFloor;
}

double sq_dist(const Tensor& latents, std::size_t row, const Tensor& center) {
    const std::size_t l = center.size();
    const double* x = latents.data().data() + row * l;
    double acc = 0.0;
    for (std::size_t d = 0; d < l; ++d) {
        const double diff = x[d] - center[d];
        acc += diff * diff;
    }
    return acc;
}

/// k-means++ seeding plus a few Lloyd iterations; returns cluster centers
/// and the final hard assignment.
std::pair<std::vector<Tensor>, std::vector<std::size_t>> kmeans_init(
    const Tensor& latents, std::size_t C, Rng& rng) {
    const std::size_t n = latents.rows();
    const std::size_t L = latents.cols();
    std::vector<Tensor> centers;
    centers.reserve(C);

    const auto row_tensor = [&](std::size_t r) {
        Tensor t({L}, 0.0);
        const double* src = latents.data().data() + r * L;
        std::copy(src, src + L, t.data().data());
        return t;
    };

    centers.push_back(row_tensor(rng.bounded(n)));
    std::vector<double> d2(n, 0.0);
    while (centers.size() < C) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = sq_dist(latents, i, centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c) {
                best = std::min(best, sq_dist(latents, i, centers[c]));
            }
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.bounded(n);
        } else {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(row_tensor(pick));
    }

    std::vector<std::size_t> assign(n, 0);
    for (int iter = 0; iter < 10; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best_c = 0;
            double best = sq_dist(latents, i, centers[0]);
            for (std::size_t c = 1; c < C; ++c) {
                const double d = sq_dist(latents, i, centers[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            assign[i] = best_c;
        }
        for (std::size_t c = 0; c < C; ++c) {
            Tensor mean({L}, 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                const double* x = latents.data().data() + i * L;
                for (std::size_t d = 0; d < L; ++d) mean[d] += x[d];
                ++count;
            }
            if (count > 0) {
                for (std::size_t d = 0; d < L; ++d) {
                    mean[d] /= static_cast<double>(count);
                }
                centers[c] = std::move(mean);
            }
        }
    }
    return {std::move(centers), std::move(assign)};
}

Tensor scatter_matrix(const Tensor& latents, const std::vector<double>& resp,
                      double resp_sum, const Tensor& mean) {
    const std::size_t n = latents.rows();
    const std::size_t L = latents.cols();
    Tensor cov({L, L}, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (resp[i] == 0.0) continue;
        const double* x = latents.data().data() + i * L;
        for (std::size_t a = 0; a < L; ++a) {
            const double da = x[a] - mean[a];
            for (std::size_t b = 0; b <= a; ++b) {
                cov.at(a, b) += resp[i] * da * (x[b] - mean[b]);
            }
        }
    }
    for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            cov.at(a, b) /= resp_sum;
            cov.at(b, a) = cov.at(a, b);
        }
    }
    return cov;
}

}  // namespace

void ExerciseModel::finalize() {
    if (components == 0 || weights.size() != components ||
        means.size() != components || covariances.size() != components) {
        throw ContractError("ExerciseModel::finalize: inconsistent component arrays");
    }
    chol.clear();
    comp_log_const.clear();
    for (std::size_t c = 0; c < components; ++c) {
        Tensor l = cholesky(covariances[c]);
        double log_det_half = 0.0;
        for (std::size_t i = 0; i < latent_dim; ++i) log_det_half += std::log(l.at(i, i));
        comp_log_const.push_back(std::log(std::max(weights[c], 1e-300)) - log_det_half -
                                 0.5 * static_cast<double>(latent_dim) * kLogTwoPi);
        chol.push_back(std::move(l));
    }
}

ExerciseModel fit_gmm_em(const Tensor& latents, std::size_t C, std::uint64_t seed,
                         std::size_t max_iters, double tol) {
    if (latents.ndim() != 2) {
        throw DimensionError("fit_gmm_em: latents must be n-by-L, got " +
                             shape_string(latents));
    }
    const std::size_t n = latents.rows();
    const std::size_t L = latents.cols();
    if (C < 1) throw ParameterError("fit_gmm_em: C must be >= 1");
    if (n < C * (L + 1)) {
        throw FitError("fit_gmm_em: need at least " + std::to_string(C * (L + 1)) +
                       " samples for C=" + std::to_string(C) + ", L=" + std::to_string(L) +
                       ", have " + std::to_string(n));
    }

    ExerciseModel model;
    model.components = C;
    model.latent_dim = L;

    Rng rng(seed);
    auto [centers, assign] = kmeans_init(latents, C, rng);
    model.means = std::move(centers);
    model.weights.assign(C, 0.0);
    for (std::size_t i = 0; i < n; ++i) model.weights[assign[i]] += 1.0;
    for (std::size_t c = 0; c < C; ++c) {
        model.weights[c] = std::max(model.weights[c] / static_cast<double>(n), 1e-6);
    }
    {
        double wsum = 0.0;
        for (double w : model.weights) wsum += w;
        for (double& w : model.weights) w /= wsum;
    }
    for (std::size_t c = 0; c < C; ++c) {
        std::vector<double> hard(n, 0.0);
        double count = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (assign[i] == c) {
                hard[i] = 1.0;
                count += 1.0;
            }
        }
        Tensor cov = count >= 2.0
                         ? scatter_matrix(latents, hard, count, model.means[c])
                         : scatter_matrix(latents, std::vector<double>(n, 1.0),
                                          static_cast<double>(n), model.means[c]);
        add_floor(cov);
        model.covariances.push_back(std::move(cov));
    }
    model.finalize();

    std::vector<std::vector<double>> resp(C, std::vector<double>(n, 0.0));
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // E step.
        double total_ll = 0.0;
        std::vector<double> logp(C);
        for (std::size_t i = 0; i < n; ++i) {
            Tensor x({L}, 0.0);
            const double* src = latents.data().data() + i * L;
            std::copy(src, src + L, x.data().data());
            for (std::size_t c = 0; c < C; ++c) {
                logp[c] = model.comp_log_const[c] -
                          0.5 * mahalanobis_sq(model.chol[c], x, model.means[c]);
            }
            const double lse = log_sum_exp(logp);
            total_ll += lse;
            for (std::size_t c = 0; c < C; ++c) resp[c][i] = std::exp(logp[c] - lse);
        }

        // EM guarantees a non-decreasing likelihood; a drop beyond round-off
        // means the implementation is wrong, so it is asserted every fit.
        if (std::isfinite(prev_ll) &&
            total_ll < prev_ll - 1e-8 * (1.0 + std::abs(prev_ll))) {
            throw NumericalError("fit_gmm_em: log-likelihood decreased from " +
                                 std::to_string(prev_ll) + " to " +
                                 std::to_string(total_ll));
        }
        model.loglik_trace.push_back(total_ll);
        if (std::isfinite(prev_ll) && std::abs(total_ll - prev_ll) < tol) break;
        prev_ll = total_ll;

        // M step.
        for (std::size_t c = 0; c < C; ++c) {
            double nk = 0.0;
            for (std::size_t i = 0; i < n; ++i) nk += resp[c][i];
            if (nk < 1e-10) {
                // Starved component: keep previous parameters, shrink weight.
                model.weights[c] = 1e-10;
                continue;
            }
            model.weights[c] = nk / static_cast<double>(n);
            Tensor mean({L}, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double* x = latents.data().data() + i * L;
                for (std::size_t d = 0; d < L; ++d) mean[d] += resp[c][i] * x[d];
            }
            for (std::size_t d = 0; d < L; ++d) mean[d] /= nk;
            Tensor cov = scatter_matrix(latents, resp[c], nk, mean);
            add_floor(cov);
            model.means[c] = std::move(mean);
            model.covariances[c] = std::move(cov);
        }
        {
            double wsum = 0.0;
            for (double w : model.weights) wsum += w;
            for (double& w : model.weights) w /= wsum;
        }
        model.finalize();
    }
    return model;
}

double gmm_bic(const ExerciseModel& model, const Tensor& latents) {
    if (model.loglik_trace.empty()) throw ContractError("gmm_bic: unfitted model");
    const std::size_t L = model.latent_dim;
    if (latents.ndim() != 2 || latents.cols() != L) {
        throw DimensionError("gmm_bic: latents must be n-by-" + std::to_string(L));
    }
    // The trace entry preceding a max_iters exit belongs to the second-to-last
    // parameter set, so the likelihood of the returned model is recomputed.
    double ll = 0.0;
    Tensor x({L}, 0.0);
    for (std::size_t i = 0; i < latents.rows(); ++i) {
        const double* src = latents.data().data() + i * L;
        std::copy(src, src + L, x.data().data());
        ll += gmm_log_likelihood(model, x);
    }
    const double n = static_cast<double>(latents.rows());
    const double C = static_cast<double>(model.components);
    const double Ld = static_cast<double>(L);
    const double k = (C - 1.0) + C * Ld + C * Ld * (Ld + 1.0) / 2.0;
    return k * std::log(n) - 2.0 * ll;
}

ExerciseModel fit_gmm_bic(const Tensor& latents, std::size_t max_C, std::uint64_t seed,
                          std::size_t max_iters, double tol) {
    if (max_C < 1) throw ParameterError("fit_gmm_bic: max_C must be >= 1");
    const std::size_t n = latents.rows();
    const std::size_t L = latents.cols();
    ExerciseModel best;
    double best_bic = std::numeric_limits<double>::infinity();
    bool fitted = false;
    for (std::size_t C = 1; C <= max_C; ++C) {
        if (n < C * (L + 1)) break;
        ExerciseModel m;
        try {
            m = fit_gmm_em(latents, C, numcore::derive_seed(seed, C), max_iters, tol);
        } catch (const NumericalError&) {
            // A collapsed component hitting the covariance floor can break
            // EM monotonicity; the candidate is degenerate, not fatal.
            continue;
        }
        const double bic = gmm_bic(m, latents);
        if (bic < best_bic) {
            best_bic = bic;
            best = std::move(m);
            fitted = true;
        }
    }
    if (!fitted) {
        throw FitError("fit_gmm_bic: no component count fits this sample");
    }
    return best;
}

double gmm_log_likelihood(const ExerciseModel& model, const Tensor& latent) {
    if (model.chol.size() != model.components) {
        throw ContractError("gmm_log_likelihood: model not finalized");
    }
    if (latent.size() != model.latent_dim) {
        throw DimensionError("gmm_log_likelihood: latent has length " +
                             std::to_string(latent.size()) + ", model expects " +
                             std::to_string(model.latent_dim));
    }
    std::vector<double> logp(model.components);
    for (std::size_t c = 0; c < model.components; ++c) {
        logp[c] = model.comp_log_const[c] -
                  0.5 * mahalanobis_sq(model.chol[c], latent, model.means[c]);
    }
    return log_sum_exp(logp);
}

double performance_metric(const ExerciseModel& model, const Tensor& latent) {
    return -gmm_log_likelihood(model, latent);
}

}  // namespace mqa::scoregen
