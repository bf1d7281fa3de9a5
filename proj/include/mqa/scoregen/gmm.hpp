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
#include <vector>

#include "mqa/numcore/tensor.hpp"

namespace mqa::scoregen {

/// Diagonal floor added to every covariance before factorization.
inline constexpr double kCovarianceFloor = 1e-6;

/// Gaussian mixture over latent codes of one exercise's correct repetitions.
struct ExerciseModel {
    std::size_t components = 0;
    std::size_t latent_dim = 0;
    std::vector<double> weights;               // simplex of size components
    std::vector<numcore::Tensor> means;        // components x {L}
    std::vector<numcore::Tensor> covariances;  // components x {L,L}, SPD after flooring
    std::vector<double> loglik_trace;          // total log-likelihood per EM iteration

    // Derived scoring state, rebuilt by finalize().
    std::vector<numcore::Tensor> chol;        // lower Cholesky factors
    std::vector<double> comp_log_const;       // ln w_c - sum ln chol_ii - L/2 ln(2pi)

    /// Recomputes Cholesky factors and log normalizers. Throws
    /// NumericalError if a floored covariance still fails to factor.
    void finalize();
};

/// EM fit on n-by-L latent codes with k-means++ style seeded initialization.
/// The log-likelihood trace is checked to be non-decreasing at every
/// iteration. Requires n >= C*(L+1).
ExerciseModel fit_gmm_em(const numcore::Tensor& latents, std::size_t C,
                         std::uint64_t seed, std::size_t max_iters = 200,
                         double tol = 1e-7);

/// Bayesian information criterion for a fitted model on its training data:
/// k*ln(n) - 2*loglik with k = (C-1) + C*L + C*L*(L+1)/2.
double gmm_bic(const ExerciseModel& model, const numcore::Tensor& latents);

/// Fits C = 1..max_C (where the sample count allows) and keeps the lowest
/// BIC. Each candidate uses a seed derived from (seed, C). Candidates that
/// degenerate numerically (a collapsed component hitting the covariance
/// floor) are skipped; FitError only when no candidate fits.
ExerciseModel fit_gmm_bic(const numcore::Tensor& latents, std::size_t max_C,
                          std::uint64_t seed, std::size_t max_iters = 200,
                          double tol = 1e-7);

/// ln sum_c w_c N(x; mu_c, Sigma_c), via log-sum-exp over components.
double gmm_log_likelihood(const ExerciseModel& model, const numcore::Tensor& latent);

/// The performance metric: negative log-likelihood of a latent code. Lower
/// means closer to the correct-repetition distribution.
double performance_metric(const ExerciseModel& model, const numcore::Tensor& latent);

}  // namespace mqa::scoregen
