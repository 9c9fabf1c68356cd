// Copyright 2026 The dsweep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact asymptotic-variance computations for enumerated finite chains under a
// deterministic sweep (and, for K = 2, the random sweep). Everything is dense
// linear algebra over |S| states; no series are truncated.
//
// Conventions: P_k^m = P_k P_{sigma(k)} ... P_{sigma^{m-1}(k)}, and the Poisson
// solution ghat_k = sum_{t>=0} P_k^t g satisfies ghat_k - P_k ghat_{sigma(k)} = g.

#pragma once

#include <optional>
#include <vector>

#include "dsweep/linalg.hpp"
#include "dsweep/models.hpp"

namespace dsweep {

struct StationaryDiagnostics {
  double max_row_sum_error = 0.0;
  double max_stationarity_residual = 0.0;
  double min_entry = 0.0;
  // Smallest power of two m with (P_k^K)^m strictly positive for every k.
  std::size_t primitive_power = 0;
};

// Rejects (CertificationError) row-sum or stationarity residuals above 1e-8,
// negative entries, or a sweep composition P_k^K that is not primitive.
StationaryDiagnostics stationary_check(const FiniteModel& model);

struct PoissonSolutions {
  std::vector<Matrix> g_hat;  // slot k-1 holds ghat_k, |S| x d
};

// Solves for ghat_k of the pi-centered table g (rows = states) via the
// fundamental matrices (I - P_l^K + 1 pi^T)^-1. CertificationError when a
// fundamental system is numerically singular.
PoissonSolutions poisson_solve(const FiniteModel& model, const Matrix& g);
PoissonSolutions poisson_solve(const FiniteModel& model);

// max over k, states of |ghat_k - P_k ghat_{sigma(k)} - g|.
double poisson_residual(const FiniteModel& model, const PoissonSolutions& sol,
                        const Matrix& g);

// Kernel composition P_k^m.
Matrix kernel_power(const FiniteModel& model, KernelIndex k, std::size_t m);

struct ExactMoments {
  std::vector<Matrix> U_k;  // p x p
  std::vector<Matrix> V_k;  // p x d, built from ghat_{sigma(k)}
  Matrix U;                 // K^-1 sum U_k
  Matrix V;                 // K^-1 sum V_k
};

ExactMoments exact_moments(const FiniteModel& model, const PoissonSolutions& sol);

// E_pi[a b^T] for tables with one row per state.
Matrix pi_cross(const Vector& pi, const Matrix& a, const Matrix& b);

// Sigma_C for per-kernel weights (weights[k-1] is C_k; pass K equal matrices
// for a fixed weight). Symmetrized.
Matrix exact_sigma(const FiniteModel& model, const PoissonSolutions& sol,
                   const ExactMoments& moments, const std::vector<Matrix>& weights);
Matrix exact_sigma(const FiniteModel& model, const PoissonSolutions& sol,
                   const ExactMoments& moments, const Matrix& C);

enum class WeightPreset { Zero, Identity, TwoIdentity, OptimalFixed, OptimalPerKernel };

// Preset weights. Identity and TwoIdentity need p = d.
std::vector<Matrix> preset_weights(const FiniteModel& model,
                                   const ExactMoments& moments, WeightPreset preset);

// pinv(U) V.
Matrix optimal_fixed_weight(const ExactMoments& moments);
// C[sigma(k)-1] = pinv(U_k) V_k.
std::vector<Matrix> optimal_per_kernel_weights(const ExactMoments& moments);

// Random-sweep pieces, K = 2 with Gibbs kernels; Q = (P_1 + P_2)/2.
Matrix random_sweep_kernel(const FiniteModel& model);
// h = g - C^T (f - Q f), one row per state.
Matrix random_sweep_h(const FiniteModel& model, const Matrix& C);
// sum_{t>=1} E_pi[h (Q^t h)^T] via (I - Q + 1 pi^T)^-1.
Matrix random_sweep_tail(const FiniteModel& model, const Matrix& h);
// E_pi[h h^T] + 2 tail: the random-sweep asymptotic variance.
Matrix exact_sigma_rev(const FiniteModel& model, const Matrix& C);
// E_pi[h h^T] + tail: the deterministic-sweep variance written through h.
Matrix exact_sigma_det_via_h(const FiniteModel& model, const Matrix& C);
// Cbar = pinv(U_rev) V_rev, U_rev = E[f f^T] - E[Qf Qf^T], V_rev = E[f (g+Qg)^T].
Matrix optimal_random_sweep_weight(const FiniteModel& model);

struct LwkReport {
  Matrix A;  // E_pi[g g^T]
  Matrix B;  // E_pi[Pi_1 g (Pi_1 g)^T]
  Matrix Sigma0, Sigma1, Sigma2, SigmaLWK, SigmaCtilde;
  Matrix Ctilde;          // pinv(U) V
  Matrix Ctilde_formula;  // 2 (A - B)^-1 A
  double lwk_residual = 0.0;       // |Sigma2 - SigmaLWK|
  double ctilde_gap_residual = 0.0;  // |Sigma_Ctilde - Sigma2 + 2B(A-B)^-1 B|
  double two_one_residual = 0.0;   // |Sigma2 - Sigma1 + (A+3B)/2|
  double one_zero_residual = 0.0;  // |Sigma1 - Sigma0 + (B+3A)/2|
  double weight_residual = 0.0;    // |Ctilde - Ctilde_formula|
  double min_eig_2_minus_ctilde = 0.0;
  double min_eig_1_minus_2 = 0.0;
  double min_eig_0_minus_1 = 0.0;
};

// Two-kernel data-augmentation checks. Requires K = 2, P_2 g = g to 1e-10,
// f = g up to a constant, and E_pi[g g^T] positive definite.
LwkReport lwk_certify(const FiniteModel& model);

struct VarianceReport {
  StationaryDiagnostics diagnostics;
  double poisson_residual = 0.0;
  ExactMoments moments;
  Matrix Sigma0;
  std::optional<Matrix> Sigma1, Sigma2;  // p = d only
  Matrix Ctilde;                         // fixed optimum
  Matrix SigmaCtilde;
  std::vector<Matrix> Ctilde_per_kernel;
  Matrix SigmaCtilde_per_kernel;
  std::optional<Matrix> Cbar, SigmaRev_Cbar, SigmaRev_Ctilde;  // K = 2 Gibbs
  std::optional<LwkReport> lwk;                                // DA chains
};

// Full certification of a model; throws CertificationError when the model
// fails stationary_check or the Poisson solve.
VarianceReport variance_report(const FiniteModel& model);

}  // namespace dsweep
