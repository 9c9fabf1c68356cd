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

// Trace-based estimates of the control variate moments U, V (and the
// per-kernel U_k, V_k) and the pseudoinverse weights built from them.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dsweep/estimators.hpp"
#include "dsweep/linalg.hpp"
#include "dsweep/sweep.hpp"

namespace dsweep {

inline constexpr double kDefaultPinvTol = 1e-10;

// (M-1)^-1 sum_{t<M-1} {f(X_{t+1}) - Pi f(X_t)}{.}^T. Needs M >= 2.
Matrix estimate_U(const Trace& trace);

// M^-1 sum f(X_t) gbar(X_t)^T, gbar centered by the trace mean of g.
// Consistent only for Gibbs kernels; other traces are refused with
// UnsupportedError unless `force` is set.
Matrix estimate_V_gibbs(const Trace& trace, bool force = false);

// Batch means estimate with lags 0..B; window ends are capped at M-1.
Matrix estimate_V_batch(const Trace& trace, std::size_t B);

// Per-kernel (U_k, V_k) over the first N = floor(M/K) full sweeps; needs
// N >= 2 and a deterministic schedule. The second sum of V_k starts at the
// output of kernel k, matching the lag-0 term of estimate_V_batch.
std::pair<Matrix, Matrix> estimate_Uk_Vk(const Trace& trace, KernelIndex k,
                                         std::size_t B);

// Moore-Penrose pseudoinverse of the symmetric part of a, dropping
// eigenvalues at or below tol * lambda_max. Writes the kept rank to *rank.
Matrix psd_pinv(const Matrix& a, double tol = kDefaultPinvTol, int* rank = nullptr);

enum class MomentMode { FixedGibbs, FixedBatch, PerKernelBatch };

const char* moment_mode_name(MomentMode mode);

// U_hat, V_hat hold one matrix in the fixed modes, K matrices (slot k-1 for
// kernel k) in PerKernelBatch mode.
struct MomentEstimate {
  std::vector<Matrix> U_hat;
  std::vector<Matrix> V_hat;
  std::size_t B = 0;
  MomentMode mode = MomentMode::FixedGibbs;
};

MomentEstimate estimate_moments(const Trace& trace, MomentMode mode,
                                std::size_t B, bool force_gibbs_v = false);

// C_hat holds one p x d matrix in the fixed modes. In PerKernelBatch mode
// C_hat[sigma(k)-1] = pinv(U_k) V_k, i.e. the list is indexed by the kernel
// the weight is used with. rank_used is the smallest kept rank.
struct WeightSolution {
  std::vector<WeightMatrix> C_hat;
  int rank_used = 0;
  double truncation_tol = kDefaultPinvTol;
  MomentMode mode = MomentMode::FixedGibbs;
};

WeightSolution solve_weights(const MomentEstimate& moments,
                             double tol = kDefaultPinvTol);

}  // namespace dsweep
