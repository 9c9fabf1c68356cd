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

#include "dsweep/weights.hpp"

#include <algorithm>
#include <limits>

#include "dsweep/errors.hpp"

namespace dsweep {

namespace {

using ConstMap = Eigen::Map<const Vector>;

ConstMap as_vector(std::span<const double> v) {
  return ConstMap(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Index g_dim(const Trace& trace) {
  return static_cast<Eigen::Index>(trace.layout().g_dim);
}
Eigen::Index f_dim(const Trace& trace) {
  return static_cast<Eigen::Index>(trace.layout().f_dim);
}

// Rows are gbar(X_t) = g(X_t) - mean over t < n of g; row n is the zero
// prefix sentinel. prefix.row(s) = sum_{t < s} gbar(X_t).
Matrix centered_prefix(const Trace& trace, std::size_t n) {
  const Eigen::Index d = g_dim(trace);
  Vector mean = Vector::Zero(d);
  for (std::size_t t = 0; t < n; ++t) mean += as_vector(trace.g(t));
  mean /= static_cast<double>(n);
  Matrix prefix(static_cast<Eigen::Index>(n) + 1, d);
  prefix.row(0).setZero();
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    prefix.row(row + 1) = prefix.row(row) + (as_vector(trace.g(t)) - mean).transpose();
  }
  return prefix;
}

// sum_{t' = lo}^{hi} gbar(X_t'), empty when lo > hi.
Eigen::RowVectorXd window(const Matrix& prefix, std::size_t lo, std::size_t hi) {
  if (lo > hi) return Eigen::RowVectorXd::Zero(prefix.cols());
  return prefix.row(static_cast<Eigen::Index>(hi) + 1) -
         prefix.row(static_cast<Eigen::Index>(lo));
}

}  // namespace

Matrix estimate_U(const Trace& trace) {
  const std::size_t M = trace.size();
  if (M < 2) throw ConfigError("estimating U needs at least two draws");
  const Eigen::Index p = f_dim(trace);
  Matrix U = Matrix::Zero(p, p);
  Vector diff(p);
  for (std::size_t t = 0; t + 1 < M; ++t) {
    diff = as_vector(trace.f(t + 1)) - as_vector(trace.cond_f(t));
    U.noalias() += diff * diff.transpose();
  }
  return U / static_cast<double>(M - 1);
}

Matrix estimate_V_gibbs(const Trace& trace, bool force) {
  if (!trace.layout().gibbs_kernels && !force) {
    throw UnsupportedError(
        "the Gibbs shortcut for V is inconsistent for non-Gibbs kernels; use "
        "batch means");
  }
  const std::size_t M = trace.size();
  if (M == 0) throw ConfigError("estimating V needs a non-empty trace");
  const Matrix prefix = centered_prefix(trace, M);
  Matrix V = Matrix::Zero(f_dim(trace), g_dim(trace));
  for (std::size_t t = 0; t < M; ++t) {
    V.noalias() += as_vector(trace.f(t)) * window(prefix, t, t);
  }
  return V / static_cast<double>(M);
}

Matrix estimate_V_batch(const Trace& trace, std::size_t B) {
  const std::size_t M = trace.size();
  if (M == 0) throw ConfigError("estimating V needs a non-empty trace");
  const Matrix prefix = centered_prefix(trace, M);
  const std::size_t last = M - 1;
  Matrix V = Matrix::Zero(f_dim(trace), g_dim(trace));
  for (std::size_t t = 0; t < M; ++t) {
    const std::size_t hi = B >= last - t ? last : t + B;
    V.noalias() += as_vector(trace.f(t)) * window(prefix, t, hi);
    if (t < last) {
      const std::size_t hi2 = B >= last - t - 1 ? last : t + 1 + B;
      V.noalias() -= as_vector(trace.cond_f(t)) * window(prefix, t + 1, hi2);
    }
  }
  return V / static_cast<double>(M);
}

std::pair<Matrix, Matrix> estimate_Uk_Vk(const Trace& trace, KernelIndex k,
                                         std::size_t B) {
  if (trace.layout().schedule != ScheduleKind::Deterministic) {
    throw UnsupportedError("per-kernel moments need a deterministic sweep");
  }
  const auto K = static_cast<std::size_t>(trace.layout().num_kernels);
  if (k.value() < 1 || k.slot() >= K) throw ConfigError("kernel index out of range");
  const std::size_t N = trace.size() / K;
  if (N < 2) throw ConfigError("per-kernel moments need at least two full sweeps");
  const std::size_t n_total = N * K;
  const std::size_t last = n_total - 1;
  const std::size_t kk = static_cast<std::size_t>(k.value());
  const Eigen::Index p = f_dim(trace);

  // Kernel k maps X_{k-1+Kn} to X_{k+Kn}.
  Matrix U = Matrix::Zero(p, p);
  Vector diff(p);
  for (std::size_t n = 0; n + 1 < N; ++n) {
    const std::size_t out = kk + K * n;
    diff = as_vector(trace.f(out)) - as_vector(trace.cond_f(out - 1));
    U.noalias() += diff * diff.transpose();
  }
  U /= static_cast<double>(N - 1);

  const Matrix prefix = centered_prefix(trace, n_total);
  Matrix V = Matrix::Zero(p, g_dim(trace));
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t out = kk + K * n;
    if (out > last) continue;  // k = K, final sweep: no output recorded
    const std::size_t hi = B >= last - out ? last : out + B;
    const auto tail = window(prefix, out, hi);
    V.noalias() += as_vector(trace.f(out)) * tail;
    V.noalias() -= as_vector(trace.cond_f(out - 1)) * tail;
  }
  V /= static_cast<double>(N);
  return {U, V};
}

Matrix psd_pinv(const Matrix& a, double tol, int* rank) {
  if (a.rows() != a.cols()) throw ConfigError("pseudoinverse needs a square matrix");
  if (!a.allFinite()) throw ConfigError("pseudoinverse input has non-finite entries");
  if (!(tol >= 0.0)) throw ConfigError("truncation tolerance must be non-negative");
  const Matrix sym = 0.5 * (a + a.transpose());
  Matrix result = Matrix::Zero(a.rows(), a.cols());
  int kept = 0;
  if (a.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    const Vector& lambda = solver.eigenvalues();
    const double cutoff = tol * lambda.maxCoeff();
    if (lambda.maxCoeff() > 0.0) {
      const Matrix& Q = solver.eigenvectors();
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > cutoff) {
          result.noalias() += (Q.col(i) / lambda(i)) * Q.col(i).transpose();
          ++kept;
        }
      }
    }
  }
  if (rank != nullptr) *rank = kept;
  return result;
}

const char* moment_mode_name(MomentMode mode) {
  switch (mode) {
    case MomentMode::FixedGibbs: return "fixed_gibbs";
    case MomentMode::FixedBatch: return "fixed_batch";
    case MomentMode::PerKernelBatch: return "per_kernel_batch";
  }
  return "?";
}

MomentEstimate estimate_moments(const Trace& trace, MomentMode mode,
                                std::size_t B, bool force_gibbs_v) {
  MomentEstimate m;
  m.mode = mode;
  m.B = B;
  switch (mode) {
    case MomentMode::FixedGibbs:
      m.B = 0;
      m.U_hat.push_back(estimate_U(trace));
      m.V_hat.push_back(estimate_V_gibbs(trace, force_gibbs_v));
      break;
    case MomentMode::FixedBatch:
      m.U_hat.push_back(estimate_U(trace));
      m.V_hat.push_back(estimate_V_batch(trace, B));
      break;
    case MomentMode::PerKernelBatch:
      for (int k = 1; k <= trace.layout().num_kernels; ++k) {
        auto [U, V] = estimate_Uk_Vk(trace, KernelIndex(k), B);
        m.U_hat.push_back(std::move(U));
        m.V_hat.push_back(std::move(V));
      }
      break;
  }
  return m;
}

WeightSolution solve_weights(const MomentEstimate& moments, double tol) {
  const std::size_t count = moments.U_hat.size();
  if (count == 0 || moments.V_hat.size() != count) {
    throw ConfigError("moment estimate needs matching U and V lists");
  }
  if (moments.mode != MomentMode::PerKernelBatch && count != 1) {
    throw ConfigError("fixed-weight moments hold exactly one U and one V");
  }
  WeightSolution sol;
  sol.truncation_tol = tol;
  sol.mode = moments.mode;
  sol.C_hat.resize(count);
  sol.rank_used = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix& U = moments.U_hat[i];
    const Matrix& V = moments.V_hat[i];
    if (U.rows() != U.cols() || V.rows() != U.rows()) {
      throw ConfigError("U must be p x p and V p x d");
    }
    int rank = 0;
    const Matrix C = psd_pinv(U, tol, &rank) * V;
    sol.rank_used = std::min(sol.rank_used, rank);
    // Kernel k's moments give the weight used with kernel sigma(k).
    sol.C_hat[(i + 1) % count] = C;
  }
  return sol;
}

}  // namespace dsweep
