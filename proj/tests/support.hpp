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

// Test-only chains and reference computations. Nothing here calls the
// library's oracle, so results computed here are an independent route.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dsweep/linalg.hpp"
#include "dsweep/models.hpp"
#include "dsweep/sweep.hpp"

namespace dsweep::testing {

// Strictly positive random table on n1 x n2, entries bounded away from 0.
inline Matrix random_joint(std::uint64_t seed, int n1, int n2) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Matrix J(n1, n2);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) J(a, b) = u(gen);
  return J / J.sum();
}

inline double random_normal(std::mt19937_64& gen) {
  return std::normal_distribution<double>(0.0, 1.0)(gen);
}

// Two-block Gibbs chain where g depends on the second coordinate only, so
// kernel 2 (which redraws the first coordinate) leaves g unchanged. f = g.
inline FiniteModel random_da_chain(std::uint64_t seed, int n1 = 3, int n2 = 3) {
  const Matrix J = random_joint(seed, n1, n2);
  std::mt19937_64 gen(seed ^ 0xabcdefULL);
  Vector h(n2);
  for (int b = 0; b < n2; ++b) h(b) = random_normal(gen);
  Matrix g(n1 * n2, 1);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) g(a * n2 + b, 0) = h(b);
  return build_finite_gibbs(J, g, g);
}

// Two-block Gibbs chain with g depending on both coordinates; f has two
// columns (g and an unrelated function), so p != d.
inline FiniteModel random_gibbs_chain(std::uint64_t seed, int n1 = 3, int n2 = 4) {
  const Matrix J = random_joint(seed, n1, n2);
  std::mt19937_64 gen(seed ^ 0x123457ULL);
  Matrix g(n1 * n2, 1), f(n1 * n2, 2);
  for (int i = 0; i < n1 * n2; ++i) {
    g(i, 0) = random_normal(gen);
    f(i, 0) = g(i, 0);
    f(i, 1) = random_normal(gen);
  }
  return build_finite_gibbs(J, g, f);
}

// K kernels that each redraw the whole state from pi.
inline FiniteModel iid_chain(const Vector& pi, const Matrix& g, int K) {
  const auto n = pi.size();
  Matrix P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) P.row(i) = pi.transpose();
  return FiniteModel({}, std::vector<Matrix>(static_cast<std::size_t>(K), P), pi, g, g,
                     KernelKind::Auto, "iid");
}

struct NamedChain {
  std::string name;
  FiniteModel model;
};

// The finite Gibbs test chains.
inline std::vector<NamedChain> gibbs_test_chains() {
  std::vector<NamedChain> out;
  out.push_back({"ising2_checkerboard",
                 build_finite_ising(2, 0.4, IsingSweep::Checkerboard, IsingUpdate::Gibbs)});
  out.push_back({"ising2_raster",
                 build_finite_ising(2, 0.4, IsingSweep::Raster, IsingUpdate::Gibbs)});
  for (std::uint64_t s : {11u, 12u, 13u}) {
    out.push_back({"da3x3_seed" + std::to_string(s), random_da_chain(s)});
  }
  out.push_back({"gibbs3x4_p2", random_gibbs_chain(21)});
  return out;
}

// All finite test chains, including Metropolis kernels.
inline std::vector<NamedChain> all_test_chains() {
  std::vector<NamedChain> out = gibbs_test_chains();
  out.push_back({"ising2_checkerboard_metropolis",
                 build_finite_ising(2, 0.4, IsingSweep::Checkerboard, IsingUpdate::Metropolis)});
  out.push_back({"ising2_raster_metropolis",
                 build_finite_ising(2, 0.4, IsingSweep::Raster, IsingUpdate::Metropolis)});
  return out;
}

inline Matrix weighted_cross(const Vector& w, const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    out += w(i) * a.row(i).transpose() * b.row(i);
  }
  return out;
}

// Asymptotic covariance of M^-1/2 sum F(Z_t) for a finite irreducible chain
// (periodic allowed) with kernel P and stationary mu; F is mu-centered here.
inline Matrix homogeneous_avar(const Matrix& P, const Vector& mu, Matrix F) {
  const Eigen::RowVectorXd mean = mu.transpose() * F;
  F.rowwise() -= mean;
  const auto n = P.rows();
  Matrix A = Matrix::Identity(n, n) - P + Vector::Ones(n) * mu.transpose();
  const Matrix ZF = A.fullPivLu().solve(F);
  const Matrix cross = weighted_cross(mu, F, ZF - F);
  const Matrix S = weighted_cross(mu, F, F) + cross + cross.transpose();
  return 0.5 * (S + S.transpose());
}

// Lifted chain (phase, x) for the deterministic sweep: phase j means kernel
// j+1 fires next. summand(j, i) returns the per-step term as a row.
template <typename Summand>
Matrix lifted_sweep_avar(const FiniteModel& m, Summand summand, Eigen::Index dim) {
  const int K = m.num_kernels();
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Matrix P = Matrix::Zero(K * n, K * n);
  Vector mu(K * n);
  Matrix F(K * n, dim);
  for (int j = 0; j < K; ++j) {
    const int next = (j + 1) % K;
    P.block(j * n, next * n, n, n) = m.kernels()[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(j * n + i) = m.pi()(i) / K;
      F.row(j * n + i) = summand(j, i);
    }
  }
  return homogeneous_avar(P, mu, F);
}

// Sigma_C by the lifted route; weights[k-1] = C_k.
inline Matrix lifted_sigma(const FiniteModel& m, const std::vector<Matrix>& weights) {
  const int K = m.num_kernels();
  const Matrix& g = m.g_values();
  const Matrix& f = m.f_values();
  std::vector<Matrix> Pf;
  for (const Matrix& P : m.kernels()) Pf.push_back(P * f);
  return lifted_sweep_avar(
      m,
      [&](int j, Eigen::Index i) -> Eigen::RowVectorXd {
        const Matrix& Cout = weights[static_cast<std::size_t>(j)];
        const Matrix& Cin = weights[static_cast<std::size_t>((j + 1) % K)];
        return g.row(i) - f.row(i) * Cout + Pf[static_cast<std::size_t>(j)].row(i) * Cin;
      },
      g.cols());
}

// Variance of the LWK average (Pi_1 g at every step) by the lifted route.
inline Matrix lifted_lwk_sigma(const FiniteModel& m) {
  const Matrix P1g = m.kernels()[0] * m.g_values();
  return lifted_sweep_avar(
      m, [&](int, Eigen::Index i) -> Eigen::RowVectorXd { return P1g.row(i); },
      P1g.cols());
}

// Random sweep with the Q-based correction: the chain is homogeneous with
// kernel Q = K^-1 sum P_k and the per-step term is h = g - C^T (f - Q f).
inline Matrix homogeneous_random_sigma(const FiniteModel& m, const Matrix& C) {
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Matrix Q = Matrix::Zero(n, n);
  for (const Matrix& P : m.kernels()) Q += P;
  Q /= static_cast<double>(m.num_kernels());
  const Matrix& f = m.f_values();
  const Matrix h = m.g_values() - (f - Q * f) * C;
  return homogeneous_avar(Q, m.pi(), h);
}

// sum_{t=0}^{terms-1} P_k^t g with P_k^t = P_k P_{sigma(k)} ...
inline Matrix truncated_poisson(const FiniteModel& m, int k, int terms) {
  const int K = m.num_kernels();
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Matrix prod = Matrix::Identity(n, n);
  Matrix sum = Matrix::Zero(n, m.g_values().cols());
  int kernel = k;
  for (int t = 0; t < terms; ++t) {
    sum += prod * m.g_values();
    prod = prod * m.kernels()[static_cast<std::size_t>(kernel - 1)];
    kernel = kernel % K + 1;
  }
  return sum;
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                            double scale) {
  Matrix C(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) C(i, j) = scale * random_normal(gen);
  return C;
}

// Sample variance (n-1 denominator).
inline double sample_variance(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

inline double relative_error(const Matrix& estimate, const Matrix& truth) {
  return (estimate - truth).norm() / truth.norm();
}

}  // namespace dsweep::testing
