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

#include "dsweep/oracle.hpp"

#include <cmath>
#include <sstream>

#include "dsweep/errors.hpp"
#include "dsweep/weights.hpp"

namespace dsweep {

namespace {

constexpr double kCertifyTol = 1e-8;
constexpr double kCenterTol = 1e-10;
constexpr double kExactTol = 1e-10;
constexpr double kMinRcond = 1e-13;

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

std::size_t num_states(const FiniteModel& model) { return model.num_states(); }

Matrix fundamental_matrix_solve(const Matrix& P, const Vector& pi, const Matrix& rhs,
                                const char* what) {
  const auto n = P.rows();
  Matrix A = Matrix::Identity(n, n) - P;
  A.rowwise() += pi.transpose();
  Eigen::PartialPivLU<Matrix> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    std::ostringstream msg;
    msg << what << " is numerically singular (rcond " << rcond
        << "); the chain is not ergodic";
    throw CertificationError(msg.str());
  }
  return lu.solve(rhs);
}

void require_two_gibbs_kernels(const FiniteModel& model) {
  if (model.num_kernels() != 2) {
    throw UnsupportedError("random-sweep comparison is defined for K = 2 only");
  }
  if (!model.gibbs_kernels()) {
    throw UnsupportedError("random-sweep comparison needs Gibbs kernels");
  }
}

// f = g + constant per column (so C = I, f = g presets make sense).
bool f_matches_g(const FiniteModel& model) {
  const Matrix& f = model.f_values();
  const Matrix& g = model.g_values();
  if (f.cols() != g.cols()) return false;
  Matrix centered = f;
  centered.rowwise() -= model.pi().transpose() * f;
  return max_abs(centered - g) <= kExactTol * std::max(1.0, max_abs(g));
}

// E[g g^T] + K^-1 sum_k (E[g (ghat_k - g)^T] + transpose).
Matrix sigma_zero_part(const FiniteModel& model, const PoissonSolutions& sol,
                       const Matrix& g) {
  const Vector& pi = model.pi();
  const int K = model.num_kernels();
  Matrix tail = Matrix::Zero(g.cols(), g.cols());
  for (int k = 0; k < K; ++k) tail += pi_cross(pi, g, sol.g_hat[k] - g);
  tail /= static_cast<double>(K);
  return symmetrize(pi_cross(pi, g, g) + tail + tail.transpose());
}

}  // namespace

Matrix pi_cross(const Vector& pi, const Matrix& a, const Matrix& b) {
  return a.transpose() * pi.asDiagonal() * b;
}

Matrix kernel_power(const FiniteModel& model, KernelIndex k, std::size_t m) {
  const int K = model.num_kernels();
  const auto n = static_cast<Eigen::Index>(num_states(model));
  Matrix result = Matrix::Identity(n, n);
  KernelIndex current = k;
  for (std::size_t i = 0; i < m; ++i) {
    result = result * model.kernel(current);
    current = sigma(current, K);
  }
  return result;
}

StationaryDiagnostics stationary_check(const FiniteModel& model) {
  StationaryDiagnostics diag;
  const Vector& pi = model.pi();
  const int K = model.num_kernels();
  diag.min_entry = pi.minCoeff();
  for (const Matrix& P : model.kernels()) {
    diag.max_row_sum_error = std::max(
        diag.max_row_sum_error, (P.rowwise().sum().array() - 1.0).abs().maxCoeff());
    diag.max_stationarity_residual =
        std::max(diag.max_stationarity_residual,
                 (pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff());
    diag.min_entry = std::min(diag.min_entry, P.minCoeff());
  }
  std::ostringstream problems;
  if (diag.max_row_sum_error > kCertifyTol) {
    problems << "row sums off by " << diag.max_row_sum_error << "; ";
  }
  if (diag.max_stationarity_residual > kCertifyTol) {
    problems << "pi not stationary (residual " << diag.max_stationarity_residual
             << "); ";
  }
  if (diag.min_entry < -kCertifyTol) problems << "negative probabilities; ";
  if (std::abs(pi.sum() - 1.0) > kCertifyTol) problems << "pi does not sum to 1; ";
  if (!problems.str().empty()) {
    throw CertificationError(model.name() + ": " + problems.str());
  }

  // Primitive iff some power is strictly positive; by Wielandt the power
  // (n-1)^2 + 1 suffices, and positivity persists for all larger powers.
  const auto n = static_cast<Eigen::Index>(num_states(model));
  const double wielandt = static_cast<double>(n - 1) * static_cast<double>(n - 1) + 1.0;
  for (int k = 1; k <= K; ++k) {
    Matrix pattern =
        (kernel_power(model, KernelIndex(k), static_cast<std::size_t>(K)).array() > 0.0)
            .cast<double>()
            .matrix();
    std::size_t power = 1;
    while ((pattern.array() <= 0.0).any()) {
      if (static_cast<double>(power) >= wielandt) {
        throw CertificationError(model.name() + ": sweep composition P_" +
                                 std::to_string(k) + "^K is not primitive");
      }
      pattern = ((pattern * pattern).array() > 0.0).cast<double>().matrix();
      power *= 2;
    }
    diag.primitive_power = std::max(diag.primitive_power, power);
  }
  return diag;
}

PoissonSolutions poisson_solve(const FiniteModel& model, const Matrix& g) {
  const Vector& pi = model.pi();
  const auto n = static_cast<Eigen::Index>(num_states(model));
  if (g.rows() != n) throw ConfigError("integrand table needs one row per state");
  if ((pi.transpose() * g).cwiseAbs().maxCoeff() > kCenterTol) {
    throw ConfigError("Poisson solve needs a pi-centered integrand");
  }
  const int K = model.num_kernels();
  std::vector<Matrix> z(static_cast<std::size_t>(K));
  for (int l = 1; l <= K; ++l) {
    const Matrix P = kernel_power(model, KernelIndex(l), static_cast<std::size_t>(K));
    z[static_cast<std::size_t>(l - 1)] =
        fundamental_matrix_solve(P, pi, g, "sweep fundamental system");
  }
  PoissonSolutions sol;
  for (int k = 1; k <= K; ++k) {
    // ghat_k = z_k + P_k (z_{sigma(k)} + P_{sigma(k)} (...)), nested from the
    // innermost term z_{sigma^{K-1}(k)}.
    KernelIndex inner = sigma_power(KernelIndex(k), static_cast<std::uint64_t>(K - 1), K);
    Matrix acc = z[inner.slot()];
    for (int m = K - 2; m >= 0; --m) {
      const KernelIndex km = sigma_power(KernelIndex(k), static_cast<std::uint64_t>(m), K);
      acc = z[km.slot()] + model.kernel(km) * acc;
    }
    sol.g_hat.push_back(std::move(acc));
  }
  return sol;
}

PoissonSolutions poisson_solve(const FiniteModel& model) {
  return poisson_solve(model, model.g_values());
}

double poisson_residual(const FiniteModel& model, const PoissonSolutions& sol,
                        const Matrix& g) {
  const int K = model.num_kernels();
  double worst = 0.0;
  for (int k = 1; k <= K; ++k) {
    const KernelIndex kk(k);
    const Matrix r =
        sol.g_hat[kk.slot()] - model.kernel(kk) * sol.g_hat[sigma(kk, K).slot()] - g;
    worst = std::max(worst, max_abs(r));
  }
  return worst;
}

ExactMoments exact_moments(const FiniteModel& model, const PoissonSolutions& sol) {
  const Vector& pi = model.pi();
  const Matrix& f = model.f_values();
  const int K = model.num_kernels();
  ExactMoments m;
  m.U = Matrix::Zero(f.cols(), f.cols());
  m.V = Matrix::Zero(f.cols(), model.g_values().cols());
  for (int k = 1; k <= K; ++k) {
    const KernelIndex kk(k);
    const Matrix& P = model.kernel(kk);
    const Matrix& next = sol.g_hat[sigma(kk, K).slot()];
    const Matrix Pf = P * f;
    m.U_k.push_back(symmetrize(pi_cross(pi, f, f) - pi_cross(pi, Pf, Pf)));
    m.V_k.push_back(pi_cross(pi, f, next) - pi_cross(pi, Pf, P * next));
    m.U += m.U_k.back();
    m.V += m.V_k.back();
  }
  m.U /= static_cast<double>(K);
  m.V /= static_cast<double>(K);
  return m;
}

Matrix exact_sigma(const FiniteModel& model, const PoissonSolutions& sol,
                   const ExactMoments& moments, const std::vector<Matrix>& weights) {
  const int K = model.num_kernels();
  const auto p = model.f_values().cols();
  const auto d = model.g_values().cols();
  if (weights.size() != static_cast<std::size_t>(K)) {
    throw ConfigError("need one weight matrix per kernel");
  }
  for (const Matrix& C : weights) {
    if (C.rows() != p || C.cols() != d) throw ConfigError("weight matrix must be p x d");
  }
  Matrix correction = Matrix::Zero(d, d);
  for (int k = 1; k <= K; ++k) {
    const KernelIndex kk(k);
    const Matrix& C = weights[sigma(kk, K).slot()];
    const Matrix CV = C.transpose() * moments.V_k[kk.slot()];
    correction += C.transpose() * moments.U_k[kk.slot()] * C - CV - CV.transpose();
  }
  correction /= static_cast<double>(K);
  return symmetrize(sigma_zero_part(model, sol, model.g_values()) + correction);
}

Matrix exact_sigma(const FiniteModel& model, const PoissonSolutions& sol,
                   const ExactMoments& moments, const Matrix& C) {
  return exact_sigma(model, sol, moments,
                     std::vector<Matrix>(static_cast<std::size_t>(model.num_kernels()), C));
}

Matrix optimal_fixed_weight(const ExactMoments& moments) {
  return psd_pinv(moments.U) * moments.V;
}

std::vector<Matrix> optimal_per_kernel_weights(const ExactMoments& moments) {
  const std::size_t K = moments.U_k.size();
  std::vector<Matrix> C(K);
  for (std::size_t k = 0; k < K; ++k) {
    C[(k + 1) % K] = psd_pinv(moments.U_k[k]) * moments.V_k[k];
  }
  return C;
}

std::vector<Matrix> preset_weights(const FiniteModel& model,
                                   const ExactMoments& moments, WeightPreset preset) {
  const auto K = static_cast<std::size_t>(model.num_kernels());
  const auto p = model.f_values().cols();
  const auto d = model.g_values().cols();
  switch (preset) {
    case WeightPreset::Zero: return std::vector<Matrix>(K, Matrix::Zero(p, d));
    case WeightPreset::Identity:
    case WeightPreset::TwoIdentity: {
      if (p != d) throw ConfigError("identity weights need p = d");
      const double scale = preset == WeightPreset::Identity ? 1.0 : 2.0;
      return std::vector<Matrix>(K, scale * Matrix::Identity(p, d));
    }
    case WeightPreset::OptimalFixed:
      return std::vector<Matrix>(K, optimal_fixed_weight(moments));
    case WeightPreset::OptimalPerKernel: return optimal_per_kernel_weights(moments);
  }
  throw ConfigError("unknown weight preset");
}

Matrix random_sweep_kernel(const FiniteModel& model) {
  require_two_gibbs_kernels(model);
  return 0.5 * (model.kernels()[0] + model.kernels()[1]);
}

Matrix random_sweep_h(const FiniteModel& model, const Matrix& C) {
  const Matrix Q = random_sweep_kernel(model);
  const Matrix& f = model.f_values();
  if (C.rows() != f.cols() || C.cols() != model.g_values().cols()) {
    throw ConfigError("weight matrix must be p x d");
  }
  return model.g_values() - (f - Q * f) * C;
}

Matrix random_sweep_tail(const FiniteModel& model, const Matrix& h) {
  const Matrix Q = random_sweep_kernel(model);
  const Vector& pi = model.pi();
  // Z_Q h = sum_{t>=0} Q^t h for pi-centered h.
  const Matrix Zh = fundamental_matrix_solve(Q, pi, h, "random-sweep fundamental system");
  return symmetrize(pi_cross(pi, h, Zh - h));
}

Matrix exact_sigma_rev(const FiniteModel& model, const Matrix& C) {
  const Matrix h = random_sweep_h(model, C);
  return symmetrize(pi_cross(model.pi(), h, h) + 2.0 * random_sweep_tail(model, h));
}

Matrix exact_sigma_det_via_h(const FiniteModel& model, const Matrix& C) {
  const Matrix h = random_sweep_h(model, C);
  return symmetrize(pi_cross(model.pi(), h, h) + random_sweep_tail(model, h));
}

Matrix optimal_random_sweep_weight(const FiniteModel& model) {
  const Matrix Q = random_sweep_kernel(model);
  const Vector& pi = model.pi();
  const Matrix& f = model.f_values();
  const Matrix& g = model.g_values();
  const Matrix Qf = Q * f;
  const Matrix U_rev = symmetrize(pi_cross(pi, f, f) - pi_cross(pi, Qf, Qf));
  const Matrix V_rev = pi_cross(pi, f, g + Q * g);
  return psd_pinv(U_rev) * V_rev;
}

LwkReport lwk_certify(const FiniteModel& model) {
  if (model.num_kernels() != 2) throw ConfigError("LWK checks need K = 2");
  const Matrix& g = model.g_values();
  const Matrix& P1 = model.kernels()[0];
  const Matrix& P2 = model.kernels()[1];
  if (max_abs(P2 * g - g) > kExactTol * std::max(1.0, max_abs(g))) {
    throw ConfigError("data augmentation needs P_2 g = g");
  }
  if (!f_matches_g(model)) throw ConfigError("LWK checks need f = g");
  const Vector& pi = model.pi();
  LwkReport r;
  r.A = symmetrize(pi_cross(pi, g, g));
  if (!(min_symmetric_eigenvalue(r.A) > 0.0)) {
    throw ConfigError("LWK checks need E[g g^T] positive definite");
  }
  const Matrix P1g = P1 * g;
  r.B = symmetrize(pi_cross(pi, P1g, P1g));

  const PoissonSolutions sol = poisson_solve(model);
  const ExactMoments m = exact_moments(model, sol);
  const auto sigma_for = [&](WeightPreset preset) {
    return exact_sigma(model, sol, m, preset_weights(model, m, preset));
  };
  r.Sigma0 = sigma_for(WeightPreset::Zero);
  r.Sigma1 = sigma_for(WeightPreset::Identity);
  r.Sigma2 = sigma_for(WeightPreset::TwoIdentity);
  r.Ctilde = optimal_fixed_weight(m);
  r.SigmaCtilde = exact_sigma(model, sol, m, r.Ctilde);

  // Pi_1 g is pi-centered because P_1 preserves pi.
  const PoissonSolutions lwk_sol = poisson_solve(model, P1g);
  r.SigmaLWK = sigma_zero_part(model, lwk_sol, P1g);

  const Matrix AmB = r.A - r.B;
  const Eigen::FullPivLU<Matrix> lu(AmB);
  r.Ctilde_formula = 2.0 * lu.solve(r.A);
  r.lwk_residual = max_abs(r.Sigma2 - r.SigmaLWK);
  r.ctilde_gap_residual =
      max_abs(r.SigmaCtilde - r.Sigma2 + 2.0 * r.B * lu.solve(r.B));
  r.two_one_residual = max_abs(r.Sigma2 - r.Sigma1 + 0.5 * (r.A + 3.0 * r.B));
  r.one_zero_residual = max_abs(r.Sigma1 - r.Sigma0 + 0.5 * (r.B + 3.0 * r.A));
  r.weight_residual = max_abs(r.Ctilde - r.Ctilde_formula);
  r.min_eig_2_minus_ctilde = min_symmetric_eigenvalue(r.Sigma2 - r.SigmaCtilde);
  r.min_eig_1_minus_2 = min_symmetric_eigenvalue(r.Sigma1 - r.Sigma2);
  r.min_eig_0_minus_1 = min_symmetric_eigenvalue(r.Sigma0 - r.Sigma1);
  return r;
}

VarianceReport variance_report(const FiniteModel& model) {
  VarianceReport r;
  r.diagnostics = stationary_check(model);
  const PoissonSolutions sol = poisson_solve(model);
  r.poisson_residual = poisson_residual(model, sol, model.g_values());
  r.moments = exact_moments(model, sol);
  const auto sigma_for = [&](const std::vector<Matrix>& w) {
    return exact_sigma(model, sol, r.moments, w);
  };
  r.Sigma0 = sigma_for(preset_weights(model, r.moments, WeightPreset::Zero));
  const bool same = f_matches_g(model);
  if (same) {
    r.Sigma1 = sigma_for(preset_weights(model, r.moments, WeightPreset::Identity));
    r.Sigma2 = sigma_for(preset_weights(model, r.moments, WeightPreset::TwoIdentity));
  }
  r.Ctilde = optimal_fixed_weight(r.moments);
  r.SigmaCtilde = exact_sigma(model, sol, r.moments, r.Ctilde);
  r.Ctilde_per_kernel = optimal_per_kernel_weights(r.moments);
  r.SigmaCtilde_per_kernel = sigma_for(r.Ctilde_per_kernel);
  if (model.num_kernels() == 2 && model.gibbs_kernels()) {
    r.Cbar = optimal_random_sweep_weight(model);
    r.SigmaRev_Cbar = exact_sigma_rev(model, *r.Cbar);
    r.SigmaRev_Ctilde = exact_sigma_rev(model, r.Ctilde);
  }
  if (model.data_augmentation() && same &&
      min_symmetric_eigenvalue(pi_cross(model.pi(), model.g_values(),
                                        model.g_values())) > 0.0) {
    r.lwk = lwk_certify(model);
  }
  return r;
}

}  // namespace dsweep
