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

// Acceptance suite: one PASS/FAIL line per criterion, each checked against
// its tolerance and its wall-clock limit. Exit status is the failure count.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <memory>
#include <stdexcept>
#include <random>
#include <string>
#include <vector>

#include "dsweep/estimators.hpp"
#include "dsweep/harness.hpp"
#include "dsweep/linalg.hpp"
#include "dsweep/models.hpp"
#include "dsweep/oracle.hpp"
#include "dsweep/weights.hpp"
#include "support.hpp"

using namespace dsweep;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}


double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  return eig.eigenvalues().minCoeff();
}

Trace stationary_trace(const SweepModel& model, std::size_t M, RngPolicy policy) {
  RandomStream init_rng({policy.master_seed, kInitStreamBase + policy.stream_id});
  return run_chain(model, {ScheduleKind::Deterministic, model.num_kernels()}, M,
                   model.initial_state(init_rng), policy);
}

// Gibbs test chains with f = g, where Sigma_1 is defined.
std::vector<testing::NamedChain> gibbs_chains_f_equals_g() {
  std::vector<testing::NamedChain> out;
  for (auto& c : testing::gibbs_test_chains()) {
    const FiniteModel& m = c.model;
    out.push_back({c.name, FiniteModel(m.labels(), m.kernels(), m.pi(), m.g_values(),
                                       m.g_values(), KernelKind::Gibbs, c.name)});
  }
  return out;
}

Outcome poisson_identity() {
  std::vector<FiniteModel> chains{build_finite_ising(2, 0.4, IsingSweep::Checkerboard),
                                  build_finite_ising(2, 0.4, IsingSweep::Raster)};
  for (std::uint64_t s : {11u, 12u, 13u}) chains.push_back(testing::random_da_chain(s));
  double worst = 0.0;
  for (const FiniteModel& m : chains) {
    worst = std::max(worst, poisson_residual(m, poisson_solve(m), m.g_values()));
  }
  return {worst <= 1e-10, fmt("max residual %.2e <= 1e-10 over %zu chains", worst, chains.size())};
}

Outcome rao_blackwell_identity() {
  double worst = 0.0, worst_eig = INFINITY;
  for (const auto& c : gibbs_chains_f_equals_g()) {
    const FiniteModel& m = c.model;
    const auto sol = poisson_solve(m);
    const auto mom = exact_moments(m, sol);
    const Matrix S0 = exact_sigma(m, sol, mom, Matrix::Zero(1, 1));
    const Matrix S1 = exact_sigma(m, sol, mom, Matrix::Identity(1, 1));
    Matrix rhs = S0 - pi_cross(m.pi(), m.g_values(), m.g_values());
    for (const Matrix& P : m.kernels()) {
      const Matrix Pg = P * m.g_values();
      rhs -= pi_cross(m.pi(), Pg, Pg) / m.num_kernels();
    }
    worst = std::max(worst, max_abs(S1 - rhs));
    worst_eig = std::min(worst_eig, min_eig(S0 - S1));
  }
  return {worst <= 1e-10 && worst_eig >= -1e-9,
          fmt("identity residual %.2e <= 1e-10; min eig(S0 - S1) = %.3g >= 0", worst, worst_eig)};
}

Outcome lwk_identities() {
  const FiniteModel m = testing::random_da_chain(11);
  const LwkReport r = lwk_certify(m);
  // Right-hand sides from A and B alone.
  const Matrix AB = r.A - r.B;
  const double gap = max_abs((r.SigmaCtilde - r.Sigma2) + 2 * r.B * AB.inverse() * r.B);
  const double two_one = max_abs((r.Sigma2 - r.Sigma1) + 0.5 * (r.A + 3 * r.B));
  const double one_zero = max_abs((r.Sigma1 - r.Sigma0) + 0.5 * (r.B + 3 * r.A));
  const double lwk = max_abs(r.Sigma2 - r.SigmaLWK);
  const double worst = std::max({gap, two_one, one_zero, lwk, r.weight_residual});
  const bool order = r.min_eig_2_minus_ctilde >= -1e-9 && r.min_eig_1_minus_2 > 0.0 &&
                     r.min_eig_0_minus_1 > 0.0;
  return {worst <= 1e-10 && order,
          fmt("max identity residual %.2e <= 1e-10; eigs S2-SC %.3g, S1-S2 %.3g, S0-S1 %.3g",
              worst, r.min_eig_2_minus_ctilde, r.min_eig_1_minus_2, r.min_eig_0_minus_1)};
}

Outcome random_sweep() {
  std::mt19937_64 gen(4242);
  double worst_tail = 0.0, worst_route = 0.0, worst_gap = 0.0, worst_gap_pinv = 0.0;
  double min_order = INFINITY;
  for (const auto& c : testing::gibbs_test_chains()) {
    const FiniteModel& m = c.model;
    if (m.num_kernels() != 2) continue;
    const auto sol = poisson_solve(m);
    const auto mom = exact_moments(m, sol);
    const auto p = static_cast<Eigen::Index>(m.f_dim());
    const auto d = static_cast<Eigen::Index>(m.g_dim());
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix C = testing::random_matrix(gen, p, d, 1.0);
      const Matrix tail = random_sweep_tail(m, random_sweep_h(m, C));
      const Matrix rev = exact_sigma_rev(m, C);
      worst_tail = std::max(worst_tail, max_abs(rev - exact_sigma(m, sol, mom, C) - tail));
      worst_route = std::max(worst_route, testing::relative_error(rev, testing::homogeneous_random_sigma(m, C)));
    }
    const Matrix Ct = optimal_fixed_weight(mom);
    const Matrix Cb = optimal_random_sweep_weight(m);
    const Matrix diff = Cb - Ct;
    const Matrix gap = exact_sigma(m, sol, mom, Ct) - exact_sigma_rev(m, Cb);
    const Matrix tail_b = random_sweep_tail(m, random_sweep_h(m, Cb));
    worst_gap = std::max(worst_gap, max_abs(gap + diff.transpose() * mom.U * diff + tail_b));
    worst_gap_pinv = std::max(worst_gap_pinv,
                              max_abs(gap + diff.transpose() * psd_pinv(mom.U) * diff + tail_b));
    min_order = std::min(min_order, min_eig(-gap));
  }
  const bool pass = worst_tail <= 1e-9 && worst_route <= 1e-9 && worst_gap <= 1e-9 && min_order >= -1e-9;
  return {pass, fmt("rev - det - tail %.2e; rev vs Q-chain route %.2e; optimal gap %.2e "
                    "(U-dagger form differs by %.2e, info); min eig(rev - det) %.3g",
                    worst_tail, worst_route, worst_gap, worst_gap_pinv, min_order)};
}

Outcome optimality() {
  std::mt19937_64 gen(5151);
  double worst = INFINITY;
  std::size_t chains = 0;
  for (const auto& c : testing::all_test_chains()) {
    const FiniteModel& m = c.model;
    const auto sol = poisson_solve(m);
    const auto mom = exact_moments(m, sol);
    const Matrix best = exact_sigma(m, sol, mom, optimal_fixed_weight(mom));
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix C = testing::random_matrix(gen, static_cast<Eigen::Index>(m.f_dim()),
                                              static_cast<Eigen::Index>(m.g_dim()), 2.0);
      worst = std::min(worst, min_eig(exact_sigma(m, sol, mom, C) - best));
    }
    ++chains;
  }
  return {worst >= -1e-9, fmt("min eig(S_C - S_Ctilde) = %.3g >= -1e-9 over %zu chains x 100 C",
                              worst, chains)};
}

Outcome monte_carlo_variance() {
  const FiniteModel m = testing::random_da_chain(11);
  const auto sol = poisson_solve(m);
  const auto mom = exact_moments(m, sol);
  const Matrix Ct = optimal_fixed_weight(mom);
  const double oracle[4] = {exact_sigma(m, sol, mom, Matrix::Zero(1, 1))(0, 0),
                            exact_sigma(m, sol, mom, Matrix::Identity(1, 1))(0, 0),
                            lwk_certify(m).SigmaLWK(0, 0), exact_sigma(m, sol, mom, Ct)(0, 0)};
  const char* names[4] = {"empirical", "rb", "lwk", "fixed"};
  std::vector<double> draws[4];
  const std::size_t M = 10000;
  const double scale = std::sqrt(static_cast<double>(M));
  for (std::uint64_t r = 0; r < 500; ++r) {
    const Trace t = stationary_trace(m, M, {606, r});
    draws[0].push_back(scale * empirical_mean(t).mean(0));
    draws[1].push_back(scale * rao_blackwell_mean(t).mean(0));
    draws[2].push_back(scale * lwk_mean(t).mean(0));
    draws[3].push_back(scale * fixed_cv_mean(t, Ct).mean(0));
  }
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 4; ++i) {
    const double rel = testing::sample_variance(draws[i]) / oracle[i] - 1.0;
    pass = pass && std::abs(rel) <= 0.2;
    detail += fmt("%s%s %+.1f%%", i ? ", " : "", names[i], 100 * rel);
  }
  return {pass, "relative variance error (limit 20%): " + detail};
}

const MseRow& find_row(const MseReport& r, double param, const std::string& est) {
  for (const MseRow& row : r.rows) {
    if (std::abs(std::stod(row.param) - param) < 1e-12 && row.estimator == est) return row;
  }
  throw std::runtime_error("missing row");
}

Outcome bvn_ordering() {
  const auto c = parse_experiment_config({{"model", {{"type", "bvn"}, {"rho_grid", {0.3, 0.7}},
                                                     {"integrand", "x2"}}},
                                          {"estimators", {"empirical", "rb", "lwk", "fixed"}},
                                          {"M", 2000},
                                          {"reps", 200},
                                          {"master_seed", 7}});
  const MseReport r = run_experiment(c);
  bool pass = true;
  std::string detail;
  for (double rho : {0.3, 0.7}) {
    const double e = find_row(r, rho, "empirical").mse, rb = find_row(r, rho, "rb").mse;
    const double lwk = find_row(r, rho, "lwk").mse, fixed = find_row(r, rho, "fixed").mse;
    pass = pass && e > rb && rb > lwk && fixed <= 1.2 * lwk;
    detail += fmt("%srho=%.1f: emp %.3g > rb %.3g > lwk %.3g, fixed %.3g <= 1.2 lwk",
                  detail.empty() ? "" : "; ", rho, e, rb, lwk, fixed);
  }
  return {pass, detail};
}

Outcome eigenfunction() {
  const auto c = parse_experiment_config({{"model", {{"type", "bvn"}, {"rho_grid", {0.5}},
                                                     {"integrand", "sum"}}},
                                          {"estimators", {"empirical", "fixed"}},
                                          {"M", 2000},
                                          {"reps", 100},
                                          {"master_seed", 8}});
  const MseReport r = run_experiment(c);
  const double e = find_row(r, 0.5, "empirical").mse, f = find_row(r, 0.5, "fixed").mse;
  return {f <= 0.01 * e, fmt("fixed MSE %.3g <= 1%% of empirical MSE %.3g (ratio %.2e)", f, e, f / e)};
}

Outcome batch_zero() {
  const auto c = parse_experiment_config({{"model", {{"type", "ising"}, {"n", 3}, {"eta_grid", {0.3}},
                                                     {"update", "gibbs"}, {"sweep", "checkerboard"}}},
                                          {"estimators", {"rb", "fixed_batch"}},
                                          {"weights", {{"B", 0}}},
                                          {"sweeps", 2000},
                                          {"reps", 100},
                                          {"master_seed", 9}});
  const MseReport r = run_experiment(c);
  const double rb = find_row(r, 0.3, "rb").mse;
  const double b0 = find_row(r, 0.3, "fixed_batch").mse;
  const bool close = std::abs(b0 / rb - 1.0) <= 0.1;

  IsingModel model(3, 0.3, IsingUpdate::Gibbs, IsingSweep::Checkerboard);
  std::vector<double> medians;
  for (std::size_t M : {1000u, 10000u, 100000u}) {
    std::vector<double> dist;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Trace t = stationary_trace(model, M, {900 + seed, 0});
      const Matrix C = solve_weights(estimate_moments(t, MomentMode::FixedBatch, 0)).C_hat[0];
      dist.push_back(max_abs(C - Matrix::Identity(1, 1)));
    }
    std::sort(dist.begin(), dist.end());
    medians.push_back(0.5 * (dist[9] + dist[10]));
  }
  const bool ladder = medians[1] < medians[0] && medians[2] < medians[1];
  return {close && ladder,
          fmt("B=0 MSE %.7g vs rb %.7g (%+.2f%%, limit 10%%); median |C-I| %.3g > %.3g > %.3g", b0,
              rb, 100 * (b0 / rb - 1.0), medians[0], medians[1], medians[2])};
}

bool bit_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

Outcome exact_identities() {
  std::mt19937_64 gen(1010);
  std::vector<std::unique_ptr<SweepModel>> models;
  for (auto& c : testing::all_test_chains()) models.push_back(std::make_unique<FiniteModel>(c.model));
  for (auto integrand : {BvnIntegrand::X2, BvnIntegrand::Quadratic, BvnIntegrand::Sum}) {
    models.push_back(std::make_unique<BvnModel>(0.6, integrand));
  }
  models.push_back(std::make_unique<IsingModel>(3, 0.3, IsingUpdate::Gibbs, IsingSweep::Raster));
  models.push_back(std::make_unique<IsingModel>(3, 0.3, IsingUpdate::Metropolis, IsingSweep::Checkerboard));
  int traces = 0, failures = 0;
  for (int i = 0; i < 50; ++i) {
    const SweepModel& m = *models[static_cast<std::size_t>(i) % models.size()];
    const auto p = static_cast<Eigen::Index>(m.f_dim());
    const auto d = static_cast<Eigen::Index>(m.g_dim());
    const Trace t = stationary_trace(m, 500 + static_cast<std::size_t>(i) * 17, {1010, static_cast<std::uint64_t>(i)});
    const Matrix C = testing::random_matrix(gen, p, d, 1.5);
    bool ok = bit_equal(fixed_cv_mean(t, Matrix::Zero(p, d)).mean, empirical_mean(t).mean);
    ok = ok && bit_equal(general_cv_mean(t, std::vector<Matrix>(static_cast<std::size_t>(m.num_kernels()), C)).mean,
                         fixed_cv_mean(t, C).mean);
    if (p == d) {
      // f = g on every model with p = d here.
      ok = ok && bit_equal(fixed_cv_mean(t, Matrix::Identity(p, d)).mean, rao_blackwell_mean(t).mean);
    }
    failures += !ok;
    ++traces;
  }
  return {failures == 0, fmt("%d of %d traces bit-identical on all three identities", traces - failures, traces)};
}

Outcome v_estimators() {
  const double eta = 0.3;
  const std::size_t M = 1000000;
  struct Case {
    IsingUpdate update;
    const char* name;
  };
  bool pass = true;
  std::string detail;
  for (const Case c : {Case{IsingUpdate::Gibbs, "gibbs"}, Case{IsingUpdate::Metropolis, "metropolis"}}) {
    const FiniteModel fin = build_finite_ising(3, eta, IsingSweep::Checkerboard, c.update);
    const Matrix V = exact_moments(fin, poisson_solve(fin)).V;
    const IsingModel model(3, eta, c.update, IsingSweep::Checkerboard);
    const Trace t = stationary_trace(model, M, {1111, c.update == IsingUpdate::Gibbs ? 0u : 1u});
    const double shortcut = testing::relative_error(estimate_V_gibbs(t, true), V);
    const double batch = testing::relative_error(estimate_V_batch(t, 10), V);
    const bool shortcut_ok = c.update == IsingUpdate::Gibbs ? shortcut <= 0.02 : shortcut > 0.10;
    pass = pass && shortcut_ok && batch <= 0.05;
    detail += fmt("%s%s: Gibbs-V err %.2f%% (%s), batch(B=10) err %.2f%% (<= 5%%)",
                  detail.empty() ? "" : "; ", c.name, 100 * shortcut,
                  c.update == IsingUpdate::Gibbs ? "<= 2%" : "> 10%", 100 * batch);
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Poisson identity", 1, poisson_identity},
      {2, "Rao-Blackwell variance identity", 1, rao_blackwell_identity},
      {3, "LWK variance identities", 1, lwk_identities},
      {4, "deterministic vs random sweep", 2, random_sweep},
      {5, "optimality of the fixed weight", 5, optimality},
      {6, "Monte Carlo vs oracle variance", 60, monte_carlo_variance},
      {7, "bivariate normal MSE ordering", 60, bvn_ordering},
      {8, "zero-variance eigenfunction case", 30, eigenfunction},
      {9, "B = 0 matches Rao-Blackwell", 120, batch_zero},
      {10, "estimator exact identities", 5, exact_identities},
      {11, "Gibbs vs Metropolis V estimators", 120, v_estimators},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s [%2d] %s: %s; %.2f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
