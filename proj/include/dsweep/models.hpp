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

// Concrete sweep models: the two-kernel bivariate normal Gibbs sampler, the
// square-lattice Ising model with sitewise or checkerboard sweeps, and
// enumerated finite chains.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dsweep/linalg.hpp"
#include "dsweep/sweep.hpp"

namespace dsweep {

// ---------------------------------------------------------------------------
// Bivariate normal, unit variances, correlation rho. Kernel 1 keeps x1 and
// draws x2 ~ N(rho x1, 1 - rho^2); kernel 2 is the mirror image. The basis
// function is f = g.

enum class BvnIntegrand {
  X2,         // x2
  Quadratic,  // x1^2 + x2^2/3 - 4/3
  Sum,        // x1 + x2
};

// User integrand for the bivariate normal. `cond` must return Pi_k g; leave
// it empty and run_chain will refuse the model.
struct CustomBvnIntegrand {
  std::size_t dim = 1;
  std::function<void(double x1, double x2, std::span<double> out)> value;
  std::function<void(KernelIndex k, double x1, double x2,
                     std::span<double> out)>
      cond;
  bool data_augmentation = false;
};

double bvn_integrand(BvnIntegrand integrand, double x1, double x2);

// Pi_k g at (x1, x2). k must be 1 or 2.
double bvn_cond_exp(double rho, KernelIndex k, BvnIntegrand integrand,
                    double x1, double x2);

class BvnModel final : public SweepModel {
 public:
  BvnModel(double rho, BvnIntegrand integrand);
  BvnModel(double rho, CustomBvnIntegrand custom);

  double rho() const { return rho_; }

  std::string name() const override;
  int num_kernels() const override { return 2; }
  std::size_t state_dim() const override { return 2; }
  std::size_t g_dim() const override;
  std::size_t f_dim() const override { return g_dim(); }
  bool gibbs_kernels() const override { return true; }
  bool data_augmentation() const override;
  bool has_conditional_expectations() const override;

  void check_state(std::span<const double> x) const override;
  void transition(KernelIndex k, std::span<double> x,
                  RandomStream& rng) const override;
  void observe(KernelIndex k, std::span<const double> x,
               const Observation& out) const override;
  void first_kernel_cond_g(std::span<const double> x,
                           std::span<double> out) const override;
  // Exact draw from pi.
  std::vector<double> initial_state(RandomStream& rng) const override;

 private:
  void value(std::span<const double> x, std::span<double> out) const;
  void cond(KernelIndex k, std::span<const double> x,
            std::span<double> out) const;

  double rho_;
  bool builtin_;
  BvnIntegrand integrand_ = BvnIntegrand::X2;
  CustomBvnIntegrand custom_;
};

// ---------------------------------------------------------------------------
// Ising model on an n x n grid with free boundaries, pi(x) ~ exp(eta T(x)).
// Sites are numbered column-major (down each column, then across), which is
// also the raster sweep order. Checkerboard component W_1 holds the sites
// with even row+col, W_2 the rest; kernel k updates every site outside W_k.

class IsingLattice {
 public:
  explicit IsingLattice(int n);

  int side() const { return n_; }
  std::size_t num_sites() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t num_edges() const { return 2 * static_cast<std::size_t>(n_) * (n_ - 1); }
  std::size_t site(int row, int col) const;
  int row_of(std::size_t site) const;
  int col_of(std::size_t site) const;
  // 0 for W_1, 1 for W_2.
  int component(std::size_t site) const;
  std::span<const std::size_t> neighbors(std::size_t site) const;

  // T(x) = sum over edges of x_i x_j.
  double edge_statistic(std::span<const double> x) const;
  // s_i(x) = sum of neighbour values.
  double neighbor_sum(std::span<const double> x, std::size_t site) const;

 private:
  int n_;
  std::vector<std::size_t> neighbor_offsets_;
  std::vector<std::size_t> neighbor_list_;
};

enum class IsingUpdate { Gibbs, Metropolis };
enum class IsingSweep { Raster, Checkerboard };

// P(x_i = +1 | x_{-i}).
double ising_site_conditional(double eta, std::span<const double> x,
                              const IsingLattice& lattice, std::size_t site);

class IsingModel final : public SweepModel {
 public:
  IsingModel(int n, double eta, IsingUpdate update, IsingSweep sweep,
             double proposal_prob = 0.9);

  const IsingLattice& lattice() const { return lattice_; }
  double eta() const { return eta_; }
  IsingUpdate update() const { return update_; }
  IsingSweep sweep() const { return sweep_; }
  double proposal_prob() const { return proposal_prob_; }

  // Sites updated by kernel k.
  std::span<const std::size_t> updated_sites(KernelIndex k) const;

  // Pi_k T at x.
  double cond_exp_T(KernelIndex k, std::span<const double> x) const;
  // min{pi(x^i)/pi(x), 1}.
  double metropolis_acceptance(std::span<const double> x,
                               std::size_t site) const;

  std::string name() const override;
  int num_kernels() const override;
  std::size_t state_dim() const override { return lattice_.num_sites(); }
  std::size_t g_dim() const override { return 1; }
  std::size_t f_dim() const override { return 1; }
  bool gibbs_kernels() const override { return update_ == IsingUpdate::Gibbs; }

  void check_state(std::span<const double> x) const override;
  void transition(KernelIndex k, std::span<double> x,
                  RandomStream& rng) const override;
  void observe(KernelIndex k, std::span<const double> x,
               const Observation& out) const override;
  // Independent uniform spins.
  std::vector<double> initial_state(RandomStream& rng) const override;

 private:
  void update_site(std::span<double> x, std::size_t site,
                   RandomStream& rng) const;
  double site_cond_T(double T, std::span<const double> x,
                     std::size_t site) const;

  IsingLattice lattice_;
  double eta_;
  IsingUpdate update_;
  IsingSweep sweep_;
  double proposal_prob_;
  std::vector<std::vector<std::size_t>> kernel_sites_;
};

// Exact E_pi T by enumerating all 2^(n^2) configurations; n <= 4.
double ising_exact_mean_T(int n, double eta);

// ---------------------------------------------------------------------------
// Enumerated finite chain. Holds K row-stochastic matrices, the stationary
// vector, and integrand/basis tables (rows = states). The chain state is the
// state index stored as a double.

enum class KernelKind { Auto, Gibbs, General };

class FiniteModel final : public SweepModel {
 public:
  // g is centered by its exact pi-mean (f too, when it equals g). kind = Auto detects Gibbs kernels
  // numerically (idempotent and pi-reversible to 1e-10).
  FiniteModel(std::vector<std::vector<double>> labels,
              std::vector<Matrix> kernels, Vector pi, Matrix g_values,
              Matrix f_values, KernelKind kind = KernelKind::Auto,
              std::string label = "finite");

  std::size_t num_states() const { return static_cast<std::size_t>(pi_.size()); }
  const std::vector<std::vector<double>>& labels() const { return labels_; }
  const std::vector<Matrix>& kernels() const { return kernels_; }
  const Matrix& kernel(KernelIndex k) const { return kernels_.at(k.slot()); }
  const Vector& pi() const { return pi_; }
  const Matrix& g_values() const { return g_; }
  const Matrix& f_values() const { return f_; }

  // Throws CertificationError if a row sum is off by more than 1e-12,
  // pi^T P_k differs from pi^T by more than 1e-10, or pi^T g exceeds 1e-10.
  void validate() const;

  std::string name() const override { return label_; }
  int num_kernels() const override { return static_cast<int>(kernels_.size()); }
  std::size_t state_dim() const override { return 1; }
  std::size_t g_dim() const override { return static_cast<std::size_t>(g_.cols()); }
  std::size_t f_dim() const override { return static_cast<std::size_t>(f_.cols()); }
  bool gibbs_kernels() const override { return gibbs_; }
  bool data_augmentation() const override { return data_augmentation_; }

  void check_state(std::span<const double> x) const override;
  void transition(KernelIndex k, std::span<double> x,
                  RandomStream& rng) const override;
  void observe(KernelIndex k, std::span<const double> x,
               const Observation& out) const override;
  void first_kernel_cond_g(std::span<const double> x,
                           std::span<double> out) const override;
  // Exact draw from pi.
  std::vector<double> initial_state(RandomStream& rng) const override;

 private:
  std::size_t index_of(std::span<const double> x) const;
  static std::size_t sample_row(const Vector& cumulative, double u);

  std::vector<std::vector<double>> labels_;
  std::vector<Matrix> kernels_;
  Vector pi_;
  Matrix g_, f_;
  std::string label_;
  bool gibbs_ = false;
  bool data_augmentation_ = false;
  std::vector<Matrix> cond_g_, cond_f_;      // P_k g, P_k f
  std::vector<Matrix> cumulative_;           // row-wise CDFs, transposed
  Vector pi_cumulative_;
};

inline constexpr std::size_t kDefaultMaxStates = 4096;

// Two-block Gibbs sampler on a positive joint table over S1 x S2 (rows index
// the first coordinate). State index = a * |S2| + b. Kernel 1 redraws the
// second coordinate given the first, kernel 2 the first given the second.
// g and f have one row per state.
FiniteModel build_finite_gibbs(const Matrix& joint, const Matrix& g,
                               const Matrix& f,
                               std::size_t max_states = kDefaultMaxStates);

// Enumerated Ising chain with g = f = T - E_pi T, built from pi ratios. The state cap applies to
// the dense kernels, so n = 4 (65536 states) needs max_states raised.
FiniteModel build_finite_ising(int n, double eta, IsingSweep sweep,
                               IsingUpdate update = IsingUpdate::Gibbs,
                               std::size_t max_states = kDefaultMaxStates);

}  // namespace dsweep
