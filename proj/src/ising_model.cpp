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

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsweep/errors.hpp"
#include "dsweep/models.hpp"

namespace dsweep {

IsingLattice::IsingLattice(int n) : n_(n) {
  if (n < 2) throw ConfigError("Ising grid side must be >= 2");
  neighbor_offsets_.push_back(0);
  for (std::size_t i = 0; i < num_sites(); ++i) {
    const int r = row_of(i), c = col_of(i);
    // up, down, left, right; free boundary.
    if (r > 0) neighbor_list_.push_back(site(r - 1, c));
    if (r + 1 < n_) neighbor_list_.push_back(site(r + 1, c));
    if (c > 0) neighbor_list_.push_back(site(r, c - 1));
    if (c + 1 < n_) neighbor_list_.push_back(site(r, c + 1));
    neighbor_offsets_.push_back(neighbor_list_.size());
  }
}

std::size_t IsingLattice::site(int row, int col) const {
  return static_cast<std::size_t>(col) * n_ + static_cast<std::size_t>(row);
}
int IsingLattice::row_of(std::size_t s) const { return static_cast<int>(s % n_); }
int IsingLattice::col_of(std::size_t s) const { return static_cast<int>(s / n_); }
int IsingLattice::component(std::size_t s) const {
  return (row_of(s) + col_of(s)) % 2;
}

std::span<const std::size_t> IsingLattice::neighbors(std::size_t s) const {
  return {neighbor_list_.data() + neighbor_offsets_[s],
          neighbor_offsets_[s + 1] - neighbor_offsets_[s]};
}

double IsingLattice::neighbor_sum(std::span<const double> x,
                                  std::size_t s) const {
  double total = 0.0;
  for (std::size_t j : neighbors(s)) total += x[j];
  return total;
}

double IsingLattice::edge_statistic(std::span<const double> x) const {
  double total = 0.0;
  for (int c = 0; c < n_; ++c) {
    for (int r = 0; r < n_; ++r) {
      const double xi = x[site(r, c)];
      if (r + 1 < n_) total += xi * x[site(r + 1, c)];
      if (c + 1 < n_) total += xi * x[site(r, c + 1)];
    }
  }
  return total;
}

double ising_site_conditional(double eta, std::span<const double> x,
                              const IsingLattice& lattice, std::size_t s) {
  if (s >= lattice.num_sites()) throw ConfigError("site index out of range");
  const double field = eta * lattice.neighbor_sum(x, s);
  // exp(h) / (exp(h) + exp(-h))
  return 1.0 / (1.0 + std::exp(-2.0 * field));
}

IsingModel::IsingModel(int n, double eta, IsingUpdate update,
                       IsingSweep sweep, double proposal_prob)
    : lattice_(n),
      eta_(eta),
      update_(update),
      sweep_(sweep),
      proposal_prob_(proposal_prob) {
  if (!std::isfinite(eta)) throw ConfigError("Ising coupling must be finite");
  if (!(proposal_prob > 0.0 && proposal_prob <= 1.0)) {
    throw ConfigError("Metropolis proposal probability must be in (0, 1]");
  }
  if (sweep_ == IsingSweep::Raster) {
    for (std::size_t s = 0; s < lattice_.num_sites(); ++s) {
      kernel_sites_.push_back({s});
    }
  } else {
    // Kernel k updates the complement of W_k.
    kernel_sites_.resize(2);
    for (std::size_t s = 0; s < lattice_.num_sites(); ++s) {
      kernel_sites_[lattice_.component(s) == 0 ? 1 : 0].push_back(s);
    }
  }
}

std::string IsingModel::name() const {
  return std::string("ising(n=") + std::to_string(lattice_.side()) + "," +
         (update_ == IsingUpdate::Gibbs ? "gibbs" : "metropolis") + "," +
         (sweep_ == IsingSweep::Raster ? "raster" : "checkerboard") + ")";
}

int IsingModel::num_kernels() const {
  return static_cast<int>(kernel_sites_.size());
}

std::span<const std::size_t> IsingModel::updated_sites(KernelIndex k) const {
  if (k.value() < 1 || k.value() > num_kernels()) {
    throw ConfigError("Ising kernel index out of range");
  }
  return kernel_sites_[k.slot()];
}

double IsingModel::metropolis_acceptance(std::span<const double> x,
                                         std::size_t s) const {
  return std::min(std::exp(-2.0 * eta_ * x[s] * lattice_.neighbor_sum(x, s)),
                  1.0);
}

void IsingModel::check_state(std::span<const double> x) const {
  if (x.size() != lattice_.num_sites()) {
    throw ConfigError("Ising state has wrong number of sites");
  }
  for (double v : x) {
    if (v != 1.0 && v != -1.0) throw ConfigError("Ising spins must be +1 or -1");
  }
}

void IsingModel::update_site(std::span<double> x, std::size_t s,
                             RandomStream& rng) const {
  const double u = rng.uniform();
  if (update_ == IsingUpdate::Gibbs) {
    x[s] = u < ising_site_conditional(eta_, x, lattice_, s) ? 1.0 : -1.0;
  } else if (u < proposal_prob_ * metropolis_acceptance(x, s)) {
    x[s] = -x[s];
  }
}

void IsingModel::transition(KernelIndex k, std::span<double> x,
                            RandomStream& rng) const {
  for (std::size_t s : updated_sites(k)) update_site(x, s, rng);
}

// Pi_i T for a single-site kernel, given T = T(x).
double IsingModel::site_cond_T(double T, std::span<const double> x,
                               std::size_t s) const {
  const double field_sum = lattice_.neighbor_sum(x, s);
  const double without_site = T - x[s] * field_sum;
  if (update_ == IsingUpdate::Gibbs) {
    return without_site + std::tanh(eta_ * field_sum) * field_sum;
  }
  const double move = proposal_prob_ * metropolis_acceptance(x, s);
  const double flipped = T - 2.0 * x[s] * field_sum;
  return move * flipped + (1.0 - move) * T;
}

double IsingModel::cond_exp_T(KernelIndex k, std::span<const double> x) const {
  const auto sites = updated_sites(k);
  if (sweep_ == IsingSweep::Raster) {
    return site_cond_T(lattice_.edge_statistic(x), x, sites[0]);
  }
  // Every edge joins the two components, so T = sum over updated sites i of
  // x_i s_i with s_i fixed by the conditioning component.
  double total = 0.0;
  for (std::size_t s : sites) {
    const double field_sum = lattice_.neighbor_sum(x, s);
    if (update_ == IsingUpdate::Gibbs) {
      total += std::tanh(eta_ * field_sum) * field_sum;
    } else {
      const double move = proposal_prob_ * metropolis_acceptance(x, s);
      total += x[s] * field_sum * (1.0 - 2.0 * move);
    }
  }
  return total;
}

void IsingModel::observe(KernelIndex k, std::span<const double> x,
                         const Observation& out) const {
  const double T = lattice_.edge_statistic(x);
  const auto sites = updated_sites(k);
  const double cond =
      sweep_ == IsingSweep::Raster ? site_cond_T(T, x, sites[0]) : cond_exp_T(k, x);
  out.g[0] = T;
  out.f[0] = T;
  out.cond_g[0] = cond;
  out.cond_f[0] = cond;
}

std::vector<double> IsingModel::initial_state(RandomStream& rng) const {
  std::vector<double> x(lattice_.num_sites());
  for (double& v : x) v = rng.uniform() < 0.5 ? 1.0 : -1.0;
  return x;
}

double ising_exact_mean_T(int n, double eta) {
  if (n < 2 || n > 4) {
    throw ConfigError("exact Ising enumeration supports 2 <= n <= 4");
  }
  const IsingLattice lattice(n);
  const std::size_t sites = lattice.num_sites();
  const std::uint64_t count = std::uint64_t{1} << sites;
  std::vector<double> x(sites), stats(count);
  double max_exponent = -std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < count; ++code) {
    for (std::size_t s = 0; s < sites; ++s) x[s] = (code >> s) & 1u ? 1.0 : -1.0;
    stats[code] = lattice.edge_statistic(x);
    max_exponent = std::max(max_exponent, eta * stats[code]);
  }
  double norm = 0.0, weighted = 0.0;
  for (double T : stats) {
    const double w = std::exp(eta * T - max_exponent);
    norm += w;
    weighted += w * T;
  }
  return weighted / norm;
}

}  // namespace dsweep
