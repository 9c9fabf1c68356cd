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
#include <sstream>

#include "dsweep/errors.hpp"
#include "dsweep/models.hpp"

namespace dsweep {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryTol = 1e-10;
constexpr double kCenterTol = 1e-10;
constexpr double kGibbsDetectTol = 1e-10;

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool is_gibbs_kernel(const Matrix& P, const Vector& pi) {
  const Matrix flow = pi.asDiagonal() * P;
  if (max_abs(flow - flow.transpose()) > kGibbsDetectTol) return false;
  return max_abs(P * P - P) <= kGibbsDetectTol;
}

}  // namespace

FiniteModel::FiniteModel(std::vector<std::vector<double>> labels,
                         std::vector<Matrix> kernels, Vector pi,
                         Matrix g_values, Matrix f_values, KernelKind kind,
                         std::string label)
    : labels_(std::move(labels)),
      kernels_(std::move(kernels)),
      pi_(std::move(pi)),
      g_(std::move(g_values)),
      f_(std::move(f_values)),
      label_(std::move(label)) {
  const Eigen::Index n = pi_.size();
  if (n == 0) throw ConfigError("finite model needs at least one state");
  if (kernels_.empty()) throw ConfigError("finite model needs at least one kernel");
  for (const Matrix& P : kernels_) {
    if (P.rows() != n || P.cols() != n) {
      throw ConfigError("transition matrix size does not match pi");
    }
    if (!all_finite(P)) throw ConfigError("transition matrix has non-finite entries");
  }
  if (g_.rows() != n || g_.cols() < 1) {
    throw ConfigError("g table must have one row per state and >= 1 column");
  }
  if (f_.rows() != n || f_.cols() < 1) {
    throw ConfigError("f table must have one row per state and >= 1 column");
  }
  if (!pi_.allFinite() || !all_finite(g_) || !all_finite(f_)) {
    throw ConfigError("finite model has non-finite entries");
  }
  if (labels_.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      labels_.push_back({static_cast<double>(i)});
    }
  } else if (static_cast<Eigen::Index>(labels_.size()) != n) {
    throw ConfigError("state label count does not match pi");
  }

  // Exact centering: the oracle formulas assume pi^T g = 0.
  const bool f_is_g = f_.rows() == g_.rows() && f_.cols() == g_.cols() &&
                      (f_.array() == g_.array()).all();
  const Eigen::RowVectorXd mean = pi_.transpose() * g_;
  g_.rowwise() -= mean;
  // Keep f = g bitwise, so f = g models reproduce the conditional estimator
  // exactly under C = I.
  if (f_is_g) f_ = g_;

  switch (kind) {
    case KernelKind::Gibbs: gibbs_ = true; break;
    case KernelKind::General: gibbs_ = false; break;
    case KernelKind::Auto:
      gibbs_ = std::all_of(kernels_.begin(), kernels_.end(),
                           [&](const Matrix& P) { return is_gibbs_kernel(P, pi_); });
      break;
  }

  for (const Matrix& P : kernels_) {
    cond_g_.push_back(P * g_);
    cond_f_.push_back(P * f_);
    Matrix cdf(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        acc += std::max(P(i, j), 0.0);
        cdf(j, i) = acc;
      }
    }
    cumulative_.push_back(std::move(cdf));
  }
  pi_cumulative_.resize(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += std::max(pi_(i), 0.0);
    pi_cumulative_(i) = acc;
  }

  const double scale = std::max(1.0, max_abs(g_));
  data_augmentation_ =
      kernels_.size() == 2 && max_abs(cond_g_[1] - g_) <= kGibbsDetectTol * scale;
}

void FiniteModel::validate() const {
  std::ostringstream problems;
  if (std::abs(pi_.sum() - 1.0) > kRowSumTol * pi_.size() || pi_.minCoeff() < 0.0) {
    problems << "pi is not a probability vector; ";
  }
  for (std::size_t k = 0; k < kernels_.size(); ++k) {
    const Matrix& P = kernels_[k];
    if (P.minCoeff() < 0.0) problems << "P_" << k + 1 << " has negative entries; ";
    const double row_err = (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
    if (row_err > kRowSumTol) {
      problems << "P_" << k + 1 << " row sums off by " << row_err << "; ";
    }
    const double stat_err =
        (pi_.transpose() * P - pi_.transpose()).cwiseAbs().maxCoeff();
    if (stat_err > kStationaryTol) {
      problems << "pi^T P_" << k + 1 << " != pi^T (residual " << stat_err << "); ";
    }
  }
  const double center_err = (pi_.transpose() * g_).cwiseAbs().maxCoeff();
  if (center_err > kCenterTol) problems << "g is not pi-centered; ";
  const std::string text = problems.str();
  if (!text.empty()) throw CertificationError(label_ + ": " + text);
}

std::size_t FiniteModel::index_of(std::span<const double> x) const {
  if (x.size() != 1) throw ConfigError("finite model state is a single index");
  const double v = x[0];
  if (!(v >= 0.0) || v >= static_cast<double>(num_states()) || v != std::floor(v)) {
    throw ConfigError("finite model state index out of range");
  }
  return static_cast<std::size_t>(v);
}

void FiniteModel::check_state(std::span<const double> x) const { (void)index_of(x); }

std::size_t FiniteModel::sample_row(const Vector& cumulative, double u) {
  const double target = u * cumulative(cumulative.size() - 1);
  const double* begin = cumulative.data();
  const double* end = begin + cumulative.size();
  const double* hit = std::upper_bound(begin, end, target);
  if (hit == end) --hit;
  return static_cast<std::size_t>(hit - begin);
}

void FiniteModel::transition(KernelIndex k, std::span<double> x,
                             RandomStream& rng) const {
  const std::size_t i = index_of(x);
  const Matrix& cdf = cumulative_.at(k.slot());
  const Vector column = cdf.col(static_cast<Eigen::Index>(i));
  x[0] = static_cast<double>(sample_row(column, rng.uniform()));
}

void FiniteModel::observe(KernelIndex k, std::span<const double> x,
                          const Observation& out) const {
  const auto i = static_cast<Eigen::Index>(index_of(x));
  const Matrix& cg = cond_g_.at(k.slot());
  const Matrix& cf = cond_f_.at(k.slot());
  for (Eigen::Index j = 0; j < g_.cols(); ++j) {
    out.g[j] = g_(i, j);
    out.cond_g[j] = cg(i, j);
  }
  for (Eigen::Index j = 0; j < f_.cols(); ++j) {
    out.f[j] = f_(i, j);
    out.cond_f[j] = cf(i, j);
  }
}

void FiniteModel::first_kernel_cond_g(std::span<const double> x,
                                      std::span<double> out) const {
  if (!data_augmentation_) SweepModel::first_kernel_cond_g(x, out);
  const auto i = static_cast<Eigen::Index>(index_of(x));
  for (Eigen::Index j = 0; j < g_.cols(); ++j) out[j] = cond_g_[0](i, j);
}

std::vector<double> FiniteModel::initial_state(RandomStream& rng) const {
  return {static_cast<double>(sample_row(pi_cumulative_, rng.uniform()))};
}

FiniteModel build_finite_gibbs(const Matrix& joint, const Matrix& g,
                               const Matrix& f, std::size_t max_states) {
  const Eigen::Index n1 = joint.rows(), n2 = joint.cols();
  const auto n = static_cast<std::size_t>(n1 * n2);
  if (n == 0) throw ConfigError("joint table is empty");
  if (n > max_states) {
    throw ConfigError("joint table has " + std::to_string(n) +
                      " cells, above the bound of " + std::to_string(max_states));
  }
  if (!joint.allFinite() || joint.minCoeff() <= 0.0) {
    throw ConfigError("joint table must be strictly positive");
  }
  if (std::abs(joint.sum() - 1.0) > 1e-12) {
    throw ConfigError("joint table must sum to 1");
  }
  const auto N = static_cast<Eigen::Index>(n);
  if (g.rows() != N || f.rows() != N) {
    throw ConfigError("g and f need one row per joint-table cell");
  }

  const Vector row_mass = joint.rowwise().sum();
  const Vector col_mass = joint.colwise().sum().transpose();
  Matrix P1 = Matrix::Zero(N, N), P2 = Matrix::Zero(N, N);
  Vector pi(N);
  std::vector<std::vector<double>> labels;
  for (Eigen::Index a = 0; a < n1; ++a) {
    for (Eigen::Index b = 0; b < n2; ++b) {
      const Eigen::Index i = a * n2 + b;
      pi(i) = joint(a, b);
      labels.push_back({static_cast<double>(a), static_cast<double>(b)});
      for (Eigen::Index b2 = 0; b2 < n2; ++b2) {
        P1(i, a * n2 + b2) = joint(a, b2) / row_mass(a);
      }
      for (Eigen::Index a2 = 0; a2 < n1; ++a2) {
        P2(i, a2 * n2 + b) = joint(a2, b) / col_mass(b);
      }
    }
  }
  return FiniteModel(std::move(labels), {std::move(P1), std::move(P2)},
                     std::move(pi), g, f, KernelKind::Gibbs, "finite_gibbs");
}

FiniteModel build_finite_ising(int n, double eta, IsingSweep sweep,
                               IsingUpdate update, std::size_t max_states) {
  if (n < 2 || n > 4) throw ConfigError("finite Ising enumeration needs 2 <= n <= 4");
  const IsingLattice lattice(n);
  const std::size_t sites = lattice.num_sites();
  const std::size_t count = std::size_t{1} << sites;
  if (count > max_states) {
    throw ConfigError("finite Ising model with n=" + std::to_string(n) + " has " +
                      std::to_string(count) + " states, above the bound of " +
                      std::to_string(max_states));
  }
  const auto N = static_cast<Eigen::Index>(count);
  constexpr double kProposal = 0.9;

  auto spins = [&](std::size_t code) {
    std::vector<double> x(sites);
    for (std::size_t s = 0; s < sites; ++s) x[s] = (code >> s) & 1u ? 1.0 : -1.0;
    return x;
  };

  Vector T(N);
  std::vector<std::vector<double>> labels;
  for (std::size_t code = 0; code < count; ++code) {
    labels.push_back(spins(code));
    T(static_cast<Eigen::Index>(code)) = lattice.edge_statistic(labels.back());
  }
  const double top = (eta * T).maxCoeff();
  Vector pi = (eta * T.array() - top).exp().matrix();
  pi /= pi.sum();

  // Probability that site s moves away from its current value in x, from
  // pi ratios of the enumerated states.
  auto move_prob = [&](std::size_t code, std::size_t s) {
    const auto i = static_cast<Eigen::Index>(code);
    const auto j = static_cast<Eigen::Index>(code ^ (std::size_t{1} << s));
    if (update == IsingUpdate::Gibbs) return pi(j) / (pi(i) + pi(j));
    return kProposal * std::min(std::exp(eta * (T(j) - T(i))), 1.0);
  };

  std::vector<std::vector<std::size_t>> kernel_sites;
  if (sweep == IsingSweep::Raster) {
    for (std::size_t s = 0; s < sites; ++s) kernel_sites.push_back({s});
  } else {
    kernel_sites.resize(2);
    for (std::size_t s = 0; s < sites; ++s) {
      kernel_sites[lattice.component(s) == 0 ? 1 : 0].push_back(s);
    }
  }

  std::vector<Matrix> kernels;
  for (const auto& updated : kernel_sites) {
    Matrix P = Matrix::Zero(N, N);
    const std::size_t m = updated.size();
    for (std::size_t code = 0; code < count; ++code) {
      std::vector<double> moves(m);
      for (std::size_t r = 0; r < m; ++r) moves[r] = move_prob(code, updated[r]);
      // The updated sites are pairwise non-adjacent, so they move
      // independently given the rest.
      for (std::size_t pattern = 0; pattern < (std::size_t{1} << m); ++pattern) {
        double prob = 1.0;
        std::size_t target = code;
        for (std::size_t r = 0; r < m; ++r) {
          if ((pattern >> r) & 1u) {
            prob *= moves[r];
            target ^= std::size_t{1} << updated[r];
          } else {
            prob *= 1.0 - moves[r];
          }
        }
        P(static_cast<Eigen::Index>(code), static_cast<Eigen::Index>(target)) += prob;
      }
    }
    kernels.push_back(std::move(P));
  }

  const Matrix g = T;
  return FiniteModel(std::move(labels), std::move(kernels), std::move(pi), g, g,
                     update == IsingUpdate::Gibbs ? KernelKind::Gibbs
                                                  : KernelKind::General,
                     "finite_ising");
}

}  // namespace dsweep
