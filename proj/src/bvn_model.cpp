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

#include "dsweep/errors.hpp"
#include "dsweep/models.hpp"

namespace dsweep {

namespace {

void check_rho(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw ConfigError("bivariate normal correlation must satisfy |rho| < 1");
  }
}

const char* integrand_name(BvnIntegrand integrand) {
  switch (integrand) {
    case BvnIntegrand::X2: return "x2";
    case BvnIntegrand::Quadratic: return "quadratic";
    case BvnIntegrand::Sum: return "sum";
  }
  return "?";
}

}  // namespace

double bvn_integrand(BvnIntegrand integrand, double x1, double x2) {
  switch (integrand) {
    case BvnIntegrand::X2: return x2;
    case BvnIntegrand::Quadratic: return x1 * x1 + x2 * x2 / 3.0 - 4.0 / 3.0;
    case BvnIntegrand::Sum: return x1 + x2;
  }
  throw ConfigError("unsupported bivariate normal integrand");
}

double bvn_cond_exp(double rho, KernelIndex k, BvnIntegrand integrand,
                    double x1, double x2) {
  if (k.value() != 1 && k.value() != 2) {
    throw ConfigError("bivariate normal has kernels 1 and 2 only");
  }
  const double resid = 1.0 - rho * rho;
  // Kernel 1 keeps x1 and integrates x2 ~ N(rho x1, 1 - rho^2).
  const bool keep_first = k.value() == 1;
  const double kept = keep_first ? x1 : x2;
  const double m = rho * kept;
  const double second_moment = m * m + resid;
  switch (integrand) {
    case BvnIntegrand::X2:
      return keep_first ? m : x2;
    case BvnIntegrand::Quadratic:
      return keep_first ? x1 * x1 + second_moment / 3.0 - 4.0 / 3.0
                        : second_moment + x2 * x2 / 3.0 - 4.0 / 3.0;
    case BvnIntegrand::Sum:
      return kept + m;
  }
  throw ConfigError("unsupported bivariate normal integrand");
}

BvnModel::BvnModel(double rho, BvnIntegrand integrand)
    : rho_(rho), builtin_(true), integrand_(integrand) {
  check_rho(rho);
  (void)bvn_integrand(integrand, 0.0, 0.0);
}

BvnModel::BvnModel(double rho, CustomBvnIntegrand custom)
    : rho_(rho), builtin_(false), custom_(std::move(custom)) {
  check_rho(rho);
  if (custom_.dim == 0 || !custom_.value) {
    throw ConfigError("custom integrand needs a dimension and a value function");
  }
}

std::string BvnModel::name() const {
  return std::string("bvn(") + (builtin_ ? integrand_name(integrand_) : "custom") +
         ")";
}

std::size_t BvnModel::g_dim() const { return builtin_ ? 1 : custom_.dim; }

bool BvnModel::data_augmentation() const {
  return builtin_ ? integrand_ == BvnIntegrand::X2 : custom_.data_augmentation;
}

bool BvnModel::has_conditional_expectations() const {
  return builtin_ || static_cast<bool>(custom_.cond);
}

void BvnModel::check_state(std::span<const double> x) const {
  if (x.size() != 2 || !std::isfinite(x[0]) || !std::isfinite(x[1])) {
    throw ConfigError("bivariate normal state must be two finite numbers");
  }
}

void BvnModel::transition(KernelIndex k, std::span<double> x,
                          RandomStream& rng) const {
  const double sd = std::sqrt(1.0 - rho_ * rho_);
  if (k.value() == 1) {
    x[1] = rho_ * x[0] + sd * rng.normal();
  } else if (k.value() == 2) {
    x[0] = rho_ * x[1] + sd * rng.normal();
  } else {
    throw ConfigError("bivariate normal has kernels 1 and 2 only");
  }
}

void BvnModel::value(std::span<const double> x, std::span<double> out) const {
  if (builtin_) {
    out[0] = bvn_integrand(integrand_, x[0], x[1]);
  } else {
    custom_.value(x[0], x[1], out);
  }
}

void BvnModel::cond(KernelIndex k, std::span<const double> x,
                    std::span<double> out) const {
  if (builtin_) {
    out[0] = bvn_cond_exp(rho_, k, integrand_, x[0], x[1]);
  } else {
    if (!custom_.cond) {
      throw ConfigError("custom integrand has no conditional expectation");
    }
    custom_.cond(k, x[0], x[1], out);
  }
}

void BvnModel::observe(KernelIndex k, std::span<const double> x,
                       const Observation& out) const {
  value(x, out.g);
  cond(k, x, out.cond_g);
  std::copy(out.g.begin(), out.g.end(), out.f.begin());
  std::copy(out.cond_g.begin(), out.cond_g.end(), out.cond_f.begin());
}

void BvnModel::first_kernel_cond_g(std::span<const double> x,
                                   std::span<double> out) const {
  if (!data_augmentation()) SweepModel::first_kernel_cond_g(x, out);
  cond(KernelIndex(1), x, out);
}

std::vector<double> BvnModel::initial_state(RandomStream& rng) const {
  const double x1 = rng.normal();
  const double x2 = rho_ * x1 + std::sqrt(1.0 - rho_ * rho_) * rng.normal();
  return {x1, x2};
}

}  // namespace dsweep
