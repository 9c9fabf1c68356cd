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

#include "dsweep/estimators.hpp"

#include <span>

#include "dsweep/errors.hpp"

namespace dsweep {

namespace {

void require_nonempty(const Trace& trace) {
  if (trace.size() == 0) throw ConfigError("estimator needs a non-empty trace");
}

void check_weight(const Trace& trace, const WeightMatrix& C) {
  const auto p = static_cast<Eigen::Index>(trace.layout().f_dim);
  const auto d = static_cast<Eigen::Index>(trace.layout().g_dim);
  if (C.rows() != p || C.cols() != d) {
    throw ConfigError("weight matrix must be " + std::to_string(p) + "x" +
                      std::to_string(d) + ", got " + std::to_string(C.rows()) +
                      "x" + std::to_string(C.cols()));
  }
  if (!C.allFinite()) throw ConfigError("weight matrix has non-finite entries");
}

Vector column_mean(const Trace& trace,
                   std::span<const double> (Trace::*column)(std::size_t) const) {
  const std::size_t d = trace.layout().g_dim;
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto v = (trace.*column)(t);
    for (std::size_t i = 0; i < d; ++i) sum(static_cast<Eigen::Index>(i)) += v[i];
  }
  return sum / static_cast<double>(trace.size());
}

// Summand (g - C_out^T f) + C_in^T Pi f, with C_out, C_in chosen per step.
// Every control variate scheme goes through here, so that C = 0 reproduces
// the empirical sum and C = I, f = g reproduces the conditional sum bit for
// bit.
template <typename WeightsAt>
Vector cv_mean(const Trace& trace, WeightsAt weights_at) {
  const std::size_t d = trace.layout().g_dim;
  const std::size_t p = trace.layout().f_dim;
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto [c_out, c_in] = weights_at(t);
    const auto g = trace.g(t);
    const auto f = trace.f(t);
    const auto cf = trace.cond_f(t);
    for (std::size_t i = 0; i < d; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      double out = 0.0, in = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        const auto row = static_cast<Eigen::Index>(j);
        out += (*c_out)(row, col) * f[j];
        in += (*c_in)(row, col) * cf[j];
      }
      sum(col) += (g[i] - out) + in;
    }
  }
  return sum / static_cast<double>(trace.size());
}

}  // namespace

std::string scheme_name(EstimatorScheme scheme) {
  switch (scheme) {
    case EstimatorScheme::Empirical: return "empirical";
    case EstimatorScheme::RaoBlackwell: return "rb";
    case EstimatorScheme::FixedCv: return "fixed";
    case EstimatorScheme::GeneralCv: return "general";
    case EstimatorScheme::Lwk: return "lwk";
  }
  return "?";
}

EstimateResult empirical_mean(const Trace& trace) {
  require_nonempty(trace);
  return {column_mean(trace, &Trace::g), trace.size(), EstimatorScheme::Empirical, {}};
}

EstimateResult rao_blackwell_mean(const Trace& trace) {
  require_nonempty(trace);
  return {column_mean(trace, &Trace::cond_g), trace.size(),
          EstimatorScheme::RaoBlackwell, {}};
}

EstimateResult fixed_cv_mean(const Trace& trace, const WeightMatrix& C) {
  require_nonempty(trace);
  check_weight(trace, C);
  const Vector mean =
      cv_mean(trace, [&](std::size_t) { return std::pair{&C, &C}; });
  return {mean, trace.size(), EstimatorScheme::FixedCv, {C}};
}

EstimateResult general_cv_mean(const Trace& trace,
                               const std::vector<WeightMatrix>& weights) {
  require_nonempty(trace);
  if (trace.layout().schedule != ScheduleKind::Deterministic) {
    throw UnsupportedError("general control variates need a deterministic sweep");
  }
  const auto K = static_cast<std::size_t>(trace.layout().num_kernels);
  if (weights.size() != K) {
    throw ConfigError("general control variates need one weight per kernel (" +
                      std::to_string(K) + "), got " + std::to_string(weights.size()));
  }
  for (const WeightMatrix& C : weights) check_weight(trace, C);
  const Vector mean = cv_mean(trace, [&](std::size_t t) {
    return std::pair{&weights[t % K], &weights[(t + 1) % K]};
  });
  return {mean, trace.size(), EstimatorScheme::GeneralCv, weights};
}

EstimateResult lwk_mean(const Trace& trace) {
  require_nonempty(trace);
  if (!trace.layout().data_augmentation || !trace.has_first_cond_g()) {
    throw ConfigError("LWK estimator needs a two-kernel data-augmentation model");
  }
  return {column_mean(trace, &Trace::first_cond_g), trace.size(),
          EstimatorScheme::Lwk, {}};
}

}  // namespace dsweep
