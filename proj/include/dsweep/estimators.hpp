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

// Averaging schemes over a recorded trace. All of them read only the cached
// g, f and conditional-expectation columns, so they also work on imported
// traces.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dsweep/linalg.hpp"
#include "dsweep/sweep.hpp"

namespace dsweep {

enum class EstimatorScheme { Empirical, RaoBlackwell, FixedCv, GeneralCv, Lwk };

std::string scheme_name(EstimatorScheme scheme);

// Control variate weight, p x d (rows follow f, columns follow g).
using WeightMatrix = Matrix;

struct EstimateResult {
  Vector mean;  // S_M / M
  std::size_t M = 0;
  EstimatorScheme scheme = EstimatorScheme::Empirical;
  std::vector<WeightMatrix> weights_used;
};

// M^-1 sum g(X_t).
EstimateResult empirical_mean(const Trace& trace);

// M^-1 sum Pi_{sigma^t(1)} g(X_t).
EstimateResult rao_blackwell_mean(const Trace& trace);

// M^-1 sum g(X_t) - C^T {f(X_t) - Pi_{sigma^t(1)} f(X_t)}.
EstimateResult fixed_cv_mean(const Trace& trace, const WeightMatrix& C);

// M^-1 sum g(X_t) - C_{sigma^t(1)}^T f(X_t) + C_{sigma^{t+1}(1)}^T Pi f(X_t).
// weights[k-1] is C_k. Deterministic schedules only; the last step wraps
// cyclically.
EstimateResult general_cv_mean(const Trace& trace,
                               const std::vector<WeightMatrix>& weights);

// M^-1 sum Pi_1 g(X_t) at every t. Needs a data-augmentation trace.
EstimateResult lwk_mean(const Trace& trace);

}  // namespace dsweep
