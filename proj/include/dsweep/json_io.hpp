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

// JSON forms of finite models and audit records. Matrices are arrays of
// rows; doubles are written with round-trip precision.
//
// Finite model document:
//   {
//     "name": "...",                  optional
//     "states": [[...], ...],         optional labels, one per state
//     "P": [ [[row], ...], ... ],     K row-stochastic |S| x |S| matrices
//     "pi": [...],                    stationary distribution
//     "g": [[...], ...] or [...],     integrand, one row (or value) per state
//     "f": same shape rules as g,     optional, defaults to g
//     "kernel_type": "gibbs" | "general" | "auto"   optional, default auto
//   }

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "dsweep/linalg.hpp"
#include "dsweep/models.hpp"
#include "dsweep/oracle.hpp"
#include "dsweep/weights.hpp"

namespace dsweep {

nlohmann::json matrix_to_json(const Matrix& m);
// Accepts a 2-D array, or a 1-D array read as a single column.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);

// ConfigError on malformed documents or more than max_states states.
FiniteModel finite_model_from_json(const nlohmann::json& j,
                                   std::size_t max_states = kDefaultMaxStates);
FiniteModel load_finite_model(const std::filesystem::path& path,
                              std::size_t max_states = kDefaultMaxStates);
nlohmann::json finite_model_to_json(const FiniteModel& model);

nlohmann::json to_json(const MomentEstimate& m);
nlohmann::json to_json(const WeightSolution& w);
nlohmann::json to_json(const StationaryDiagnostics& d);
nlohmann::json to_json(const LwkReport& r);
nlohmann::json to_json(const VarianceReport& r);

}  // namespace dsweep
