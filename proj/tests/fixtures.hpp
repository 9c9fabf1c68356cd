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

// Hand-written model files shared by the C API and CLI tests.

#pragma once

namespace dsweep::fixtures {

// Two-block Gibbs sampler on a 2 x 2 table with joint (0.1, 0.2; 0.3, 0.4);
// state (a, b) has index 2a + b and g depends on b only.
inline constexpr const char* kDaModel = R"({
  "name": "table2x2",
  "states": [[0, 0], [0, 1], [1, 0], [1, 1]],
  "pi": [0.1, 0.2, 0.3, 0.4],
  "P": [
    [[0.33333333333333331, 0.66666666666666663, 0, 0],
     [0.33333333333333331, 0.66666666666666663, 0, 0],
     [0, 0, 0.42857142857142855, 0.5714285714285714],
     [0, 0, 0.42857142857142855, 0.5714285714285714]],
    [[0.25, 0, 0.75, 0],
     [0, 0.33333333333333331, 0, 0.66666666666666663],
     [0.25, 0, 0.75, 0],
     [0, 0.33333333333333331, 0, 0.66666666666666663]]
  ],
  "g": [1, -1, 1, -1]
})";

// Same table with one row of the first kernel scaled off the simplex.
inline constexpr const char* kBrokenModel = R"({
  "pi": [0.1, 0.2, 0.3, 0.4],
  "P": [
    [[0.33333333333333331, 0.66666666666666663, 0, 0],
     [0.33333333333333331, 0.66666666666666663, 0, 0],
     [0, 0, 0.5, 0.6],
     [0, 0, 0.42857142857142855, 0.5714285714285714]],
    [[0.25, 0, 0.75, 0],
     [0, 0.33333333333333331, 0, 0.66666666666666663],
     [0.25, 0, 0.75, 0],
     [0, 0.33333333333333331, 0, 0.66666666666666663]]
  ],
  "g": [1, -1, 1, -1]
})";

}  // namespace dsweep::fixtures
