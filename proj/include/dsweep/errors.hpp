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

#pragma once

#include <stdexcept>
#include <string>

namespace dsweep {

// Bad input from the caller: malformed configuration, dimension mismatch,
// out-of-range index, estimator/model incompatibility.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A finite model failed a numerical certification check (stationarity,
// row sums, ergodicity of the sweep composition).
class CertificationError : public std::runtime_error {
 public:
  explicit CertificationError(const std::string& what)
      : std::runtime_error(what) {}
};

// The operation is well-formed but not defined for this schedule or model,
// e.g. per-kernel moments on a random-sweep trace.
class UnsupportedError : public std::logic_error {
 public:
  explicit UnsupportedError(const std::string& what)
      : std::logic_error(what) {}
};

}  // namespace dsweep
