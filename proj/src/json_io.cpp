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

#include "dsweep/json_io.hpp"

#include <fstream>

#include "dsweep/errors.hpp"

namespace dsweep {

using nlohmann::json;

namespace {

json matrices_to_json(const std::vector<Matrix>& ms) {
  json out = json::array();
  for (const Matrix& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + ": expected a number");
  return j.get<double>();
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a non-empty array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j.front().is_array()) {
    Matrix m(rows, 1);
    for (Eigen::Index i = 0; i < rows; ++i) m(i, 0) = number(j[i], what);
    return m;
  }
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  if (cols == 0) throw ConfigError(what + ": rows must be non-empty");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(what + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = number(row[static_cast<std::size_t>(c)], what);
    }
  }
  return m;
}

FiniteModel finite_model_from_json(const json& j, std::size_t max_states) {
  if (!j.is_object()) throw ConfigError("finite model: expected a JSON object");
  for (const char* key : {"P", "pi", "g"}) {
    if (!j.contains(key)) throw ConfigError(std::string("finite model: missing \"") + key + "\"");
  }
  const Matrix pi_col = matrix_from_json(j.at("pi"), "pi");
  if (pi_col.cols() != 1) throw ConfigError("pi: expected a flat array");
  const Vector pi = pi_col.col(0);
  if (static_cast<std::size_t>(pi.size()) > max_states) {
    throw ConfigError("finite model has " + std::to_string(pi.size()) +
                      " states, above the bound of " + std::to_string(max_states));
  }
  const json& P = j.at("P");
  if (!P.is_array() || P.empty()) throw ConfigError("P: expected a list of matrices");
  std::vector<Matrix> kernels;
  for (std::size_t k = 0; k < P.size(); ++k) {
    kernels.push_back(matrix_from_json(P[k], "P[" + std::to_string(k) + "]"));
  }
  const Matrix g = matrix_from_json(j.at("g"), "g");
  const Matrix f = j.contains("f") ? matrix_from_json(j.at("f"), "f") : g;

  std::vector<std::vector<double>> labels;
  if (j.contains("states")) {
    const json& states = j.at("states");
    if (!states.is_array()) throw ConfigError("states: expected an array");
    for (const json& s : states) {
      if (s.is_array()) {
        std::vector<double> label;
        for (const json& v : s) label.push_back(number(v, "states"));
        labels.push_back(std::move(label));
      } else {
        labels.push_back({number(s, "states")});
      }
    }
  }

  KernelKind kind = KernelKind::Auto;
  if (j.contains("kernel_type")) {
    const std::string t = j.at("kernel_type").get<std::string>();
    if (t == "gibbs") kind = KernelKind::Gibbs;
    else if (t == "general") kind = KernelKind::General;
    else if (t != "auto") throw ConfigError("kernel_type must be gibbs, general or auto");
  }
  const std::string name = j.value("name", std::string("finite"));
  return FiniteModel(std::move(labels), std::move(kernels), pi, g, f, kind, name);
}

FiniteModel load_finite_model(const std::filesystem::path& path, std::size_t max_states) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("model file " + path.string() + ": " + e.what());
  }
  return finite_model_from_json(j, max_states);
}

json finite_model_to_json(const FiniteModel& model) {
  json j;
  j["name"] = model.name();
  j["states"] = model.labels();
  j["P"] = matrices_to_json(model.kernels());
  j["pi"] = std::vector<double>(model.pi().data(), model.pi().data() + model.pi().size());
  j["g"] = matrix_to_json(model.g_values());
  j["f"] = matrix_to_json(model.f_values());
  j["kernel_type"] = model.gibbs_kernels() ? "gibbs" : "general";
  return j;
}

json to_json(const MomentEstimate& m) {
  return {{"mode", moment_mode_name(m.mode)},
          {"B", m.B},
          {"U_hat", matrices_to_json(m.U_hat)},
          {"V_hat", matrices_to_json(m.V_hat)}};
}

json to_json(const WeightSolution& w) {
  return {{"mode", moment_mode_name(w.mode)},
          {"rank_used", w.rank_used},
          {"truncation_tol", w.truncation_tol},
          {"C_hat", matrices_to_json(w.C_hat)}};
}

json to_json(const StationaryDiagnostics& d) {
  return {{"max_row_sum_error", d.max_row_sum_error},
          {"max_stationarity_residual", d.max_stationarity_residual},
          {"min_entry", d.min_entry},
          {"primitive_power", d.primitive_power}};
}

json to_json(const LwkReport& r) {
  return {{"A", matrix_to_json(r.A)},
          {"B", matrix_to_json(r.B)},
          {"Sigma0", matrix_to_json(r.Sigma0)},
          {"Sigma1", matrix_to_json(r.Sigma1)},
          {"Sigma2", matrix_to_json(r.Sigma2)},
          {"SigmaLWK", matrix_to_json(r.SigmaLWK)},
          {"SigmaCtilde", matrix_to_json(r.SigmaCtilde)},
          {"Ctilde", matrix_to_json(r.Ctilde)},
          {"Ctilde_formula", matrix_to_json(r.Ctilde_formula)},
          {"residuals",
           {{"sigma2_vs_lwk", r.lwk_residual},
            {"ctilde_minus_sigma2", r.ctilde_gap_residual},
            {"sigma2_minus_sigma1", r.two_one_residual},
            {"sigma1_minus_sigma0", r.one_zero_residual},
            {"ctilde_formula", r.weight_residual}}},
          {"min_eigenvalues",
           {{"sigma2_minus_ctilde", r.min_eig_2_minus_ctilde},
            {"sigma1_minus_sigma2", r.min_eig_1_minus_2},
            {"sigma0_minus_sigma1", r.min_eig_0_minus_1}}}};
}

json to_json(const VarianceReport& r) {
  json j;
  j["diagnostics"] = to_json(r.diagnostics);
  j["poisson_residual"] = r.poisson_residual;
  j["U_k"] = matrices_to_json(r.moments.U_k);
  j["V_k"] = matrices_to_json(r.moments.V_k);
  j["U"] = matrix_to_json(r.moments.U);
  j["V"] = matrix_to_json(r.moments.V);
  j["Sigma0"] = matrix_to_json(r.Sigma0);
  if (r.Sigma1) j["Sigma1"] = matrix_to_json(*r.Sigma1);
  if (r.Sigma2) j["Sigma2"] = matrix_to_json(*r.Sigma2);
  j["Ctilde"] = matrix_to_json(r.Ctilde);
  j["SigmaCtilde"] = matrix_to_json(r.SigmaCtilde);
  j["Ctilde_per_kernel"] = matrices_to_json(r.Ctilde_per_kernel);
  j["SigmaCtilde_per_kernel"] = matrix_to_json(r.SigmaCtilde_per_kernel);
  if (r.Cbar) {
    j["Cbar"] = matrix_to_json(*r.Cbar);
    j["SigmaRev_Cbar"] = matrix_to_json(*r.SigmaRev_Cbar);
    j["SigmaRev_Ctilde"] = matrix_to_json(*r.SigmaRev_Ctilde);
  }
  if (r.lwk) j["lwk"] = to_json(*r.lwk);
  return j;
}

}  // namespace dsweep
