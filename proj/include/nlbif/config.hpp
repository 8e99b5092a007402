#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "nlbif/continuation.hpp"
#include "nlbif/csv.hpp"
#include "nlbif/error.hpp"
#include "nlbif/model.hpp"
#include "nlbif/spectral.hpp"

namespace nlbif {

struct SolverSettings {
  EigenOptions eigen;
  NewtonOptions newton;
};

/// A parsed configuration file: problem instance, grid and solver settings.
struct RunConfig {
  ProblemSpec problem;
  SolverSettings solver;
};

namespace config_detail {

using nlohmann::json;

inline RadialFunction parse_function(const json& j, const std::string& what) {
  if (j.is_string()) return RadialFunction::builtin(j.get<std::string>());
  if (!j.is_object()) throw ConfigError(what + ": expected a name or an object");
  RadialFunction fn;
  if (j.contains("builtin")) {
    fn = RadialFunction::builtin(j.at("builtin").get<std::string>(), j.value("length", 1.0));
  } else if (j.contains("r") && j.contains("values")) {
    fn = RadialFunction::tabulated(j.at("r").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
  } else {
    throw ConfigError(what + ": needs 'builtin' or 'r'/'values'");
  }
  if (j.contains("power")) fn = fn.pow(j.at("power").get<double>());
  if (j.contains("scale")) fn = fn.scaled(j.at("scale").get<double>());
  return fn;
}

inline OracleKind parse_oracle(const std::string& s) {
  if (s == "none") return OracleKind::none;
  if (s == "analytic_eigen") return OracleKind::analytic_eigen;
  if (s == "rank_one") return OracleKind::rank_one;
  throw ConfigError("unknown oracle '" + s + "'");
}

}  // namespace config_detail

inline const char* to_string(OracleKind k) {
  switch (k) {
    case OracleKind::none: return "none";
    case OracleKind::analytic_eigen: return "analytic_eigen";
    case OracleKind::rank_one: return "rank_one";
  }
  return "?";
}

/// Parses a configuration document. `base_dir` resolves relative file references.
inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
  using config_detail::parse_function;
  RunConfig cfg;
  ProblemSpec& p = cfg.problem;
  try {
    p.name = j.value("name", std::string("unnamed"));
    p.dim = j.at("dim").get<int>();
    p.gamma = j.at("gamma").get<double>();
    p.f = GrowthRate{parse_function(j.at("f"), "f"), j.value("q", static_cast<double>(p.dim))};
    p.P = WeightP{parse_function(j.at("P"), "P")};
    p.oracle = config_detail::parse_oracle(j.value("oracle", std::string("none")));

    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      p.grid.r_max = g.value("R_max", p.grid.r_max);
      p.grid.cells = g.value("M", p.grid.cells);
      p.grid.stretch = g.value("stretch", p.grid.stretch);
    }

    const auto& k = j.at("kernel");
    const std::string type = k.at("type").get<std::string>();
    if (type == "separable") {
      p.kernel = SeparableKernel{parse_function(k.at("q2"), "kernel.q2")};
    } else if (type == "radial_convolution") {
      p.kernel = RadialConvolutionKernel{parse_function(k.at("g"), "kernel.g"), k.value("support", 8.0)};
    } else if (type == "tabulated") {
      if (k.contains("file")) {
        std::filesystem::path file = k.at("file").get<std::string>();
        if (file.is_relative()) file = base_dir / file;
        p.kernel = TabulatedKernel{read_matrix_csv(file.string())};
      } else {
        const auto rows = k.at("matrix").get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (rows[r].size() != static_cast<std::size_t>(m.cols())) throw ConfigError("kernel.matrix rows differ in length");
          for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
        p.kernel = TabulatedKernel{std::move(m)};
      }
    } else {
      throw ConfigError("unknown kernel type '" + type + "'");
    }

    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      cfg.solver.eigen.tol = s.value("eig_tol", cfg.solver.eigen.tol);
      cfg.solver.eigen.max_iter = s.value("eig_max_iter", cfg.solver.eigen.max_iter);
      cfg.solver.newton.tol = s.value("newton_tol", cfg.solver.newton.tol);
      cfg.solver.newton.max_iter = s.value("newton_max_iter", cfg.solver.newton.max_iter);
      cfg.solver.newton.trivial_threshold = s.value("trivial_threshold", cfg.solver.newton.trivial_threshold);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!(cfg.solver.eigen.tol > 0.0) || !(cfg.solver.newton.tol > 0.0) || !(cfg.solver.newton.trivial_threshold > 0.0))
    throw ConfigError("solver tolerances must be positive");
  p.check();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j, std::filesystem::path(path).parent_path());
}

}  // namespace nlbif
