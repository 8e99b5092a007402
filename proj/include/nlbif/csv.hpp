#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlbif/error.hpp"
#include "nlbif/grid.hpp"

namespace nlbif {

/// Fixed 17-significant-digit formatting used by every CSV writer.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Columns r,value; one line per node, newline-terminated.
inline void write_field_csv(std::ostream& os, const Field& u) {
  os << "r,value\n";
  for (Eigen::Index i = 0; i < u.size(); ++i) os << format_real(u.grid->nodes(i)) << ',' << format_real(u(i)) << '\n';
}

struct FieldSamples {
  std::vector<double> r;
  std::vector<double> value;
};

inline FieldSamples read_field_csv(std::istream& is) {
  FieldSamples out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      if (line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos) continue;  // header
    }
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
      throw ConfigError("field CSV line needs two columns: '" + line + "'");
    try {
      out.r.push_back(std::stod(a));
      out.value.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw ConfigError("field CSV line is not numeric: '" + line + "'");
    }
  }
  if (out.r.size() < 2) throw ConfigError("field CSV needs at least two rows");
  return out;
}

inline FieldSamples read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file " + path);
  return read_field_csv(in);
}

/// Samples placed on a grid: copied when the abscissae coincide, otherwise linearly interpolated.
inline Field field_on_grid(const FieldSamples& s, std::shared_ptr<const RadialGrid> grid) {
  const auto n = static_cast<std::size_t>(grid->size());
  bool same = s.r.size() == n;
  for (std::size_t i = 0; same && i < n; ++i)
    same = std::abs(s.r[i] - grid->nodes(static_cast<Eigen::Index>(i))) <= 1e-12 * std::max(1.0, grid->r_max());
  if (same) return Field(grid, Eigen::Map<const Vector>(s.value.data(), static_cast<Eigen::Index>(n)));
  const RadialFunction interp = RadialFunction::tabulated(s.r, s.value);
  return Field::sample(grid, interp);
}

/// Dense matrix, one row per line, comma separated, no header.
inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_real(m(i, j));
    }
    os << '\n';
  }
}

inline Eigen::MatrixXd read_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("matrix CSV entry is not numeric: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ConfigError("matrix CSV rows differ in length");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file " + path);
  return read_matrix_csv(in);
}

}  // namespace nlbif
