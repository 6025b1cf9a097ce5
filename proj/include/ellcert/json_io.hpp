#pragma once

// Small helpers shared by the program and certificate document formats.
// Numbers are written with nlohmann's shortest round-trip representation,
// so serialized doubles parse back bit-exact.

#include <cmath>
#include <string>

#include "json.hpp"

#include "ellcert/errors.hpp"
#include "ellcert/matrixkit.hpp"

namespace ellcert {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double finite_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where, "number must be finite");
  return v;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ParseError(where, "expected a non-empty array of rows");
  }
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<double> data;
  for (std::size_t r = 0; r < rows; ++r) {
    const nlohmann::json& row = j[r];
    if (!row.is_array() || row.empty()) {
      throw ParseError(where + "[" + std::to_string(r) + "]", "expected a non-empty row array");
    }
    if (r == 0) {
      cols = row.size();
      data.reserve(rows * cols);
    } else if (row.size() != cols) {
      throw ParseError(where + "[" + std::to_string(r) + "]", "ragged row length");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      data.push_back(finite_number(row[c], where + "[" + std::to_string(r) + "][" +
                                               std::to_string(c) + "]"));
    }
  }
  return Matrix(rows, cols, std::move(data));
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                           const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where, std::string("missing field '") + key + "'");
  return *it;
}

inline int int_field(const nlohmann::json& j, const char* key, const std::string& where) {
  const nlohmann::json& f = require_field(j, key, where);
  if (!f.is_number_integer()) {
    throw ParseError(where + "." + key, "expected an integer");
  }
  return f.get<int>();
}

}  // namespace ellcert
