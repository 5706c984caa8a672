#pragma once

#include "pnest/errors.hpp"
#include "pnest/types.hpp"

#include <nlohmann/json.hpp>

namespace pnest::detail {

// Row-major nested arrays; complex entries are [re, im] pairs.
inline nlohmann::json complex_rows(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json real_rows(const RMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json real_vector(const RVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename Matrix, typename Fn>
Matrix read_rows(const nlohmann::json& j, Fn&& cell) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != cols)
      throw Error(ErrorKind::ShapeMismatch, "ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cell(j.at(r).at(c));
  }
  return m;
}

inline CMatrix read_complex_rows(const nlohmann::json& j) {
  return read_rows<CMatrix>(
      j, [](const nlohmann::json& v) { return cplx(v.at(0).get<double>(), v.at(1).get<double>()); });
}

inline RMatrix read_real_rows(const nlohmann::json& j) {
  return read_rows<RMatrix>(j, [](const nlohmann::json& v) { return v.get<double>(); });
}

inline RVector read_real_vector(const nlohmann::json& j) {
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

}  // namespace pnest::detail
