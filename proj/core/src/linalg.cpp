#include "adhm/linalg.hpp"

namespace adhm {

json matrix_to_json(const Matrix& m) {
  json entries = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("entries"))
    throw std::invalid_argument("matrix_from_json: need rows/cols/entries");
  int rows = j.at("rows").get<int>();
  int cols = j.at("cols").get<int>();
  const auto& e = j.at("entries");
  if (rows < 0 || cols < 0 ||
      e.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
    throw std::invalid_argument("matrix_from_json: entry count mismatch");
  Matrix m(rows, cols);
  size_t idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int jj = 0; jj < cols; ++jj, ++idx) {
      const auto& pair = e.at(idx);
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("matrix_from_json: entries are [re,im]");
      m(i, jj) = Cx(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  return m;
}

}  // namespace adhm
