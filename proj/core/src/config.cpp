#include "adhm/config.hpp"

namespace adhm {

bool config_shapes_ok(const ADHMConfig& c) {
  return c.r >= 1 && c.k >= 1 && c.v.rows() == c.k && c.v.cols() == c.r &&
         c.w.rows() == c.k && c.w.cols() == c.r && c.A.rows() == c.k &&
         c.A.cols() == c.k && c.B.rows() == c.k && c.B.cols() == c.k;
}

ADHMConfig random_config(int r, int k, RandomStream& rs) {
  ADHMConfig c;
  c.r = r;
  c.k = k;
  c.v = rs.gaussian_matrix(k, r);
  c.w = rs.gaussian_matrix(k, r);
  c.A = rs.gaussian_matrix(k, k);
  c.B = rs.gaussian_matrix(k, k);
  return c;
}

ADHMConfig gauge_act(const Matrix& g, const ADHMConfig& c) {
  ADHMConfig out = c;
  out.v = g * c.v;
  out.w = g * c.w;
  out.A = g * c.A * g.adjoint();
  out.B = g * c.B * g.adjoint();
  return out;
}

XiQuaternionic xi_from_chart(const Matrix& A, const Matrix& B) {
  const Cx ih(0, 0.5);
  XiQuaternionic xi;
  xi.x0 = (A.adjoint() - A) / 2.0;
  xi.x1 = -ih * (A + A.adjoint());
  xi.x2 = (B - B.adjoint()) / 2.0;
  xi.x3 = ih * (B + B.adjoint());
  return xi;
}

void chart_from_xi(const XiQuaternionic& xi, Matrix& A, Matrix& B) {
  const Cx im(0, 1);
  A = -xi.x0 + im * xi.x1;
  B = xi.x2 - im * xi.x3;
}

XiQuaternionic xi_of(const ADHMConfig& c) { return xi_from_chart(c.A, c.B); }

QuaternionicVector psi_column(const ADHMConfig& c, int col) {
  return {c.v.col(col), c.w.col(col)};
}

XiQuaternionic gauge_act_xi(const Matrix& g, const XiQuaternionic& xi) {
  Matrix gh = g.adjoint();
  return {g * xi.x0 * gh, g * xi.x1 * gh, g * xi.x2 * gh, g * xi.x3 * gh};
}

json config_to_json(const ADHMConfig& c) {
  return json{{"r", c.r},
              {"k", c.k},
              {"v", matrix_to_json(c.v)},
              {"w", matrix_to_json(c.w)},
              {"A", matrix_to_json(c.A)},
              {"B", matrix_to_json(c.B)}};
}

ADHMConfig config_from_json(const json& j) {
  ADHMConfig c;
  c.r = j.at("r").get<int>();
  c.k = j.at("k").get<int>();
  c.v = matrix_from_json(j.at("v"));
  c.w = matrix_from_json(j.at("w"));
  c.A = matrix_from_json(j.at("A"));
  c.B = matrix_from_json(j.at("B"));
  if (!config_shapes_ok(c))
    throw std::invalid_argument("config_from_json: inconsistent shapes");
  return c;
}

}  // namespace adhm
