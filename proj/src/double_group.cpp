#include "surfsig/double_group.hpp"

#include <cmath>
#include <string>

namespace surfsig {

static void check_shapes(const Square& S) {
  require_same_shape(S.x, S.y);
  require_same_shape(S.x, S.z);
  require_same_shape(S.x, S.w);
  if (S.E.dim() != S.x.dim() || S.E.cap() != S.x.cap()) throw ShapeError("square interior does not match edges");
}

double boundary_residual(const Square& S) {
  check_shapes(S);
  GradedTensor0 b = S.x * S.y * t0_inverse(S.z) * t0_inverse(S.w);
  return max_level_diff(cm_delta(S.E), b);
}

Square make_square(GradedTensor0 x, GradedTensor0 y, GradedTensor0 z, GradedTensor0 w, Tensor1Hat E, double tol) {
  Square S{std::move(x), std::move(y), std::move(z), std::move(w), std::move(E)};
  double r = boundary_residual(S);
  if (!(r <= tol)) throw DomainError("boundary violation, residual " + std::to_string(r));
  return S;
}

Square compose_h(const Square& S, const Square& T, double edge_tol) {
  double m = max_level_diff(S.y, T.w);
  if (!(m <= edge_tol)) throw DomainError("squares not horizontally composable, mismatch " + std::to_string(m));
  Square R;
  R.x = S.x * T.x;
  R.y = T.y;
  R.z = S.z * T.z;
  R.w = S.w;
  R.E = star(group_act(S.x, T.E), S.E);
  return R;
}

Square compose_v(const Square& S, const Square& T, double edge_tol) {
  double m = max_level_diff(S.z, T.x);
  if (!(m <= edge_tol)) throw DomainError("squares not vertically composable, mismatch " + std::to_string(m));
  Square R;
  R.x = S.x;
  R.y = S.y * T.y;
  R.z = T.z;
  R.w = S.w * T.w;
  R.E = star(S.E, group_act(S.w, T.E));
  return R;
}

Square identity_h(const GradedTensor0& x) {
  GradedTensor0 one = GradedTensor0::unit(x.dim(), x.cap());
  return {one, x, one, x, Tensor1Hat::one(x.dim(), x.cap())};
}

Square identity_v(const GradedTensor0& x) {
  GradedTensor0 one = GradedTensor0::unit(x.dim(), x.cap());
  return {x, one, x, one, Tensor1Hat::one(x.dim(), x.cap())};
}

Square inverse_h(const Square& S) {
  GradedTensor0 xi = t0_inverse(S.x);
  return {xi, S.w, t0_inverse(S.z), S.y, group_act(xi, star_inverse(S.E))};
}

Square inverse_v(const Square& S) {
  GradedTensor0 wi = t0_inverse(S.w);
  return {S.z, t0_inverse(S.y), S.x, wi, group_act(wi, star_inverse(S.E))};
}

double square_diff(const Square& a, const Square& b) {
  double m = max_level_diff(a.x, b.x);
  m = std::max(m, max_level_diff(a.y, b.y));
  m = std::max(m, max_level_diff(a.z, b.z));
  m = std::max(m, max_level_diff(a.w, b.w));
  return std::max(m, max_level_diff(a.E, b.E));
}

}  // namespace surfsig
