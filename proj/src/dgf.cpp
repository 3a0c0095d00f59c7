#include "surfsig/dgf.hpp"

#include <algorithm>
#include <cmath>

#include "surfsig/errors.hpp"
#include "surfsig/holder.hpp"
#include "surfsig/path_signature.hpp"

namespace surfsig {

double HolderParams::beta_value() const { return beta > 0.0 ? beta : beta_auto(rho); }

void validate(const HolderParams& hp) {
  if (!(hp.rho > 0.0 && hp.rho <= 1.0)) throw DomainError("rho must lie in (0,1]");
  if (!(hp.C_omega > 0.0) || !std::isfinite(hp.C_omega)) throw DomainError("C_omega must be positive");
  if (!std::isfinite(hp.beta)) throw DomainError("beta must be finite");
}

Square DGF::square(const Rect& r) const {
  if (!horizontal || !vertical || !surface) throw DomainError("functional is incomplete");
  return {horizontal(r.s1, r.s2, r.t1), vertical(r.s2, r.t1, r.t2), horizontal(r.s1, r.s2, r.t2),
          vertical(r.s1, r.t1, r.t2), surface(r)};
}

GradedTensor0 DGF::boundary(const Rect& r) const {
  return horizontal(r.s1, r.s2, r.t1) * vertical(r.s2, r.t1, r.t2) * t0_inverse(horizontal(r.s1, r.s2, r.t2)) *
         t0_inverse(vertical(r.s1, r.t1, r.t2));
}

// product of segment signatures through the lattice crossings of [a, b]
template <class At>
static GradedTensor0 line_signature(int d, double a, double b, double x0, double h, int n, int N, At at) {
  GradedTensor0 r = GradedTensor0::unit(d, N);
  if (!(b > a)) return r;
  Eigen::VectorXd prev = at(a);
  const int k0 = std::max(1, static_cast<int>(std::floor((a - x0) / h)) + 1);
  for (int k = k0; k < n; ++k) {
    const double u = x0 + k * h;
    if (u <= a + 1e-13 * h) continue;
    if (u >= b - 1e-13 * h) break;
    Eigen::VectorXd p = at(u);
    r = r * segment_signature(p - prev, N);
    prev = std::move(p);
  }
  return r * segment_signature(at(b) - prev, N);
}

GradedTensor0 horizontal_line_signature(const SurfaceGrid& g, double s1, double s2, double t, int N) {
  return line_signature(g.dim(), s1, s2, g.domain().s1, g.ds(), g.ns(), N,
                        [&](double s) { return g.eval(s, t); });
}

GradedTensor0 vertical_line_signature(const SurfaceGrid& g, double s, double t1, double t2, int N) {
  return line_signature(g.dim(), t1, t2, g.domain().t1, g.dt(), g.nt(), N,
                        [&](double t) { return g.eval(s, t); });
}

DGF grid_paths(std::shared_ptr<const SurfaceGrid> g, int N, const HolderParams& hp) {
  if (!g) throw DomainError("missing grid");
  if (N < 1) throw DomainError("cap must be at least 1");
  validate(hp);
  DGF f;
  f.d = g->dim();
  f.N = N;
  f.domain = g->domain();
  f.hp = hp;
  f.grid = g;
  f.horizontal = [g, N](double s1, double s2, double t) { return horizontal_line_signature(*g, s1, s2, t, N); };
  f.vertical = [g, N](double s, double t1, double t2) { return vertical_line_signature(*g, s, t1, t2, N); };
  return f;
}

Rect dyadic_rect(const Rect& dom, int m, int i, int j) {
  const double n = std::ldexp(1.0, m);
  const double hs = (dom.s2 - dom.s1) / n, ht = (dom.t2 - dom.t1) / n;
  return {dom.s1 + i * hs, i + 1 == n ? dom.s2 : dom.s1 + (i + 1) * hs, dom.t1 + j * ht,
          j + 1 == n ? dom.t2 : dom.t1 + (j + 1) * ht};
}

bool dyadic_index(const Rect& dom, const Rect& r, int m, int& i, int& j, double tol) {
  const double n = std::ldexp(1.0, m);
  const double a = (r.s1 - dom.s1) / (dom.s2 - dom.s1) * n, b = (r.s2 - dom.s1) / (dom.s2 - dom.s1) * n;
  const double c = (r.t1 - dom.t1) / (dom.t2 - dom.t1) * n, e = (r.t2 - dom.t1) / (dom.t2 - dom.t1) * n;
  i = static_cast<int>(std::lround(a));
  j = static_cast<int>(std::lround(c));
  return std::abs(a - i) < tol && std::abs(c - j) < tol && std::abs(b - i - 1) < tol && std::abs(e - j - 1) < tol &&
         i >= 0 && j >= 0 && i < n && j < n;
}

double dgf_boundary_residual(const DGF& f, const Rect& r) { return boundary_residual(f.square(r)); }

double dgf_multiplicativity_residual(const DGF& f, const Rect& r, double s, double t) {
  if (!(s > r.s1 && s < r.s2 && t > r.t1 && t < r.t2)) throw DomainError("split point must lie inside the rectangle");
  const Square whole = f.square(r);
  const double tol = 1e300;
  Square h = compose_h(f.square({r.s1, s, r.t1, r.t2}), f.square({s, r.s2, r.t1, r.t2}), tol);
  Square v = compose_v(f.square({r.s1, r.s2, r.t1, t}), f.square({r.s1, r.s2, t, r.t2}), tol);
  return std::max(square_diff(h, whole), square_diff(v, whole));
}

}  // namespace surfsig
