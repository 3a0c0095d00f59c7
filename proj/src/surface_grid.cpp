#include <algorithm>
#include <cmath>
#include <string>

#include "surfsig/surface_grid.hpp"

namespace surfsig {

SurfaceGrid::SurfaceGrid(int d, int ns, int nt, Rect domain) : d_(d), ns_(ns), nt_(nt), dom_(domain) {
  if (d < 1) throw DomainError("grid needs d >= 1");
  if (ns < 1 || nt < 1) throw DomainError("grid needs at least one cell in each direction");
  if (!(domain.s2 > domain.s1) || !(domain.t2 > domain.t1)) throw DomainError("grid domain is empty");
  v_.assign(static_cast<size_t>(ns + 1) * (nt + 1), Eigen::VectorXd::Zero(d));
}

SurfaceGrid SurfaceGrid::sample(int d, int ns, int nt, Rect domain,
                                const std::function<Eigen::VectorXd(double, double)>& X) {
  SurfaceGrid g(d, ns, nt, domain);
  for (int j = 0; j <= nt; ++j)
    for (int i = 0; i <= ns; ++i) {
      Eigen::VectorXd v = X(g.s_at(i), g.t_at(j));
      if (v.size() != d) throw ShapeError("sampled value has the wrong dimension");
      if (!v.allFinite()) throw DomainError("non-finite surface sample");
      g.at(i, j) = v;
    }
  return g;
}

int SurfaceGrid::cell_s(double s) const {
  int i = static_cast<int>(std::floor((s - dom_.s1) / ds()));
  return std::clamp(i, 0, ns_ - 1);
}

int SurfaceGrid::cell_t(double t) const {
  int j = static_cast<int>(std::floor((t - dom_.t1) / dt()));
  return std::clamp(j, 0, nt_ - 1);
}

Eigen::VectorXd SurfaceGrid::eval(double s, double t) const {
  const int i = cell_s(s), j = cell_t(t);
  const double u = (s - s_at(i)) / ds(), v = (t - t_at(j)) / dt();
  return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
         u * v * at(i + 1, j + 1);
}

static int lattice_index(double x, double x0, double h, int n, const char* what) {
  const double k = (x - x0) / h;
  const long r = std::lround(k);
  if (std::abs(k - r) > 1e-9 || r < 0 || r > n)
    throw DomainError(std::string("rectangle edge is not on the grid lattice in ") + what);
  return static_cast<int>(r);
}

void SurfaceGrid::lattice_rect(const Rect& r, int& i0, int& i1, int& j0, int& j1) const {
  i0 = lattice_index(r.s1, dom_.s1, ds(), ns_, "s");
  i1 = lattice_index(r.s2, dom_.s1, ds(), ns_, "s");
  j0 = lattice_index(r.t1, dom_.t1, dt(), nt_, "t");
  j1 = lattice_index(r.t2, dom_.t1, dt(), nt_, "t");
  if (i1 <= i0 || j1 <= j0) throw DomainError("rectangle is empty");
}

bool SurfaceGrid::contains(const Rect& r) const {
  const double es = 1e-12 * (dom_.s2 - dom_.s1), et = 1e-12 * (dom_.t2 - dom_.t1);
  return r.s1 >= dom_.s1 - es && r.s2 <= dom_.s2 + es && r.t1 >= dom_.t1 - et && r.t2 <= dom_.t2 + et &&
         r.s1 <= r.s2 && r.t1 <= r.t2;
}

SurfaceGrid SurfaceGrid::sub(int i0, int i1, int j0, int j1) const {
  if (i0 < 0 || j0 < 0 || i1 > ns_ || j1 > nt_ || i1 <= i0 || j1 <= j0)
    throw DomainError("sub-grid indices out of range");
  SurfaceGrid g(d_, i1 - i0, j1 - j0, {s_at(i0), s_at(i1), t_at(j0), t_at(j1)});
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) g.at(i - i0, j - j0) = at(i, j);
  return g;
}

SurfaceGrid SurfaceGrid::channel(int c) const {
  if (c < 0 || c >= d_) throw DomainError("channel " + std::to_string(c) + " out of range");
  SurfaceGrid g(1, ns_, nt_, dom_);
  for (size_t k = 0; k < v_.size(); ++k) g.v_[k] = v_[k].segment(c, 1);
  return g;
}

}  // namespace surfsig
