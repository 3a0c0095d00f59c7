#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "surfsig/errors.hpp"

namespace surfsig {

struct Rect {
  double s1 = 0.0, s2 = 1.0, t1 = 0.0, t2 = 1.0;
};

// Uniform samples of a surface in R^d on [s_min,s_max] x [t_min,t_max],
// interpreted as the piecewise bilinear interpolant.
class SurfaceGrid {
 public:
  SurfaceGrid() = default;
  SurfaceGrid(int d, int ns, int nt, Rect domain);

  static SurfaceGrid sample(int d, int ns, int nt, Rect domain,
                            const std::function<Eigen::VectorXd(double, double)>& X);

  int dim() const { return d_; }
  int ns() const { return ns_; }
  int nt() const { return nt_; }
  const Rect& domain() const { return dom_; }
  double ds() const { return (dom_.s2 - dom_.s1) / ns_; }
  double dt() const { return (dom_.t2 - dom_.t1) / nt_; }
  double s_at(int i) const { return dom_.s1 + i * ds(); }
  double t_at(int j) const { return dom_.t1 + j * dt(); }

  Eigen::VectorXd& at(int i, int j) { return v_[static_cast<size_t>(j) * (ns_ + 1) + i]; }
  const Eigen::VectorXd& at(int i, int j) const { return v_[static_cast<size_t>(j) * (ns_ + 1) + i]; }

  Eigen::VectorXd eval(double s, double t) const;
  // cell index containing s (clamped to the last cell at the right edge)
  int cell_s(double s) const;
  int cell_t(double t) const;

  // sample indices of a lattice-aligned rectangle; throws DomainError otherwise
  void lattice_rect(const Rect& r, int& i0, int& i1, int& j0, int& j1) const;
  bool contains(const Rect& r) const;

  // restriction to a rectangle of whole cells [i0,i1] x [j0,j1] (sample indices)
  SurfaceGrid sub(int i0, int i1, int j0, int j1) const;
  // one channel as a scalar field on the same lattice
  SurfaceGrid channel(int c) const;

 private:
  int d_ = 0;
  int ns_ = 0;
  int nt_ = 0;
  Rect dom_;
  std::vector<Eigen::VectorXd> v_;
};

}  // namespace surfsig
