#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>

#include "surfsig/crossed_module.hpp"
#include "surfsig/double_group.hpp"
#include "surfsig/graded_tensor.hpp"
#include "surfsig/surface_grid.hpp"

namespace surfsig {

// Controls omega(a, b) = C_omega |b - a| in both directions, sigma = rho / 2.
struct HolderParams {
  double rho = 1.0;
  double beta = 0.0;  // <= 0 means beta_auto(rho)
  double C_omega = 1.0;

  double sigma() const { return 0.5 * rho; }
  double omega(double a, double b) const { return C_omega * std::abs(b - a); }
  double beta_value() const;
};

void validate(const HolderParams& hp);

// Double group functional: horizontal paths x^h(s1, s2; t), vertical paths
// x^v(s; t1, t2) and the surface component X(rect), all truncated at N.
struct DGF {
  int d = 0;
  int N = 0;
  Rect domain;
  HolderParams hp;
  std::function<GradedTensor0(double, double, double)> horizontal;
  std::function<GradedTensor0(double, double, double)> vertical;
  std::function<Tensor1Hat(const Rect&)> surface;
  // set when the path components are PL signatures of the lines of this grid
  std::shared_ptr<const SurfaceGrid> grid;
  // raised when an extension step used the minimal-norm preimage instead of the section
  std::shared_ptr<std::atomic<bool>> section_fallback;

  // x = x^h(s1,s2;t1), y = x^v(s2;t1,t2), z = x^h(s1,s2;t2), w = x^v(s1;t1,t2)
  Square square(const Rect& r) const;
  GradedTensor0 boundary(const Rect& r) const;
};

// Signature of the bilinear interpolant along a horizontal or vertical line.
GradedTensor0 horizontal_line_signature(const SurfaceGrid& g, double s1, double s2, double t, int N);
GradedTensor0 vertical_line_signature(const SurfaceGrid& g, double s, double t1, double t2, int N);

// DGF whose path components are the grid line signatures at cap N; the
// surface component is left empty.
DGF grid_paths(std::shared_ptr<const SurfaceGrid> g, int N, const HolderParams& hp);

Rect dyadic_rect(const Rect& dom, int m, int i, int j);
// indices of r among the depth-m dyadic rectangles of dom; false when r is not one
bool dyadic_index(const Rect& dom, const Rect& r, int m, int& i, int& j, double tol = 1e-9);

double dgf_boundary_residual(const DGF& f, const Rect& r);
// compares the value on r with the horizontal and vertical composites split at (s, t)
double dgf_multiplicativity_residual(const DGF& f, const Rect& r, double s, double t);

}  // namespace surfsig
