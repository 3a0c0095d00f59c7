#pragma once

#include <Eigen/Dense>
#include <vector>

#include "surfsig/crossed_module.hpp"
#include "surfsig/double_group.hpp"
#include "surfsig/surface_grid.hpp"

namespace surfsig {

enum class SRule { gauss, trapezoid };

// Per grid cell: t_steps RK4 steps in t, s_nodes nodes of the inner s-rule.
// With adaptive set, both counts double until successive results differ by
// less than tol at every level, at most max_doublings times.
struct CellQuadrature {
  int t_steps = 8;
  int s_nodes = 8;
  SRule rule = SRule::gauss;
  bool adaptive = true;
  int max_doublings = 6;
  double tol = 1e-8;
  // make_square tolerance, relative to the largest edge norm
  double boundary_tol = 1e-5;
};

struct QuadratureReport {
  int t_steps = 0;
  int s_nodes = 0;
  double delta = 0.0;  // level-wise gap between the last two refinements
  bool converged = false;
};

// Lambda^2 coordinates (pairs i<j) of the Jacobian form at (s, t) of the
// bilinear cell (i, j).
Eigen::VectorXd jacobian_form(const SurfaceGrid& g, int i, int j, double s, double t);

// Interior of the block of cells [i0,i1) x [j0,j1) (cell indices).
Tensor1Hat block_interior(const SurfaceGrid& g, int i0, int i1, int j0, int j1, int N, const CellQuadrature& q = {},
                          QuadratureReport* rep = nullptr);
Tensor1Hat cell_signature(const SurfaceGrid& g, int i, int j, int N, const CellQuadrature& q = {},
                          QuadratureReport* rep = nullptr);

// PL signatures of the block edges
GradedTensor0 row_signature(const SurfaceGrid& g, int j, int i0, int i1, int N);
GradedTensor0 column_signature(const SurfaceGrid& g, int i, int j0, int j1, int N);
Square block_square(const SurfaceGrid& g, int i0, int i1, int j0, int j1, int N, const CellQuadrature& q = {},
                    QuadratureReport* rep = nullptr);

// Splits the grid into cells_s x cells_t blocks of whole cells, solves each
// and composes rows with compose_h, then rows with compose_v.
Square surface_signature(const SurfaceGrid& g, int N, const CellQuadrature& q = {}, int cells_s = 1,
                         int cells_t = 1, int jobs = 1);

// Closed-form checks on a lattice-aligned rectangle.
Eigen::VectorXd level2_oracle(const SurfaceGrid& g, const Rect& r);
// bar coordinates of the level-3 slice, int int (X - X(s1,t1)) |> J
Eigen::VectorXd level3_oracle(const SurfaceGrid& g, const Rect& r, int nodes = 8);

struct PicardReport {
  std::vector<Tensor1> terms;  // terms[p] = R^<p> for p >= 1
  std::vector<double> norms;   // norms[p] = |R^<p>|, p = 0..N/2
  double log_C = 0.0;          // fit of log(|R^<p>| p!) = p log C
  double tail_slope = 0.0;     // slope of log |R^<p>| for p >= 2
};
PicardReport picard_norm_report(const SurfaceGrid& g, int N, const CellQuadrature& q = {});

}  // namespace surfsig
