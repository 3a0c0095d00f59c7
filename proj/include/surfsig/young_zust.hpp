#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "surfsig/dgf.hpp"
#include "surfsig/surface_grid.hpp"

namespace surfsig {

// Real field on a rectangle: either one channel of a sampled grid (bilinear
// interpolant) or a callable.
class ScalarField2D {
 public:
  explicit ScalarField2D(const SurfaceGrid& g, int channel = 0);
  ScalarField2D(std::function<double(double, double)> f, Rect domain);

  double operator()(double s, double t) const;
  const Rect& domain() const { return dom_; }
  const SurfaceGrid* grid() const { return grid_.get(); }
  // lattice lines strictly inside (a, b); none for callables
  std::vector<double> s_breaks(double a, double b) const;
  std::vector<double> t_breaks(double a, double b) const;

 private:
  std::shared_ptr<const SurfaceGrid> grid_;
  std::function<double(double, double)> f_;
  Rect dom_;
};

// f(s1,t1) - f(s1,t2) - f(s2,t1) + f(s2,t2); sampled fields need lattice corners
double increment2d(const ScalarField2D& f, const Rect& r);
Eigen::VectorXd increment2d(const SurfaceGrid& X, const Rect& r);

// Dyadic sums over 2^m x 2^m sub-cells, m = 0..depth.
struct DyadicTrace {
  std::vector<Eigen::VectorXd> raw;  // raw[m]
  std::vector<double> gaps;          // gaps[m-1] = max |raw[m] - raw[m-1]|
  Eigen::VectorXd value;             // raw[depth], or the Romberg estimate
  double slope = 0.0;                // log2 gap slope over the last levels
  bool cauchy = true;
};

using CellTerm = std::function<Eigen::VectorXd(const Rect&)>;
// romberg > 0 eliminates the h, h^2, ... error terms using the last romberg+1 depths
DyadicTrace dyadic_sum(const Rect& r, const CellTerm& term, int depth, int romberg = 0);

struct IntegralTrace {
  double value = 0.0;
  std::vector<double> raw;
  std::vector<double> gaps;
  double slope = 0.0;
  bool cauchy = true;
};

// signed area of the loop (g1, g2) around the boundary of a cell, traced
// through the lattice crossings of sampled fields
double loop_area(const ScalarField2D& g1, const ScalarField2D& g2, const Rect& cell);

// sum of f(lower-left corner) * loop_area over dyadic sub-cells
IntegralTrace zust_integral(const ScalarField2D& f, const ScalarField2D& g1, const ScalarField2D& g2, const Rect& r,
                            int depth, int romberg = 0);
// sum of f(lower-left corner) * increment2d(g) over dyadic sub-cells
IntegralTrace young_increment_integral(const ScalarField2D& f, const ScalarField2D& g, const Rect& r, int depth,
                                       int romberg = 3);

// Lambda^2 coordinates (pairs i<j) of the level-2 loop signature of the cell
// boundary of the bilinear interpolant.
Eigen::VectorXd cell_area(const SurfaceGrid& X, const Rect& cell);

// A(i, j) = area of the boundary loop of [s_min, s_i] x [t_min, t_j]; a grid
// with d(d-1)/2 channels on the same lattice.
SurfaceGrid area_process(const SurfaceGrid& X);

// Paths: line signatures at cap 2; surface: loop area of the rectangle.
DGF zust_lift_level2(std::shared_ptr<const SurfaceGrid> X, const HolderParams& hp = {});

struct YoungReport {
  double rect_holder = 0.0;  // sup |box X| / (|ds|^rho |dt|^rho) over dyadic blocks of cells
  bool young_regime = true;  // rho > 1/2
};

// bar coordinates of int (X - X(s1,t1)) |> dA over r. The rectangle is split
// at the lattice lines and each piece uses corner sums at depths 0..depth with
// Romberg elimination.
Eigen::VectorXd young_level3(const SurfaceGrid& X, const Rect& r, int depth = 4);
// raw dyadic corner sums over r itself, for the Cauchy trace
DyadicTrace young_level3_trace(const SurfaceGrid& X, const Rect& r, int depth);

DGF young_lift_level3(std::shared_ptr<const SurfaceGrid> X, const HolderParams& hp = {}, int depth = 4,
                      YoungReport* report = nullptr);

}  // namespace surfsig
