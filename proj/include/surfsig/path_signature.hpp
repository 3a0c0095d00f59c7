#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "surfsig/graded_tensor.hpp"
#include "surfsig/surface_grid.hpp"

namespace surfsig {

class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath() = default;
  // parameters strictly increasing, at least two samples
  PiecewiseLinearPath(std::vector<double> u, std::vector<Eigen::VectorXd> x);

  int dim() const { return static_cast<int>(x_.front().size()); }
  size_t size() const { return u_.size(); }
  double start() const { return u_.front(); }
  double end() const { return u_.back(); }
  const std::vector<double>& params() const { return u_; }
  const std::vector<Eigen::VectorXd>& points() const { return x_; }

  Eigen::VectorXd at(double s) const;
  PiecewiseLinearPath restrict(double a, double b) const;
  // concatenation; the second path is translated to start at the end point
  PiecewiseLinearPath then(const PiecewiseLinearPath& o) const;

 private:
  std::vector<double> u_;
  std::vector<Eigen::VectorXd> x_;
};

GradedTensor0 segment_signature(const Eigen::VectorXd& delta, int N);
GradedTensor0 pl_signature(const PiecewiseLinearPath& p, int N);
// signature of the restriction to [a, b] without building the restricted path
GradedTensor0 pl_signature(const PiecewiseLinearPath& p, double a, double b, int N);

// Left edge from the base corner up to (s_min, t), then along the row to (s, t).
PiecewiseLinearPath tail_path(const SurfaceGrid& g, double s, double t);

// Multiplicative functional on [a, b] with Hoelder data.
struct PathFunctional {
  int d = 0;
  int N = 0;
  double a = 0.0, b = 1.0;
  std::function<GradedTensor0(double, double)> eval;
  double rho = 1.0;
  double beta = 1.0;
  double C_omega = 1.0;

  double omega(double s1, double s2) const { return C_omega * std::abs(s2 - s1); }
};

// C_omega <= 0 estimates the constant from the samples; beta <= 0 uses beta_auto(rho).
PathFunctional functional_from_path(const PiecewiseLinearPath& p, int N, double rho = 1.0, double C_omega = 0.0,
                                    double beta = 0.0);

// sup |x(v) - x(u)| / |v - u|^rho over sample pairs
double holder_constant(const PiecewiseLinearPath& p, double rho);

// worst ratio per level of |x^(k)| to omega^(k rho) / (beta (k rho)!) over dyadic pairs up to depth
std::vector<double> path_regularity(const PathFunctional& f, int depth);
double multiplicativity_residual(const PathFunctional& f, int samples, unsigned long seed);

struct ExtensionOptions {
  int m_max = 10;
  double tol = 1e-8;
  int base = 2;  // pieces per refinement step
  bool throw_on_fail = true;
  // Richardson step on the dyadic sequence, error ratio base^((n+1) rho - 1)
  bool extrapolate = true;
};

struct ExtensionTrace {
  std::vector<double> gaps;  // gaps[m-1] = |G_m - G_(m-1)| on the new levels, raw products
  std::vector<double> extrapolated_gaps;
  int depth = 0;
  bool converged = false;
};

// value on [s1, s2] of the multiplicative extension of f to cap `target`
GradedTensor0 lyons_value(const PathFunctional& f, int target, double s1, double s2, const ExtensionOptions& opt,
                          ExtensionTrace* trace = nullptr);

PathFunctional lyons_extend(const PathFunctional& f, int target, const ExtensionOptions& opt = {});

}  // namespace surfsig
