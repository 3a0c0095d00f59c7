#pragma once

#include "surfsig/crossed_module.hpp"
#include "surfsig/graded_tensor.hpp"

namespace surfsig {

// Square with edges x (bottom), y (right), z (top), w (left) and interior E,
// subject to delta(E) = x y z^-1 w^-1.
struct Square {
  GradedTensor0 x, y, z, w;
  Tensor1Hat E;

  int dim() const { return x.dim(); }
  int cap() const { return x.cap(); }
};

double boundary_residual(const Square& S);

Square make_square(GradedTensor0 x, GradedTensor0 y, GradedTensor0 z, GradedTensor0 w, Tensor1Hat E,
                   double tol = 1e-8);

// Edge tolerance is absolute on coefficients (max level norm).
Square compose_h(const Square& S, const Square& T, double edge_tol = 1e-8);
Square compose_v(const Square& S, const Square& T, double edge_tol = 1e-8);

Square identity_h(const GradedTensor0& x);
Square identity_v(const GradedTensor0& x);
Square inverse_h(const Square& S);
Square inverse_v(const Square& S);

double square_diff(const Square& a, const Square& b);

}  // namespace surfsig
