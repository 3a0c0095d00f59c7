#pragma once

namespace surfsig {

// (x)! = Gamma(x + 1)
double frac_factorial(double x);

// Extension constants for paths and surfaces at regularity rho.
double beta_rp(double rho);
double beta_rs(double rho);
double beta_auto(double rho);

// W^k_sigma(omega_s, omega_t)
double w_poly(int k, double sigma, double ws, double wt);

struct NeoclassicalResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

NeoclassicalResult neoclassical_check(double rho, int n, double s, double t);

}  // namespace surfsig
