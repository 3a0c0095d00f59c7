#include "surfsig/holder.hpp"

#include <cmath>

#include "surfsig/errors.hpp"

namespace surfsig {

double frac_factorial(double x) { return std::tgamma(x + 1.0); }

static void check_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("rho must lie in (0,1]");
}

double beta_rp(double rho) {
  check_rho(rho);
  const double p = rho * (std::floor(1.0 / rho + 1e-12) + 1.0);
  // sum_{r>=3} (2/(r-2))^p = 2^p zeta(p)
  return 2.0 / (rho * rho) * (1.0 + std::pow(2.0, p) * std::riemann_zeta(p));
}

double beta_rs(double rho) {
  check_rho(rho);
  const double e = 1.0 - (std::floor(2.0 / rho + 1e-12) + 1.0) * rho;
  return 1.5 / (1.0 - std::pow(4.0, e));
}

double beta_auto(double rho) { return std::max(beta_rp(rho), beta_rs(rho)); }

double w_poly(int k, double sigma, double ws, double wt) {
  if (k < 1) throw DomainError("w_poly needs k >= 1");
  double s = 0.0;
  for (int q = 1; q <= 2 * k - 1; ++q)
    s += std::pow(ws, q * sigma) * std::pow(wt, (2 * k - q) * sigma) /
         (frac_factorial(q * sigma) * frac_factorial((2 * k - q) * sigma));
  return std::pow(2.0, 2 * k * sigma) * s;
}

NeoclassicalResult neoclassical_check(double rho, int n, double s, double t) {
  check_rho(rho);
  if (n < 0 || s < 0.0 || t < 0.0) throw DomainError("neoclassical check needs n, s, t >= 0");
  NeoclassicalResult r;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i)
    sum += std::pow(s, i * rho) * std::pow(t, (n - i) * rho) /
           (frac_factorial(i * rho) * frac_factorial((n - i) * rho));
  r.lhs = rho * sum;
  r.rhs = std::pow(s + t, n * rho) / frac_factorial(n * rho);
  r.ok = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

}  // namespace surfsig
