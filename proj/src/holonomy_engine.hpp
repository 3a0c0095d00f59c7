#pragma once

// Fixed-step solver for dR/dt = R * int g(s,t) |> J(s,t) <| g(s,t)^-1 ds on a
// piecewise bilinear grid, generic over the target algebra.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "surfsig/surface_grid.hpp"
#include "surfsig/surface_signature.hpp"

namespace surfsig::detail {

struct Nodes1D {
  std::vector<double> x;  // in [0,1]
  std::vector<double> w;
};

inline Nodes1D gauss_legendre(int n) {
  Nodes1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    r.x[n - 1 - i] = 0.5 * (x + 1.0);
    r.w[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

inline Nodes1D unit_nodes(SRule rule, int n) {
  if (rule == SRule::gauss) return gauss_legendre(n);
  Nodes1D r;
  for (int k = 0; k <= n; ++k) {
    r.x.push_back(static_cast<double>(k) / n);
    r.w.push_back((k == 0 || k == n ? 0.5 : 1.0) / n);
  }
  return r;
}

// bilinear partials inside cell (i, j) at local coordinates (u, v)
inline void cell_partials(const SurfaceGrid& g, int i, int j, double u, double v, Eigen::VectorXd& xs,
                          Eigen::VectorXd& xt) {
  const Eigen::VectorXd &a = g.at(i, j), &b = g.at(i + 1, j), &c = g.at(i, j + 1), &e = g.at(i + 1, j + 1);
  xs = ((1 - v) * (b - a) + v * (e - c)) / g.ds();
  xt = ((1 - u) * (c - a) + u * (e - b)) / g.dt();
}

inline Eigen::VectorXd wedge_coords(const Eigen::VectorXd& xs, const Eigen::VectorXd& xt) {
  const int d = static_cast<int>(xs.size());
  Eigen::VectorXd J(d * (d - 1) / 2);
  int k = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) J[k++] = xs[a] * xt[b] - xs[b] * xt[a];
  return J;
}

// Alg provides Tail, Acc, Kt, Body and
//   Tail tail_one(); Tail tail_exp(dx); Tail tail_mul(a, b);
//   Acc acc_zero(); void accumulate(Acc&, g, ginv, J, w); Kt finish(Acc&);
//   Body body_zero(); Body rhs(const Body& r, const Kt& K);  // K + r * K
//   void axpy(Body& y, double a, const Body& x);
// Tail of (s, t): left edge from the base corner up to t, then along the row at
// height t to s. Transports are rebuilt per t-evaluation column by column.
template <class Alg>
typename Alg::Body solve_holonomy(const SurfaceGrid& g, const Alg& A, int t_steps, int s_nodes, SRule rule) {
  using Tail = typename Alg::Tail;
  using Body = typename Alg::Body;
  using Kt = typename Alg::Kt;
  const Nodes1D un = unit_nodes(rule, s_nodes);
  const int ns = g.ns(), nt = g.nt();
  const double ds = g.ds(), dt = g.dt();

  Tail L = A.tail_one(), Linv = A.tail_one();  // left edge up to the current row
  std::vector<Eigen::VectorXd> row(ns + 1);

  auto K_at = [&](int j, double v) -> Kt {
    for (int i = 0; i <= ns; ++i) row[i] = (1 - v) * g.at(i, j) + v * g.at(i, j + 1);
    Eigen::VectorXd d0 = row[0] - g.at(0, j);
    Tail P = A.tail_mul(L, A.tail_exp(d0)), Pinv = A.tail_mul(A.tail_exp(-d0), Linv);
    auto acc = A.acc_zero();
    Eigen::VectorXd xs, xt;
    for (int i = 0; i < ns; ++i) {
      const Eigen::VectorXd step = row[i + 1] - row[i];
      for (size_t k = 0; k < un.x.size(); ++k) {
        const double u = un.x[k];
        Tail gs = A.tail_mul(P, A.tail_exp(u * step));
        Tail gi = A.tail_mul(A.tail_exp(-u * step), Pinv);
        cell_partials(g, i, j, u, v, xs, xt);
        A.accumulate(acc, gs, gi, wedge_coords(xs, xt), un.w[k] * ds);
      }
      P = A.tail_mul(P, A.tail_exp(step));
      Pinv = A.tail_mul(A.tail_exp(-step), Pinv);
    }
    return A.finish(acc);
  };

  Body r = A.body_zero();
  for (int j = 0; j < nt; ++j) {
    const double h = 1.0 / t_steps;
    const double H = h * dt;
    Kt K0 = K_at(j, 0.0);
    for (int k = 0; k < t_steps; ++k) {
      const double v0 = k * h;
      Kt Km = K_at(j, v0 + 0.5 * h);
      Kt K1 = K_at(j, v0 + h);
      Body k1 = A.rhs(r, K0);
      Body y = r;
      A.axpy(y, 0.5 * H, k1);
      Body k2 = A.rhs(y, Km);
      y = r;
      A.axpy(y, 0.5 * H, k2);
      Body k3 = A.rhs(y, Km);
      y = r;
      A.axpy(y, H, k3);
      Body k4 = A.rhs(y, K1);
      A.axpy(r, H / 6.0, k1);
      A.axpy(r, H / 3.0, k2);
      A.axpy(r, H / 3.0, k3);
      A.axpy(r, H / 6.0, k4);
      K0 = std::move(K1);
    }
    const Eigen::VectorXd dl = g.at(0, j + 1) - g.at(0, j);
    L = A.tail_mul(L, A.tail_exp(dl));
    Linv = A.tail_mul(A.tail_exp(-dl), Linv);
  }
  return r;
}

}  // namespace surfsig::detail
