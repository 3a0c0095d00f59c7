#include "surfsig/surface_signature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "holonomy_engine.hpp"
#include "surfsig/path_signature.hpp"

namespace surfsig {

namespace {

struct TensorAlg {
  using Tail = GradedTensor0;
  using Acc = std::vector<Eigen::VectorXd>;
  using Kt = Tensor1;
  using Body = Tensor1;
  int d, N;

  Tail tail_one() const { return GradedTensor0::unit(d, N - 2); }
  Tail tail_exp(const Eigen::VectorXd& dx) const { return exp_letter_vector(dx, N - 2); }
  Tail tail_mul(const Tail& a, const Tail& b) const { return a * b; }

  Acc acc_zero() const {
    Acc a(N + 1);
    for (int n = 2; n <= N; ++n) a[n] = Eigen::VectorXd::Zero(bar::dim(d, n));
    return a;
  }
  void accumulate(Acc& acc, const Tail& g, const Tail& gi, const Eigen::VectorXd& J, double w) const {
    const Eigen::VectorXd Jw = w * J;
    for (int p = 0; p <= N - 2; ++p)
      for (int r = 0; p + r <= N - 2; ++r) bar::sandwich_add(d, g.level(p), p, Jw, 2, gi.level(r), r, acc[p + 2 + r]);
  }
  Kt finish(Acc& acc) const { return Tensor1::from_bar(d, N, acc); }

  Body body_zero() const { return Tensor1(d, N); }
  Body rhs(const Body& r, const Kt& K) const {
    Tensor1 out = star(r, K);
    out += K;
    return out;
  }
  void axpy(Body& y, double a, const Body& x) const { y += a * x; }
};

// Picard-graded variant: depth p carries p factors of K.
struct PicardAlg : TensorAlg {
  using Body = std::vector<Tensor1>;
  int depth;

  Body body_zero() const { return Body(depth + 1, Tensor1(d, N)); }
  Body rhs(const Body& r, const Kt& K) const {
    Body out = body_zero();
    out[1] = K;
    for (int p = 1; p < depth; ++p) out[p + 1] = star(r[p], K);
    return out;
  }
  void axpy(Body& y, double a, const Body& x) const {
    for (size_t p = 0; p < y.size(); ++p) y[p] += a * x[p];
  }
};

void check_grid(const SurfaceGrid& g, int N) {
  if (g.dim() < 2) throw DomainError("surface signatures need d >= 2");
  if (N < 2) throw DomainError("surface signatures need N >= 2");
  build_cache(g.dim(), N);
}

int effective_nodes(const CellQuadrature& q, int N) {
  if (q.rule == SRule::gauss) return std::max(q.s_nodes, N / 2 + 1);
  return q.s_nodes;
}

void check_quadrature(const CellQuadrature& q) {
  if (q.t_steps < 1 || q.s_nodes < 1 || q.max_doublings < 0) throw DomainError("quadrature counts must be >= 1");
}

}  // namespace

Eigen::VectorXd jacobian_form(const SurfaceGrid& g, int i, int j, double s, double t) {
  if (i < 0 || j < 0 || i >= g.ns() || j >= g.nt()) throw DomainError("cell index out of range");
  Eigen::VectorXd xs, xt;
  detail::cell_partials(g, i, j, (s - g.s_at(i)) / g.ds(), (t - g.t_at(j)) / g.dt(), xs, xt);
  return detail::wedge_coords(xs, xt);
}

Tensor1Hat block_interior(const SurfaceGrid& g, int i0, int i1, int j0, int j1, int N, const CellQuadrature& q,
                          QuadratureReport* rep) {
  check_grid(g, N);
  check_quadrature(q);
  const SurfaceGrid b = g.sub(i0, i1, j0, j1);
  const TensorAlg A{g.dim(), N};
  int ts = q.t_steps, sn = effective_nodes(q, N);
  Tensor1 r = detail::solve_holonomy(b, A, ts, sn, q.rule);
  QuadratureReport R{ts, sn, 0.0, !q.adaptive};
  if (q.adaptive) {
    for (int k = 0; k < q.max_doublings; ++k) {
      ts *= 2;
      if (q.rule == SRule::trapezoid) sn *= 2;
      Tensor1 r2 = detail::solve_holonomy(b, A, ts, sn, q.rule);
      R.delta = max_level_diff(r2, r);
      R.t_steps = ts;
      R.s_nodes = sn;
      r = std::move(r2);
      if (R.delta < q.tol) {
        R.converged = true;
        break;
      }
    }
  }
  if (rep) *rep = R;
  return {1.0, std::move(r)};
}

Tensor1Hat cell_signature(const SurfaceGrid& g, int i, int j, int N, const CellQuadrature& q, QuadratureReport* rep) {
  return block_interior(g, i, i + 1, j, j + 1, N, q, rep);
}

GradedTensor0 row_signature(const SurfaceGrid& g, int j, int i0, int i1, int N) {
  GradedTensor0 r = GradedTensor0::unit(g.dim(), N);
  for (int i = i0; i < i1; ++i) r = r * exp_letter_vector(g.at(i + 1, j) - g.at(i, j), N);
  return r;
}

GradedTensor0 column_signature(const SurfaceGrid& g, int i, int j0, int j1, int N) {
  GradedTensor0 r = GradedTensor0::unit(g.dim(), N);
  for (int j = j0; j < j1; ++j) r = r * exp_letter_vector(g.at(i, j + 1) - g.at(i, j), N);
  return r;
}

static Square raw_square(const SurfaceGrid& g, int i0, int i1, int j0, int j1, int N, Tensor1Hat E) {
  return {row_signature(g, j0, i0, i1, N), column_signature(g, i1, j0, j1, N), row_signature(g, j1, i0, i1, N),
          column_signature(g, i0, j0, j1, N), std::move(E)};
}

static double boundary_tol(const Square& S, const CellQuadrature& q) {
  return q.boundary_tol * std::max({1.0, p_lambda(S.x), p_lambda(S.y), p_lambda(S.z), p_lambda(S.w)});
}

Square block_square(const SurfaceGrid& g, int i0, int i1, int j0, int j1, int N, const CellQuadrature& q,
                    QuadratureReport* rep) {
  Square S = raw_square(g, i0, i1, j0, j1, N, block_interior(g, i0, i1, j0, j1, N, q, rep));
  return make_square(S.x, S.y, S.z, S.w, S.E, boundary_tol(S, q));
}

Square surface_signature(const SurfaceGrid& g, int N, const CellQuadrature& q, int cells_s, int cells_t, int jobs) {
  check_grid(g, N);
  if (cells_s < 1 || cells_t < 1 || cells_s > g.ns() || cells_t > g.nt())
    throw DomainError("block counts must lie in [1, grid cells]");
  std::vector<int> is(cells_s + 1), js(cells_t + 1);
  for (int k = 0; k <= cells_s; ++k) is[k] = static_cast<int>(std::lround(static_cast<double>(k) * g.ns() / cells_s));
  for (int k = 0; k <= cells_t; ++k) js[k] = static_cast<int>(std::lround(static_cast<double>(k) * g.nt() / cells_t));

  const int nb = cells_s * cells_t;
  std::vector<Square> blocks(nb);
  std::vector<std::exception_ptr> errs(nb);
  auto work = [&](int b) {
    try {
      const int a = b % cells_s, c = b / cells_s;
      blocks[b] = raw_square(g, is[a], is[a + 1], js[c], js[c + 1], N,
                             block_interior(g, is[a], is[a + 1], js[c], js[c + 1], N, q));
    } catch (...) {
      errs[b] = std::current_exception();
    }
  };
  jobs = std::clamp(jobs, 1, nb);
  if (jobs == 1) {
    for (int b = 0; b < nb; ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (int b = w; b < nb; b += jobs) work(b);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  Square whole;
  for (int c = 0; c < cells_t; ++c) {
    Square row = blocks[c * cells_s];
    for (int a = 1; a < cells_s; ++a) row = compose_h(row, blocks[c * cells_s + a]);
    whole = c == 0 ? row : compose_v(whole, row);
  }
  return make_square(whole.x, whole.y, whole.z, whole.w, whole.E, boundary_tol(whole, q));
}

Eigen::VectorXd level2_oracle(const SurfaceGrid& g, const Rect& r) {
  int i0, i1, j0, j1;
  g.lattice_rect(r, i0, i1, j0, j1);
  const int d = g.dim();
  GradedTensor0 loop = row_signature(g, j0, i0, i1, 2) * column_signature(g, i1, j0, j1, 2) *
                       t0_inverse(row_signature(g, j1, i0, i1, 2)) * t0_inverse(column_signature(g, i0, j0, j1, 2));
  Eigen::VectorXd out(d * (d - 1) / 2);
  int k = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) out[k++] = 0.5 * (loop.level(2)[a * d + b] - loop.level(2)[b * d + a]);
  return out;
}

Eigen::VectorXd level3_oracle(const SurfaceGrid& g, const Rect& r, int nodes) {
  int i0, i1, j0, j1;
  g.lattice_rect(r, i0, i1, j0, j1);
  const int d = g.dim();
  const detail::Nodes1D gl = detail::gauss_legendre(std::max(nodes, 2));
  const Eigen::VectorXd X0 = g.at(i0, j0);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(bar::dim(d, 3));
  Eigen::VectorXd xs, xt;
  for (int j = j0; j < j1; ++j)
    for (int i = i0; i < i1; ++i)
      for (size_t a = 0; a < gl.x.size(); ++a)
        for (size_t b = 0; b < gl.x.size(); ++b) {
          const double u = gl.x[a], v = gl.x[b], w = gl.w[a] * gl.w[b] * g.ds() * g.dt();
          Eigen::VectorXd X = (1 - u) * (1 - v) * g.at(i, j) + u * (1 - v) * g.at(i + 1, j) +
                              (1 - u) * v * g.at(i, j + 1) + u * v * g.at(i + 1, j + 1) - X0;
          detail::cell_partials(g, i, j, u, v, xs, xt);
          Eigen::VectorXd J = w * detail::wedge_coords(xs, xt);
          out += bar::left_mul(d, X, 1, J, 2) - bar::right_mul(d, J, 2, X, 1);
        }
  return out;
}

PicardReport picard_norm_report(const SurfaceGrid& g, int N, const CellQuadrature& q) {
  check_grid(g, N);
  check_quadrature(q);
  PicardAlg A{{g.dim(), N}, N / 2};
  int ts = q.t_steps;
  const int sn = effective_nodes(q, N);
  if (q.adaptive) ts <<= std::min(q.max_doublings, 3);
  std::vector<Tensor1> r = detail::solve_holonomy(g, A, ts, sn, q.rule);
  PicardReport rep;
  rep.norms.assign(A.depth + 1, 0.0);
  rep.norms[0] = 1.0;
  for (int p = 1; p <= A.depth; ++p) rep.norms[p] = r[p].norm();
  rep.terms = std::move(r);
  // least squares through the origin for log(|R^<p>| p!) against p
  double sxy = 0.0, sxx = 0.0;
  for (int p = 1; p <= A.depth; ++p)
    if (rep.norms[p] > 0.0) {
      sxy += p * (std::log(rep.norms[p]) + std::lgamma(p + 1.0));
      sxx += p * p;
    }
  rep.log_C = sxx > 0.0 ? sxy / sxx : -INFINITY;
  double n = 0, sx = 0, sy = 0, sxy2 = 0, sxx2 = 0;
  for (int p = 2; p <= A.depth; ++p)
    if (rep.norms[p] > 0.0) {
      const double y = std::log(rep.norms[p]);
      n += 1;
      sx += p;
      sy += y;
      sxy2 += p * y;
      sxx2 += p * p;
    }
  if (n >= 2) rep.tail_slope = (n * sxy2 - sx * sy) / (n * sxx2 - sx * sx);
  else if (n == 1 && rep.norms[1] > 0.0) rep.tail_slope = std::log(rep.norms[2] / rep.norms[1]);
  return rep;
}

}  // namespace surfsig
