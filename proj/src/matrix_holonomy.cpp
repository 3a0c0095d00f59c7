#include "surfsig/matrix_holonomy.hpp"

#include <cmath>
#include <random>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "holonomy_engine.hpp"
#include "surfsig/errors.hpp"

namespace surfsig {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd TwoVectorSpace::phi() const {
  MatrixXd P = MatrixXd::Zero(dim0(), dim1());
  P.topLeftCorner(n, n).setIdentity();
  return P;
}

void validate(const TwoVectorSpace& v) {
  if (v.n < 0 || v.m < 0 || v.p < 0 || v.dim0() == 0 || v.dim1() == 0)
    throw DomainError("two-vector space dimensions must be >= 0 with n+m, n+p > 0");
}

ChainMap chain_identity(const TwoVectorSpace& v) {
  return {MatrixXd::Identity(v.dim0(), v.dim0()), MatrixXd::Identity(v.dim1(), v.dim1())};
}

ChainMap operator*(const ChainMap& a, const ChainMap& b) { return {a.g * b.g, a.f * b.f}; }

double chain_map_residual(const TwoVectorSpace& v, const ChainMap& a) {
  const MatrixXd P = v.phi();
  return (P * a.f - a.g * P).cwiseAbs().maxCoeff();
}

ChainMap ch_delta(const TwoVectorSpace& v, const MatrixXd& H) {
  const MatrixXd P = v.phi();
  return {P * H, H * P};
}

MatrixXd ch_star(const TwoVectorSpace& v, const MatrixXd& H, const MatrixXd& K) { return H * v.phi() * K; }
MatrixXd ch_act_left(const ChainMap& a, const MatrixXd& H) { return a.f * H; }
MatrixXd ch_act_right(const MatrixXd& H, const ChainMap& a) { return H * a.g; }

ChainMap ChainConnection::one_form(const VectorXd& dx) const {
  ChainMap A{MatrixXd::Zero(tvs.dim0(), tvs.dim0()), MatrixXd::Zero(tvs.dim1(), tvs.dim1())};
  for (int i = 0; i < d; ++i) {
    A.g += dx[i] * beta[i];
    A.f += dx[i] * alpha[i];
  }
  return A;
}

MatrixXd ChainConnection::two_form(const VectorXd& J) const {
  MatrixXd G = MatrixXd::Zero(tvs.dim1(), tvs.dim0());
  for (size_t q = 0; q < gamma.size(); ++q) G += J[q] * gamma[q];
  return G;
}

double fake_flatness_residual(const ChainConnection& c) {
  const MatrixXd P = c.tvs.phi();
  double r = 0.0;
  for (int i = 0; i < c.d; ++i)
    for (int j = i + 1; j < c.d; ++j) {
      const MatrixXd& G = c.gamma[bar::pair_index(c.d, i, j)];
      const MatrixXd cb = c.beta[i] * c.beta[j] - c.beta[j] * c.beta[i];
      const MatrixXd ca = c.alpha[i] * c.alpha[j] - c.alpha[j] * c.alpha[i];
      r = std::max({r, (P * G - cb).cwiseAbs().maxCoeff(), (G * P - ca).cwiseAbs().maxCoeff()});
    }
  return r;
}

void validate(const ChainConnection& c, double tol) {
  validate(c.tvs);
  if (c.d < 1) throw DomainError("connection needs d >= 1");
  const int n0 = c.tvs.dim0(), n1 = c.tvs.dim1();
  if (static_cast<int>(c.beta.size()) != c.d || static_cast<int>(c.alpha.size()) != c.d ||
      static_cast<int>(c.gamma.size()) != bar::pairs(c.d))
    throw ShapeError("connection needs d letter blocks and C(d,2) wedge blocks");
  for (int i = 0; i < c.d; ++i) {
    if (c.beta[i].rows() != n0 || c.beta[i].cols() != n0) throw ShapeError("beta block has the wrong shape");
    if (c.alpha[i].rows() != n1 || c.alpha[i].cols() != n1) throw ShapeError("alpha block has the wrong shape");
    const double r = chain_map_residual(c.tvs, c.letter(i));
    if (r > tol) throw DomainError("letter " + std::to_string(i + 1) + " is not a chain map, residual " + std::to_string(r));
  }
  for (const MatrixXd& G : c.gamma)
    if (G.rows() != n1 || G.cols() != n0) throw ShapeError("gamma block has the wrong shape");
  const double r = fake_flatness_residual(c);
  if (r > tol) throw DomainError("connection is not fake-flat, residual " + std::to_string(r));
}

std::vector<MatrixXd> solve_gamma(const TwoVectorSpace& v, int d, const std::vector<MatrixXd>& beta,
                                  const std::vector<MatrixXd>& alpha, double tol) {
  validate(v);
  const int n0 = v.dim0(), n1 = v.dim1();
  const MatrixXd P = v.phi();
  // vec(P G) = (I (x) P) vec G, vec(G P) = (P^T (x) I) vec G
  MatrixXd M = MatrixXd::Zero(n0 * n0 + n1 * n1, n1 * n0);
  for (int c = 0; c < n0; ++c)
    for (int r = 0; r < n1; ++r) {
      MatrixXd E = MatrixXd::Zero(n1, n0);
      E(r, c) = 1.0;
      const MatrixXd a = P * E, b = E * P;
      M.col(c * n1 + r) << Eigen::Map<const VectorXd>(a.data(), a.size()), Eigen::Map<const VectorXd>(b.data(), b.size());
    }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(M);
  std::vector<MatrixXd> out(bar::pairs(d));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const MatrixXd cb = beta[i] * beta[j] - beta[j] * beta[i];
      const MatrixXd ca = alpha[i] * alpha[j] - alpha[j] * alpha[i];
      VectorXd rhs(M.rows());
      rhs << Eigen::Map<const VectorXd>(cb.data(), cb.size()), Eigen::Map<const VectorXd>(ca.data(), ca.size());
      const VectorXd x = cod.solve(rhs);
      const double res = (M * x - rhs).cwiseAbs().maxCoeff();
      if (res > tol * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
        throw DomainError("fake-flatness has no solution for the wedge (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + "), residual " + std::to_string(res));
      out[bar::pair_index(d, i, j)] = Eigen::Map<const MatrixXd>(x.data(), n1, n0);
    }
  return out;
}

ChainConnection random_fake_flat(const TwoVectorSpace& v, int d, std::uint64_t seed, double scale) {
  validate(v);
  if (d < 1) throw DomainError("connection needs d >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto rnd = [&](int r, int c) {
    MatrixXd A(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) A(i, j) = nd(rng);
    return A;
  };
  const int n = v.n, m = v.m, p = v.p;
  ChainConnection c;
  c.tvs = v;
  c.d = d;
  for (int i = 0; i < d; ++i) {
    // beta = [[A, B], [0, D]], alpha = [[A, 0], [C, F]] with diagonal D, F
    const MatrixXd A = rnd(n, n);
    MatrixXd b = MatrixXd::Zero(n + m, n + m), a = MatrixXd::Zero(n + p, n + p);
    b.topLeftCorner(n, n) = A;
    b.topRightCorner(n, m) = rnd(n, m);
    b.bottomRightCorner(m, m) = rnd(m, 1).asDiagonal();
    a.topLeftCorner(n, n) = A;
    a.bottomLeftCorner(p, n) = rnd(p, n);
    a.bottomRightCorner(p, p) = rnd(p, 1).asDiagonal();
    c.beta.push_back(scale * b);
    c.alpha.push_back(scale * a);
  }
  c.gamma = solve_gamma(v, d, c.beta, c.alpha);
  // the lower-right block of gamma is unconstrained
  for (MatrixXd& G : c.gamma) G.bottomRightCorner(p, m) += scale * scale * rnd(p, m);
  validate(c);
  return c;
}

ChainConnection scaled(const ChainConnection& c, double eps) {
  ChainConnection s = c;
  for (auto& b : s.beta) b *= eps;
  for (auto& a : s.alpha) a *= eps;
  for (auto& g : s.gamma) g *= eps * eps;
  return s;
}

ChainMap chain_transport(const std::vector<VectorXd>& path, const ChainConnection& c) {
  ChainMap F = chain_identity(c.tvs);
  for (size_t k = 1; k < path.size(); ++k) {
    if (path[k].size() != c.d || path[k - 1].size() != c.d) throw ShapeError("path and connection dimensions differ");
    const ChainMap A = c.one_form(path[k] - path[k - 1]);
    F = F * ChainMap{A.g.exp(), A.f.exp()};
  }
  return F;
}

namespace {

struct MatrixAlg {
  using Tail = ChainMap;
  using Acc = MatrixXd;
  using Kt = MatrixXd;
  using Body = MatrixXd;
  const ChainConnection* c;
  MatrixXd P;

  Tail tail_one() const { return chain_identity(c->tvs); }
  Tail tail_exp(const VectorXd& dx) const {
    const ChainMap A = c->one_form(dx);
    return {A.g.exp(), A.f.exp()};
  }
  Tail tail_mul(const Tail& a, const Tail& b) const { return a * b; }
  Acc acc_zero() const { return MatrixXd::Zero(c->tvs.dim1(), c->tvs.dim0()); }
  void accumulate(Acc& acc, const Tail& g, const Tail& gi, const VectorXd& J, double w) const {
    acc += w * (g.f * c->two_form(J) * gi.g);
  }
  Kt finish(Acc& acc) const { return acc; }
  Body body_zero() const { return acc_zero(); }
  Body rhs(const Body& h, const Kt& K) const { return K + h * P * K; }
  void axpy(Body& y, double a, const Body& x) const { y += a * x; }
};

}  // namespace

MatrixXd matrix_surface_holonomy(const SurfaceGrid& g, const ChainConnection& c, const HolonomyOptions& opt) {
  validate(c, 1e-8);
  if (g.dim() != c.d) throw ShapeError("grid and connection dimensions differ");
  if (opt.t_steps < 1 || opt.s_nodes < 1) throw DomainError("quadrature counts must be >= 1");
  const MatrixAlg A{&c, c.tvs.phi()};
  return detail::solve_holonomy(g, A, opt.t_steps, opt.s_nodes, opt.rule);
}

UniversalMorphism::UniversalMorphism(const ChainConnection& c, int N) : c_(c), N_(N) {
  validate(c, 1e-8);
  if (N < 2) throw DomainError("the morphism needs N >= 2");
  words_.resize(N + 1);
  words_[0] = {chain_identity(c.tvs)};
  for (int k = 1; k <= N; ++k) {
    words_[k].reserve(words_[k - 1].size() * c.d);
    for (const ChainMap& w : words_[k - 1])
      for (int i = 0; i < c.d; ++i) words_[k].push_back(w * c.letter(i));
  }
  const PeifferCache& cache = build_cache(c.d, N);
  for (int n = 2; n <= N; ++n) {
    const MatrixXd& pf = cache.level(n).pf_basis;
    for (long q = 0; q < pf.cols(); ++q) peiffer_ = std::max(peiffer_, on_bar(n, pf.col(q)).cwiseAbs().maxCoeff());
  }
}

const ChainMap& UniversalMorphism::word(int k, long idx) const {
  if (k < 0 || k > N_ || idx < 0 || idx >= static_cast<long>(words_[k].size())) throw DomainError("word out of range");
  return words_[k][idx];
}

ChainMap UniversalMorphism::word(const std::vector<int>& letters) const {
  ChainMap w = chain_identity(c_.tvs);
  for (int i : letters) {
    if (i < 0 || i >= c_.d) throw DomainError("letter out of range");
    w = w * c_.letter(i);
  }
  return w;
}

MatrixXd UniversalMorphism::on_bar(int n, const VectorXd& v) const {
  const int d = c_.d;
  if (n < 2 || n > N_) throw DomainError("level out of range");
  if (v.size() != bar::dim(d, n)) throw ShapeError("bar vector has the wrong length");
  const int P = bar::pairs(d);
  const long Ln = bar::block_len(d, n);
  MatrixXd out = MatrixXd::Zero(c_.tvs.dim1(), c_.tvs.dim0());
  for (int k = 0; k <= n - 2; ++k) {
    const long nsuf = static_cast<long>(words_[n - 2 - k].size());
    const long npre = static_cast<long>(words_[k].size());
    for (long a = 0; a < npre; ++a)
      for (int q = 0; q < P; ++q) {
        // sum over suffixes first: gamma_q * sum_b v_b beta_b
        MatrixXd right = MatrixXd::Zero(c_.tvs.dim0(), c_.tvs.dim0());
        bool any = false;
        for (long b = 0; b < nsuf; ++b) {
          const double x = v[k * Ln + (a * P + q) * nsuf + b];
          if (x == 0.0) continue;
          right += x * words_[n - 2 - k][b].g;
          any = true;
        }
        if (any) out += words_[k][a].f * c_.gamma[q] * right;
      }
  }
  return out;
}

MatrixXd UniversalMorphism::operator()(const Tensor1& E) const {
  if (E.dim() != c_.d) throw ShapeError("tensor and connection dimensions differ");
  MatrixXd out = MatrixXd::Zero(c_.tvs.dim1(), c_.tvs.dim0());
  for (int n = 2; n <= std::min(N_, E.cap()); ++n) out += on_bar(n, E.bar_level(n));
  return out;
}

UniversalMorphism universal_factorization(const ChainConnection& c, int N, double tol) {
  UniversalMorphism U(c, N);
  if (U.peiffer_residual() > tol)
    throw DomainError("Peiffer elements are not annihilated, residual " + std::to_string(U.peiffer_residual()));
  return U;
}

UniversalCheck universal_check(const SurfaceGrid& g, const ChainConnection& c, int N, double eps,
                               const HolonomyOptions& opt) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("scale must be finite and >= 0");
  const ChainConnection ce = scaled(c, eps);
  UniversalCheck r;
  r.ode = matrix_surface_holonomy(g, ce, opt);
  CellQuadrature q;
  q.t_steps = opt.t_steps;
  q.s_nodes = opt.s_nodes;
  q.rule = opt.rule;
  q.adaptive = false;
  const Tensor1Hat E = block_interior(g, 0, g.ns(), 0, g.nt(), N, q);
  const UniversalMorphism U = universal_factorization(ce, N, 1e-10 * std::max(1.0, eps * eps));
  r.factored = U(E.body);
  r.gap = (r.ode - r.factored).norm();
  const double scale = r.ode.norm();
  r.rel_gap = scale > 0.0 ? r.gap / scale : r.gap;
  return r;
}

}  // namespace surfsig
