#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "oracles.hpp"
#include "surfsig/matrix_holonomy.hpp"
#include "surfsig/surface_signature.hpp"

using namespace surfsig;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(v.size());
  int i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

SurfaceGrid wavy(int n) {
  return SurfaceGrid::sample(2, n, n, {0, 1, 0, 1}, [](double s, double t) {
    return vec({s + 0.3 * std::sin(2 * t), t + 0.4 * s * s - 0.2 * s * t});
  });
}

MatrixXd rnd(oracle::Rng& r, int a, int b) {
  MatrixXd M(a, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < a; ++i) M(i, j) = r.normal();
  return M;
}

// chain map with the block pattern forced by phi f = g phi
ChainMap random_chain_map(oracle::Rng& r, const TwoVectorSpace& v) {
  const int n = v.n, m = v.m, p = v.p;
  const MatrixXd A = rnd(r, n, n);
  ChainMap c{MatrixXd::Zero(n + m, n + m), MatrixXd::Zero(n + p, n + p)};
  c.g.topLeftCorner(n, n) = A;
  c.g.topRightCorner(n, m) = rnd(r, n, m);
  c.g.bottomRightCorner(m, m) = rnd(r, m, m);
  c.f.topLeftCorner(n, n) = A;
  c.f.bottomLeftCorner(p, n) = rnd(r, p, n);
  c.f.bottomRightCorner(p, p) = rnd(r, p, p);
  return c;
}

double maxabs(const MatrixXd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("chain complex crossed module") {
  const TwoVectorSpace v{2, 2, 3};
  CHECK(v.phi().rows() == 4);
  CHECK(v.phi().cols() == 5);
  Eigen::FullPivLU<MatrixXd> lu(v.phi());
  CHECK(lu.rank() == 2);
  oracle::Rng r(11);
  for (int k = 0; k < 20; ++k) {
    const ChainMap a = random_chain_map(r, v);
    CHECK(chain_map_residual(v, a) < 1e-14);
    const MatrixXd H = rnd(r, 5, 4), K = rnd(r, 5, 4);
    // first Peiffer: delta is equivariant
    const ChainMap l = ch_delta(v, ch_act_left(a, H)), la = a * ch_delta(v, H);
    CHECK(maxabs(l.g - la.g) + maxabs(l.f - la.f) < 1e-12);
    const ChainMap rr = ch_delta(v, ch_act_right(H, a)), ra = ch_delta(v, H) * a;
    CHECK(maxabs(rr.g - ra.g) + maxabs(rr.f - ra.f) < 1e-12);
    // second Peiffer
    CHECK(maxabs(ch_act_left(ch_delta(v, H), K) - ch_star(v, H, K)) < 1e-12);
    CHECK(maxabs(ch_act_right(H, ch_delta(v, K)) - ch_star(v, H, K)) < 1e-12);
    CHECK(chain_map_residual(v, ch_delta(v, H)) < 1e-14);
  }
  CHECK_THROWS_AS(validate(TwoVectorSpace{-1, 1, 1}), DomainError);
}

TEST_CASE("random fake-flat connections") {
  const TwoVectorSpace v{2, 1, 1};
  const ChainConnection c = random_fake_flat(v, 3, 42);
  CHECK(fake_flatness_residual(c) < 1e-10);
  for (int i = 0; i < 3; ++i) CHECK(chain_map_residual(v, c.letter(i)) < 1e-14);
  const ChainConnection c2 = random_fake_flat(v, 3, 42);
  CHECK(maxabs(c.gamma[2] - c2.gamma[2]) == 0.0);
  CHECK(maxabs(c.beta[1] - c2.beta[1]) == 0.0);
  CHECK(maxabs(random_fake_flat(v, 3, 43).beta[0] - c.beta[0]) > 0.0);
  const ChainConnection tiny = random_fake_flat(v, 3, 42, 1e-6);
  CHECK(maxabs(tiny.alpha[0]) < 1e-4);
  CHECK(maxabs(tiny.gamma[0]) < 1e-8);

  // phi = 0: any gamma is fake-flat for scalar blocks
  const TwoVectorSpace ab{0, 1, 1};
  ChainConnection z = random_fake_flat(ab, 2, 5);
  z.gamma[0](0, 0) = 3.7;
  CHECK_NOTHROW(validate(z));

  // non-commuting lower-right blocks leave no solution
  const TwoVectorSpace w{1, 2, 1};
  std::vector<MatrixXd> beta(2, MatrixXd::Zero(3, 3)), alpha(2, MatrixXd::Zero(2, 2));
  beta[0](1, 2) = 1.0;
  beta[1](2, 1) = 1.0;
  CHECK_THROWS_AS(solve_gamma(w, 2, beta, alpha), DomainError);

  ChainConnection bad = c;
  bad.gamma[0](0, 0) += 1e-3;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = c;
  bad.alpha[0](0, 2) = 1.0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = c;
  bad.gamma.pop_back();
  CHECK_THROWS_AS(validate(bad), ShapeError);
}

TEST_CASE("chain transport") {
  const TwoVectorSpace v{2, 1, 1};
  const ChainConnection c = random_fake_flat(v, 2, 7, 0.5);
  const std::vector<VectorXd> seg{vec({0.1, 0.2}), vec({0.6, -0.3})};
  const ChainMap F = chain_transport(seg, c);
  const ChainMap A = c.one_form(vec({0.5, -0.5}));
  CHECK(maxabs(F.g - MatrixXd(A.g.exp())) < 1e-14);
  CHECK(maxabs(F.f - MatrixXd(A.f.exp())) < 1e-14);

  const std::vector<VectorXd> p1{vec({0, 0}), vec({0.3, 0.1}), vec({0.2, 0.7})};
  const std::vector<VectorXd> p2{vec({0.2, 0.7}), vec({-0.4, 0.5}), vec({0.1, 0.1})};
  std::vector<VectorXd> p12 = p1;
  p12.insert(p12.end(), p2.begin() + 1, p2.end());
  const ChainMap lhs = chain_transport(p12, c), rhs = chain_transport(p1, c) * chain_transport(p2, c);
  CHECK(maxabs(lhs.g - rhs.g) + maxabs(lhs.f - rhs.f) < 1e-11);
  CHECK(chain_map_residual(v, lhs) < 1e-10);

  ChainConnection zero = scaled(c, 0.0);
  const ChainMap I = chain_transport(p12, zero);
  CHECK(maxabs(I.g - MatrixXd::Identity(3, 3)) == 0.0);
  CHECK(maxabs(I.f - MatrixXd::Identity(3, 3)) == 0.0);
}

TEST_CASE("matrix surface holonomy") {
  // phi = 0 and no transport: gamma times the signed area
  const TwoVectorSpace ab{0, 1, 1};
  ChainConnection c = scaled(random_fake_flat(ab, 2, 1), 0.0);
  c.gamma[0](0, 0) = 2.5;
  const SurfaceGrid X = wavy(5);
  const MatrixXd h = matrix_surface_holonomy(X, c);
  CHECK(h(0, 0) == doctest::Approx(2.5 * level2_oracle(X, {0, 1, 0, 1})[0]).epsilon(1e-12));

  const ChainConnection nc = random_fake_flat({2, 1, 1}, 2, 9, 0.7);
  const SurfaceGrid flat = SurfaceGrid::sample(2, 3, 3, {0, 1, 0, 1}, [](double, double) { return vec({1, 2}); });
  CHECK(maxabs(matrix_surface_holonomy(flat, nc)) == 0.0);

  // step doubling in both counts
  const SurfaceGrid Y = wavy(2);
  std::vector<MatrixXd> hs;
  for (int k : {1, 2, 4, 8}) hs.push_back(matrix_surface_holonomy(Y, nc, {k, k, SRule::trapezoid}));
  const double e1 = (hs[1] - hs[0]).norm(), e2 = (hs[2] - hs[1]).norm(), e3 = (hs[3] - hs[2]).norm();
  MESSAGE("observed orders " << std::log2(e1 / e2) << " " << std::log2(e2 / e3));
  CHECK(std::log2(e2 / e3) >= 1.8);

  CHECK_THROWS_AS(matrix_surface_holonomy(wavy(2), random_fake_flat({2, 1, 1}, 3, 1)), ShapeError);
}

TEST_CASE("universal factorization") {
  const TwoVectorSpace v{2, 1, 1};
  const ChainConnection c = random_fake_flat(v, 2, 21, 0.8);
  const UniversalMorphism U = universal_factorization(c, 6);
  const ChainMap w = U.word({0, 1}), ww = c.letter(0) * c.letter(1);
  CHECK(maxabs(w.g - ww.g) + maxabs(w.f - ww.f) == 0.0);
  CHECK(maxabs(U.word(2, 1).f - ww.f) == 0.0);
  CHECK(maxabs(U(Tensor1::wedge(2, 6, 0, 1)) - c.gamma[0]) == 0.0);
  CHECK(U.peiffer_residual() < 1e-10);

  // independent Peiffer elements at level 4
  oracle::Rng r(5);
  const MatrixXd pf = oracle::peiffer_span(2, 4);
  REQUIRE(pf.cols() > 0);
  for (int k = 0; k < 5; ++k) {
    VectorXd x = VectorXd::Zero(pf.rows());
    for (long q = 0; q < pf.cols(); ++q) x += r.normal() * pf.col(q);
    CHECK(maxabs(U.on_bar(4, x)) < 1e-10);
  }

  // morphism of crossed modules
  const TwoVectorSpace& t = c.tvs;
  for (int k = 0; k < 5; ++k) {
    Tensor1 E = oracle::random_t1(r, 2, 6, 0.5), F = oracle::random_t1(r, 2, 6, 0.5);
    for (int n = 4; n <= 6; ++n) E.level(n).setZero(), F.level(n).setZero();
    CHECK(maxabs(U(star(E, F)) - ch_star(t, U(E), U(F))) < 1e-10);
    const GradedTensor0 dE = cm_delta(E);
    ChainMap img{MatrixXd::Zero(3, 3), MatrixXd::Zero(3, 3)};
    for (int n = 2; n <= 6; ++n)
      for (long i = 0; i < dE.level(n).size(); ++i) {
        img.g += dE.level(n)[i] * U.word(n, i).g;
        img.f += dE.level(n)[i] * U.word(n, i).f;
      }
    const ChainMap dU = ch_delta(t, U(E));
    CHECK(maxabs(img.g - dU.g) + maxabs(img.f - dU.f) < 1e-10);
  }
}

TEST_CASE("universal property") {
  const SurfaceGrid X = wavy(3);
  const ChainConnection c = random_fake_flat({2, 1, 1}, 2, 42);
  const UniversalCheck z = universal_check(X, c, 4, 0.0);
  CHECK(maxabs(z.ode) == 0.0);
  CHECK(maxabs(z.factored) == 0.0);

  ChainConnection ab = scaled(random_fake_flat({0, 1, 1}, 2, 1), 0.0);
  ab.gamma[0](0, 0) = -1.5;
  const UniversalCheck a = universal_check(X, ab, 2, 1.0);
  CHECK(a.gap < 1e-13);

  std::vector<double> eps{0.2, 0.1, 0.05}, gaps;
  for (double e : eps) {
    const UniversalCheck u = universal_check(X, c, 6, e);
    gaps.push_back(u.gap);
    if (e == 0.1) CHECK(u.rel_gap <= 1e-3);
  }
  const double slope = (std::log(gaps[0]) - std::log(gaps[2])) / (std::log(eps[0]) - std::log(eps[2]));
  MESSAGE("gap exponent " << slope << ", gaps " << gaps[0] << " " << gaps[1] << " " << gaps[2]);
  CHECK(slope >= 5.5);
}
