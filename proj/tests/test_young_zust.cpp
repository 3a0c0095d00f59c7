#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "surfsig/surface_signature.hpp"
#include "surfsig/young_zust.hpp"

using namespace surfsig;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

std::shared_ptr<SurfaceGrid> smooth3(int ns, int nt) {
  return std::make_shared<SurfaceGrid>(SurfaceGrid::sample(3, ns, nt, {0, 1, 0, 1}, [](double s, double t) {
    return vec({s + 0.3 * t * t, t + 0.2 * std::sin(2 * s), s * t + 0.1 * s * s});
  }));
}

const Rect unit{0, 1, 0, 1};

}  // namespace

TEST_CASE("2D increments") {
  SurfaceGrid st = SurfaceGrid::sample(1, 4, 4, unit, [](double s, double t) { return vec({s * t}); });
  CHECK(increment2d(ScalarField2D(st), unit) == doctest::Approx(1.0));
  ScalarField2D fs([](double s, double) { return s * s + 1.0; }, unit);
  CHECK(increment2d(fs, {0.1, 0.7, 0.2, 0.9}) == 0.0);

  SurfaceGrid g = SurfaceGrid::sample(1, 4, 4, unit, [](double s, double t) { return vec({std::sin(3 * s * t) + t}); });
  ScalarField2D f(g);
  const double whole = increment2d(f, {0.25, 0.75, 0, 1});
  CHECK(increment2d(f, {0.25, 0.75, 0, 0.5}) + increment2d(f, {0.25, 0.75, 0.5, 1}) == doctest::Approx(whole));
  CHECK(increment2d(f, {0.25, 0.5, 0, 1}) + increment2d(f, {0.5, 0.75, 0, 1}) == doctest::Approx(whole));
  CHECK_THROWS_AS(increment2d(f, {0.1, 0.75, 0, 1}), DomainError);
  CHECK(increment2d(*smooth3(2, 2), unit).size() == 3);
}

TEST_CASE("Zust integrals") {
  ScalarField2D one([](double, double) { return 1.0; }, unit);
  ScalarField2D s([](double s, double) { return s; }, unit);
  ScalarField2D t([](double, double t) { return t; }, unit);
  CHECK(zust_integral(one, s, t, {0.2, 0.7, 0.1, 0.5}, 3).value == doctest::Approx(0.2).epsilon(1e-12));

  IntegralTrace half = zust_integral(s, s, t, unit, 8);
  CHECK(std::abs(half.value - 0.5) < 2.0 / 256);
  CHECK(half.cauchy);
  // corner rule: first-order convergence
  const double order = std::log2(std::abs(half.raw[6] - 0.5) / std::abs(half.raw[7] - 0.5));
  CHECK(order > 0.9);
  CHECK(zust_integral(s, s, t, unit, 8, 3).value == doctest::Approx(0.5).epsilon(1e-12));

  ScalarField2D g([](double s, double t) { return std::sin(s + 2 * t) * s; }, unit);
  IntegralTrace zero = zust_integral(s, g, g, unit, 6);
  for (double v : zero.raw) CHECK(v == 0.0);

  // sampled fields: the loop runs through the lattice crossings
  SurfaceGrid X = SurfaceGrid::sample(2, 3, 5, unit, [](double s, double t) { return vec({s + 0.2 * t * t, t * t + s}); });
  ScalarField2D x1(X, 0), x2(X, 1);
  const double area = loop_area(x1, x2, unit);
  CHECK(area == doctest::Approx(cell_area(X, unit)[0]).epsilon(1e-12));
  CHECK(area == doctest::Approx(level2_oracle(X, unit)[0]).epsilon(1e-12));
  CHECK(zust_integral(one, x1, x2, unit, 4).value == doctest::Approx(area).epsilon(1e-12));
}

TEST_CASE("2D Young increment integrals") {
  auto fv = [](double s, double t) { return std::exp(s) * std::cos(t); };
  auto gv = [](double s, double t) { return s * s * t + std::sin(s * t); };
  auto gst = [](double s, double t) { return 2 * s + std::cos(s * t) - s * t * std::sin(s * t); };
  ScalarField2D f(fv, unit), g(gv, unit);
  const Rect r{0.1, 0.9, 0.2, 1.0};
  const double ref = oracle::simpson2d([&](double s, double t) { return fv(s, t) * gst(s, t); }, r.s1, r.s2, r.t1,
                                       r.t2, 200);
  IntegralTrace I = young_increment_integral(f, g, r, 8);
  CHECK(std::abs(I.value - ref) < 1e-6);
  CHECK(I.cauchy);
  CHECK(I.slope < -0.8);

  ScalarField2D one([](double, double) { return 1.0; }, unit);
  CHECK(young_increment_integral(one, g, r, 5).value == doctest::Approx(increment2d(g, r)).epsilon(1e-12));
  ScalarField2D sep([](double s, double t) { return std::cos(s) + t * t * t; }, unit);
  CHECK(std::abs(young_increment_integral(f, sep, r, 6).value) < 1e-13);
}

TEST_CASE("area process") {
  SurfaceGrid id = SurfaceGrid::sample(2, 4, 3, unit, [](double s, double t) { return vec({s, t}); });
  SurfaceGrid A = area_process(id);
  CHECK(A.dim() == 1);
  for (int j = 0; j <= 3; ++j)
    for (int i = 0; i <= 4; ++i) CHECK(A.at(i, j)[0] == doctest::Approx(id.s_at(i) * id.t_at(j)));

  auto X = smooth3(4, 4);
  SurfaceGrid B = area_process(*X);
  CHECK(B.at(0, 3).norm() == 0.0);
  CHECK(B.at(2, 0).norm() == 0.0);
  for (int j : {1, 4})
    for (int i : {2, 3}) {
      GradedTensor0 L = oracle::boundary_loop(*X, 0, i, 0, j, 2);
      int q = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b, ++q) CHECK(B.at(i, j)[q] == doctest::Approx(L.level(2)[a * 3 + b]));
    }
  const Rect cell{0.25, 0.5, 0.5, 0.75};
  Eigen::VectorXd box = increment2d(B, cell);
  CHECK((box - cell_area(*X, cell)).norm() < 1e-14);
}

TEST_CASE("level-2 Zust lift") {
  auto X = smooth3(5, 4);
  DGF f = zust_lift_level2(X);
  CHECK(f.N == 2);
  oracle::Rng rng(7);
  for (int k = 0; k < 10; ++k) {
    double s1 = rng.uniform(0, 0.4), s2 = rng.uniform(0.6, 1), t1 = rng.uniform(0, 0.4), t2 = rng.uniform(0.6, 1);
    Rect r{s1, s2, t1, t2};
    CHECK(dgf_boundary_residual(f, r) < 1e-12);
    CHECK(dgf_multiplicativity_residual(f, r, rng.uniform(s1, s2), rng.uniform(t1, t2)) < 1e-12);
  }
  auto id = std::make_shared<SurfaceGrid>(
      SurfaceGrid::sample(2, 2, 2, unit, [](double s, double t) { return vec({s, t}); }));
  DGF g = zust_lift_level2(id);
  CHECK(g.surface({0, 0.3, 0, 0.8}).body.level(2)[0] == doctest::Approx(0.24));
}

TEST_CASE("level-3 Young lift") {
  auto X = smooth3(8, 8);
  YoungReport rep;
  DGF f = young_lift_level3(X, {}, 4, &rep);
  CHECK(rep.young_regime);
  CHECK(std::isfinite(rep.rect_holder));
  const Square S = block_square(*X, 0, 8, 0, 8, 3);
  CHECK(max_level_diff(f.surface(unit), S.E) < 1e-5);
  CHECK((young_level3(*X, unit) - level3_oracle(*X, unit)).norm() < 1e-10);
  const Rect sub{0.25, 0.75, 0.125, 0.5};
  CHECK((young_level3(*X, sub) - level3_oracle(*X, sub)).norm() < 1e-10);

  // off-lattice rectangles against the surface signature of a refined sampling
  const Rect off{0.1, 0.8, 0.3, 0.95};
  CHECK(dgf_boundary_residual(f, off) < 1e-8);
  CHECK(dgf_multiplicativity_residual(f, off, 0.47, 0.61) < 1e-8);

  DyadicTrace tr = young_level3_trace(*X, unit, 6);
  CHECK(tr.cauchy);
  CHECK(tr.slope < -0.8);

  auto c = std::make_shared<SurfaceGrid>(
      SurfaceGrid::sample(2, 3, 3, unit, [](double, double) { return vec({1.0, -2.0}); }));
  CHECK(young_lift_level3(c).surface(unit).body.norm() == 0.0);
}
