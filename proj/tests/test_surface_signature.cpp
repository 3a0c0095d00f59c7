#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "surfsig/path_signature.hpp"
#include "surfsig/surface_signature.hpp"

using namespace surfsig;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

SurfaceGrid smooth3(int ns, int nt) {
  return SurfaceGrid::sample(3, ns, nt, {0, 1, 0, 1}, [](double s, double t) {
    return vec({s + 0.3 * t * t, t + 0.2 * std::sin(2 * s), s * t + 0.1 * s * s});
  });
}

}  // namespace

TEST_CASE("Jacobian form") {
  SurfaceGrid id = SurfaceGrid::sample(2, 2, 2, {0, 1, 0, 1}, [](double s, double t) { return vec({s, t}); });
  CHECK(jacobian_form(id, 1, 0, 0.7, 0.2)[0] == doctest::Approx(1.0));
  SurfaceGrid flip = SurfaceGrid::sample(2, 2, 2, {0, 1, 0, 1}, [](double s, double t) { return vec({t, s}); });
  CHECK(jacobian_form(flip, 0, 1, 0.3, 0.6)[0] == doctest::Approx(-1.0));
  SurfaceGrid flat = SurfaceGrid::sample(3, 1, 1, {0, 1, 0, 1}, [](double s, double t) { return vec({s, t, 0}); });
  Eigen::VectorXd J = jacobian_form(flat, 0, 0, 0.5, 0.5);
  CHECK(J.size() == 3);
  CHECK(J[0] == doctest::Approx(1.0));
  CHECK(J[1] == 0.0);
  CHECK(J[2] == 0.0);
  CHECK_THROWS_AS(jacobian_form(id, 2, 0, 0.5, 0.5), DomainError);
}

TEST_CASE("closed-form low levels") {
  const double a = 1.7, b = -0.6;
  SurfaceGrid lin = SurfaceGrid::sample(2, 1, 1, {0, 1, 0, 1}, [&](double s, double t) { return vec({a * s, b * t}); });
  Tensor1Hat R = cell_signature(lin, 0, 0, 4);
  CHECK(R.unit == 1.0);
  CHECK(R.body.level(2)[0] == doctest::Approx(a * b).epsilon(1e-12));

  // X = (s, t): level 3 is (1/2) e1 |> e12 + (1/2) e2 |> e12, a |> E = aE - Ea
  SurfaceGrid id = SurfaceGrid::sample(2, 1, 1, {0, 1, 0, 1}, [](double s, double t) { return vec({s, t}); });
  Tensor1Hat S = cell_signature(id, 0, 0, 3);
  // bar level 3 for d = 2: block 0 holds e12.e_q, block 1 holds e_q.e12
  Eigen::VectorXd expect = vec({-0.5, -0.5, 0.5, 0.5});
  CHECK((S.body.level(3) - expect).norm() < 1e-12);
  CHECK(S.body.level(2)[0] == doctest::Approx(1.0));
  CHECK((level3_oracle(id, {0, 1, 0, 1}) - expect).norm() < 1e-12);
  CHECK(level2_oracle(id, {0, 1, 0, 1})[0] == doctest::Approx(1.0));
}

TEST_CASE("boundary condition and group-likeness") {
  SurfaceGrid g = smooth3(3, 2);
  for (int N : {3, 4}) {
    QuadratureReport rep;
    Tensor1Hat R = block_interior(g, 0, 3, 0, 2, N, {}, &rep);
    CHECK(rep.converged);
    CHECK(max_level_diff(cm_delta(R), oracle::boundary_loop(g, N)) < 1e-7);
    CHECK(is_grouplike_1(R, g1_basis(3, N), 1e-6));
  }
  Square S = surface_signature(g, 4);
  CHECK(boundary_residual(S) < 1e-7);
}

TEST_CASE("constant surface") {
  SurfaceGrid c = SurfaceGrid::sample(2, 3, 3, {0, 2, 0, 1}, [](double, double) { return vec({0.4, -1}); });
  Square S = surface_signature(c, 4, {}, 3, 3);
  CHECK(square_diff(S, identity_h(GradedTensor0::unit(2, 4))) == 0.0);
  PicardReport p = picard_norm_report(c, 4);
  CHECK(p.norms[1] == 0.0);
  CHECK(p.norms[2] == 0.0);
  // degenerate row: the cell has zero area and gets the identity interior
  SurfaceGrid line = SurfaceGrid::sample(2, 2, 1, {0, 1, 0, 1}, [](double s, double) { return vec({s, s * s}); });
  Tensor1Hat E = cell_signature(line, 1, 0, 4);
  CHECK(E.body.norm() == 0.0);
}

TEST_CASE("grid composition") {
  SurfaceGrid g = smooth3(4, 4);
  const int N = 4;
  Square whole = block_square(g, 0, 4, 0, 4, N);
  CHECK(square_diff(surface_signature(g, N, {}, 1, 1), whole) == 0.0);
  Square quad = surface_signature(g, N, {}, 2, 2);
  CHECK(square_diff(quad, whole) < 1e-6);
  Square cells = surface_signature(g, N, {}, 4, 4, 2);
  CHECK(square_diff(cells, whole) < 1e-6);
  CHECK(square_diff(surface_signature(g, N, {}, 4, 4, 1), cells) == 0.0);

  // with aligned nodes the discrete scheme is itself multiplicative
  CellQuadrature fixed;
  fixed.adaptive = false;
  fixed.boundary_tol = 1.0;
  for (SRule rule : {SRule::gauss, SRule::trapezoid}) {
    fixed.rule = rule;
    for (int ts : {2, 4, 8}) {
      fixed.t_steps = ts;
      fixed.s_nodes = ts;
      SurfaceGrid h = smooth3(2, 2);
      Square one = surface_signature(h, N, fixed, 1, 1);
      CHECK(square_diff(surface_signature(h, N, fixed, 2, 1), one) < 1e-13);
      CHECK(square_diff(surface_signature(h, N, fixed, 1, 2), one) < 1e-13);
    }
  }

  CHECK_THROWS_AS(surface_signature(g, N, {}, 5, 1), DomainError);
}

TEST_CASE("low-level oracles on sub-rectangles") {
  SurfaceGrid g = smooth3(4, 2);
  Square S = block_square(g, 1, 3, 0, 2, 3);
  Rect r{0.25, 0.75, 0, 1};
  CHECK((level2_oracle(g, r) - S.E.body.level(2)).norm() < 1e-12);
  CHECK((level3_oracle(g, r) - S.E.body.level(3)).norm() < 1e-8);
  CHECK_THROWS_AS(level2_oracle(g, {0.1, 0.5, 0, 1}), DomainError);
}

TEST_CASE("trapezoid rule") {
  SurfaceGrid g = smooth3(1, 1);
  CellQuadrature tq;
  tq.rule = SRule::trapezoid;
  tq.adaptive = false;
  tq.boundary_tol = 1.0;
  Tensor1Hat ref = cell_signature(g, 0, 0, 4);
  double prev = 0.0, order = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double gap = max_level_diff(cell_signature(g, 0, 0, 4, tq), ref);
    if (k > 0) order = std::log2(prev / gap);
    prev = gap;
    tq.s_nodes *= 2;
    tq.t_steps *= 2;
  }
  CHECK(order > 1.8);
}

TEST_CASE("Picard report") {
  SurfaceGrid id = SurfaceGrid::sample(2, 1, 1, {0, 1, 0, 1}, [](double s, double t) { return vec({s, t}); });
  PicardReport p = picard_norm_report(id, 6);
  REQUIRE(p.norms.size() == 4);
  CHECK(p.norms[1] > 0.0);
  CHECK(p.norms[2] <= p.norms[1]);
  CHECK(p.norms[3] <= p.norms[2]);
  CHECK(p.tail_slope < 0.0);
  CHECK(std::isfinite(p.log_C));
  // depths sum to the full solution
  Tensor1Hat R = cell_signature(id, 0, 0, 6);
  Tensor1 sum(2, 6);
  for (int k = 1; k <= 3; ++k) sum += p.terms[k];
  CHECK(max_level_diff(sum, R.body) < 1e-8);
}
