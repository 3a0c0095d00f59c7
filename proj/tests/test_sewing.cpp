#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "surfsig/holder.hpp"
#include "surfsig/sewing.hpp"
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

std::shared_ptr<SurfaceGrid> smooth2(int n) {
  return std::make_shared<SurfaceGrid>(SurfaceGrid::sample(2, n, n, {0, 1, 0, 1}, [](double s, double t) {
    return vec({s + 0.4 * std::sin(t), t * t + 0.5 * s * t});
  }));
}

const Rect unit{0, 1, 0, 1};

double level_gap(const Tensor1Hat& a, const Tensor1Hat& b, int n) {
  return (a.body.level(n) - b.body.level(n)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("controls and W polynomials") {
  CHECK(w_poly(1, 0.5, 1, 1) == doctest::Approx(2.0 / std::pow(std::tgamma(1.5), 2)));
  CHECK(w_poly(3, 0.4, 0.0, 2.0) == 0.0);
  CHECK(w_poly(3, 0.35, 0.3, 1.7) == doctest::Approx(w_poly(3, 0.35, 1.7, 0.3)).epsilon(1e-14));

  NeoclassicalResult one = neoclassical_check(1.0, 5, 0.3, 1.1);
  CHECK(one.lhs == doctest::Approx(one.rhs).epsilon(1e-13));
  NeoclassicalResult half = neoclassical_check(0.5, 4, 1, 1);
  double lhs = 0.0;
  for (int i = 0; i <= 4; ++i) lhs += 1.0 / (std::tgamma(1 + 0.5 * i) * std::tgamma(1 + 0.5 * (4 - i)));
  CHECK(half.lhs == doctest::Approx(0.5 * lhs));
  CHECK(half.rhs == doctest::Approx(2.0));
  CHECK(half.lhs < half.rhs);
  NeoclassicalResult edge = neoclassical_check(0.6, 3, 0.0, 1.3);
  CHECK(edge.lhs == doctest::Approx(0.6 * std::pow(1.3, 1.8) / std::tgamma(2.8)));
  CHECK(edge.ok);

  // rho = 1: p = 2, 2 (1 + sum_{r>=3} (2/(r-2))^2) and 1.5 / (1 - 4^-2)
  double tail = 0.0;
  for (int r = 3; r < 2000000; ++r) tail += 4.0 / ((r - 2.0) * (r - 2.0));
  CHECK(beta_rp(1.0) == doctest::Approx(2.0 * (1.0 + tail)).epsilon(1e-6));
  CHECK(beta_rs(1.0) == doctest::Approx(1.6));
  HolderParams hp;
  CHECK(hp.sigma() == 0.5);
  CHECK(hp.beta_value() >= std::max(beta_rp(1.0), beta_rs(1.0)));
}

TEST_CASE("pathwise candidate") {
  auto X = smooth3(6, 6);
  DGF f = zust_lift_level2(X);
  DGF c = pathwise_extend(f);
  CHECK(c.N == 3);
  const Rect r{0.1, 0.7, 0.2, 0.9};
  const Square S = c.square(r);
  CHECK((cm_delta(S.E.body).level(3) - c.boundary(r).level(3)).norm() < 1e-12);
  CHECK(boundary_residual(S) < 1e-12);
  CHECK((S.E.body.level(2) - f.surface(r).body.level(2)).norm() == 0.0);
  CHECK_FALSE(c.section_fallback->load());

  // almost multiplicative: the defect shrinks faster than the area
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double h = 0.5 / (1 << k);
    const double defect = dgf_multiplicativity_residual(c, {0.2, 0.2 + h, 0.1, 0.1 + h}, 0.2 + h / 2, 0.1 + h / 2);
    CHECK(defect > 0.0);
    if (k > 0) CHECK(prev / defect > 5.0);
    prev = defect;
  }

  auto flat = std::make_shared<SurfaceGrid>(
      SurfaceGrid::sample(3, 3, 3, unit, [](double, double) { return vec({0.5, 1.0, -2.0}); }));
  CHECK(pathwise_extend(zust_lift_level2(flat)).surface(r).body.norm() == 0.0);
  CHECK(pathwise_extend(f, Candidate::zero).surface(r).body.level(3).norm() == 0.0);
}

TEST_CASE("grid multiplication") {
  auto X = smooth3(5, 7);
  DGF f = zust_lift_level2(X);
  const Rect r{0.1, 0.9, 0.05, 0.85};
  CHECK(square_diff(grid_multiply(f, r, 0), f.square(r)) == 0.0);
  CHECK(square_diff(grid_multiply(f, r, 3), f.square(r)) < 1e-10);
  CHECK(square_diff(grid_multiply(f, r, 3), grid_multiply(f, r, 3, true)) < 1e-10);
  oracle::Rng rng(3);
  for (int k = 0; k < 4; ++k) {
    const double s1 = rng.uniform(0, 0.5), t1 = rng.uniform(0, 0.5);
    const Rect q{s1, s1 + rng.uniform(0.1, 0.5), t1, t1 + rng.uniform(0.1, 0.5)};
    for (int m = 1; m <= 4; ++m) CHECK(square_diff(grid_multiply(f, q, m), f.square(q)) < 1e-9);
  }
  CHECK_THROWS_AS(grid_multiply(f, r, 11), DomainError);
}

TEST_CASE("extension of a smooth surface") {
  auto X = smooth3(8, 8);
  DGF f = zust_lift_level2(X);
  SewingOptions opt;
  std::vector<LevelTrace> traces;
  DGF g = extend_to_level(f, 4, opt, &traces);
  REQUIRE(traces.size() == 2);
  const Square P = block_square(*X, 0, 8, 0, 8, 4);
  const Square S = g.square(unit);
  MESSAGE("level 3 error " << level_gap(S.E, P.E, 3) << ", level 4 error " << level_gap(S.E, P.E, 4));
  MESSAGE("slopes " << traces[0].slope << " " << traces[1].slope << ", depths " << traces[0].depth << " "
                    << traces[1].depth);
  CHECK(level_gap(S.E, P.E, 2) < 1e-12);
  CHECK(level_gap(S.E, P.E, 3) < 1e-4);
  CHECK(level_gap(S.E, P.E, 4) < 1e-4);
  CHECK(max_level_diff(S.x, P.x) < 1e-12);
  CHECK(max_level_diff(S.y, P.y) < 1e-12);
  CHECK(traces[0].converged);
  CHECK(traces[1].converged);
  CHECK(traces[0].slope <= -0.8);
  CHECK(traces[1].slope <= -1.6);
  CHECK_FALSE(traces[0].section_fallback);

  // sub-rectangles: dyadic ones come from the table, others from local refinement
  for (const Rect& q : {Rect{0.25, 0.75, 0.5, 1.0}, Rect{0.125, 0.625, 0.25, 0.875}}) {
    int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
    X->lattice_rect(q, i0, i1, j0, j1);
    const Square Q = block_square(*X, i0, i1, j0, j1, 4);
    CHECK(level_gap(g.surface(q), Q.E, 3) < 1e-4);
    CHECK(level_gap(g.surface(q), Q.E, 4) < 1e-4);
  }
  CHECK(dgf_multiplicativity_residual(g, {0.1, 0.9, 0.2, 0.8}, 0.4, 0.55) < 1e-4);

  // with a control under which the input is rho-Hoelder, the output obeys the level bounds
  DGF cal = f;
  while (regularity_report(cal, RegularityMode::standard, 3).worst > 1.0) cal.hp.C_omega *= 1.25;
  const double beta = cal.hp.beta_value(), w = 2.0 * cal.hp.C_omega;
  MESSAGE("calibrated C_omega " << cal.hp.C_omega);
  for (int k = 2; k <= 4; ++k)
    CHECK(S.E.body.level(k).norm() <= std::pow(w, k) / (beta * std::tgamma(k + 1.0)));

  const G1Basis basis = g1_basis(3, 4);
  CHECK(is_grouplike_1(S.E, basis, 1e-6));
  CHECK(is_grouplike_1(g.surface({0.25, 0.5, 0.0, 0.25}), basis, 1e-6));

  std::ostringstream os;
  write_trace_csv(os, traces);
  CHECK(os.str().rfind("level,depth,gap\n3,", 0) == 0);

  CHECK(square_diff(signature_of_rough_surface(f, 2, opt), f.square(unit)) == 0.0);
}

TEST_CASE("two candidates share a limit") {
  auto X = smooth2(8);
  DGF f = zust_lift_level2(X);
  SewingOptions a, b;
  b.candidate = Candidate::zero;
  LevelTrace ta, tb;
  DGF ga = extend_one_level(f, a, &ta), gb = extend_one_level(f, b, &tb);
  const double diff = level_gap(ga.surface(unit), gb.surface(unit), 3);
  MESSAGE("candidate difference " << diff);
  CHECK(diff < 2 * a.tol);

  const Square S = signature_of_rough_surface(f, 4);
  const Square P = block_square(*X, 0, 8, 0, 8, 4);
  CHECK(square_diff(S, P) < 1e-5);
}

TEST_CASE("extension of degenerate inputs") {
  auto flat = std::make_shared<SurfaceGrid>(
      SurfaceGrid::sample(2, 4, 4, unit, [](double, double) { return vec({0.5, -2.0}); }));
  DGF g = extend_to_level(zust_lift_level2(flat), 4);
  CHECK(g.surface(unit).body.norm() == 0.0);
  CHECK(g.surface({0.1, 0.3, 0.2, 0.7}).body.norm() == 0.0);

  DGF f = zust_lift_level2(smooth2(4));
  SewingOptions bad;
  bad.m_max = 1;
  CHECK_THROWS_AS(extend_one_level(f, bad), ConvergenceError);
  bad.throw_on_fail = false;
  LevelTrace tr;
  extend_one_level(f, bad, &tr);
  CHECK_FALSE(tr.converged);
  bad.m_min = 3;
  bad.m_max = 2;
  CHECK_THROWS_AS(extend_one_level(f, bad), DomainError);
}

TEST_CASE("regularity report") {
  DGF f = zust_lift_level2(smooth3(8, 8));
  RegularityReport a = regularity_report(f, RegularityMode::standard, 3);
  RegularityReport b = regularity_report(f, RegularityMode::rectangular, 3);
  CHECK(std::isfinite(a.worst));
  CHECK(a.worst > 0.0);
  CHECK(a.beta == doctest::Approx(beta_auto(1.0)));
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(std::isfinite(a.rows[k].ratio));
    if (a.rows[k].name.find("continuity") == std::string::npos)
      CHECK(a.rows[k].ratio == b.rows[k].ratio);
  }
  bool box = false;
  for (const RegularityRow& row : a.rows)
    if (row.name == "box_increment") {
      box = true;
      CHECK(row.ratio <= 1.0);
    }
  CHECK(box);
  CHECK(a.holder_norm > 0.0);
}

TEST_CASE("Hoelder metric") {
  DGF f = zust_lift_level2(smooth3(4, 4));
  auto Y = std::make_shared<SurfaceGrid>(SurfaceGrid::sample(3, 4, 4, unit, [](double s, double t) {
    return vec({s + 0.25 * t * t, t + 0.2 * std::sin(2 * s), s * t});
  }));
  auto Z = std::make_shared<SurfaceGrid>(SurfaceGrid::sample(3, 4, 4, unit, [](double s, double t) {
    return vec({s, t - 0.1 * s, s * t + 0.2 * t});
  }));
  DGF g = zust_lift_level2(Y), h = zust_lift_level2(Z);
  CHECK(dgf_metric(f, f, 1.0) == 0.0);
  const double fg = dgf_metric(f, g, 1.0), gf = dgf_metric(g, f, 1.0);
  CHECK(std::abs(fg - gf) < 1e-10);
  CHECK(fg > 0.0);
  CHECK(fg <= dgf_metric(f, h, 1.0) + dgf_metric(h, g, 1.0) + 1e-10);

  // surface-only perturbation: d^s doubles with the perturbation
  auto perturbed = [&f](double c) {
    DGF p = f;
    auto base = f.surface;
    p.surface = [base, c](const Rect& r) {
      Tensor1Hat E = base(r);
      E.body.level(2) *= 1.0 + c;
      return E;
    };
    return p;
  };
  const double d1 = dgf_metric(f, perturbed(0.1), 1.0), d2 = dgf_metric(f, perturbed(0.2), 1.0);
  CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-12));
}
