#include "doctest.h"
#include "oracles.hpp"
#include "surfsig/double_group.hpp"

using namespace surfsig;

namespace {

GradedTensor0 one(int d, int N) { return GradedTensor0::unit(d, N); }

// random group-like square: random edges x, y, w, random interior E, z solved from the boundary
Square random_square(oracle::Rng& r, int d, int N, const GradedTensor0* x = nullptr, const GradedTensor0* w = nullptr) {
  Square S;
  S.x = x ? *x : oracle::random_grouplike(r, d, N);
  S.w = w ? *w : oracle::random_grouplike(r, d, N);
  S.y = oracle::random_grouplike(r, d, N);
  Tensor1 e(d, N);
  e.level(2)[0] = 0.3 * r.normal();
  for (int n = 3; n <= N; ++n) e += 0.2 * act_left(GradedTensor0::letter(d, N, r.integer(0, d - 1)), e);
  S.E = exp_star(e);
  // delta(E) = x y z^-1 w^-1  =>  z = (w^-1... ) solve: z^-1 = y^-1 x^-1 delta(E) w
  GradedTensor0 zi = t0_inverse(S.y) * t0_inverse(S.x) * cm_delta(S.E) * S.w;
  S.z = t0_inverse(zi);
  return S;
}

}  // namespace

TEST_CASE("square construction") {
  const int d = 2, N = 4;
  CHECK_NOTHROW(make_square(one(d, N), one(d, N), one(d, N), one(d, N), Tensor1Hat::one(d, N)));
  GradedTensor0 x = t0_exp(GradedTensor0::letter(d, N, 0));
  CHECK_NOTHROW(make_square(x, one(d, N), x, one(d, N), Tensor1Hat::one(d, N)));
  try {
    make_square(x, one(d, N), one(d, N), one(d, N), Tensor1Hat::one(d, N));
    FAIL("expected boundary error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("1.0") != std::string::npos);
  }
  CHECK_THROWS_AS(make_square(x, one(d, 3), x, one(d, N), Tensor1Hat::one(d, N)), ShapeError);
  oracle::Rng r(31);
  Square S = random_square(r, 3, 5);
  CHECK(boundary_residual(S) < 1e-12);
}

TEST_CASE("identities and inverses") {
  oracle::Rng r(32);
  for (int it = 0; it < 10; ++it) {
    const int d = r.integer(2, 3), N = d == 2 ? 6 : 5;
    Square S = random_square(r, d, N);
    CHECK(square_diff(compose_h(S, identity_h(S.y)), S) < 1e-12);
    CHECK(square_diff(compose_h(identity_h(S.w), S), S) < 1e-12);
    CHECK(square_diff(compose_v(S, identity_v(S.z)), S) < 1e-12);
    CHECK(square_diff(compose_v(identity_v(S.x), S), S) < 1e-12);

    Square Sh = inverse_h(S);
    CHECK(boundary_residual(Sh) < 1e-11);
    CHECK(square_diff(compose_h(S, Sh), identity_h(S.w)) < 1e-11);
    CHECK(square_diff(compose_h(Sh, S), identity_h(S.y)) < 1e-11);
    Square Sv = inverse_v(S);
    CHECK(boundary_residual(Sv) < 1e-11);
    CHECK(square_diff(compose_v(Sv, S), identity_v(S.z)) < 1e-11);
    CHECK(square_diff(compose_v(S, Sv), identity_v(S.x)) < 1e-11);
    GradedTensor0 x = oracle::random_grouplike(r, d, N);
    CHECK(square_diff(inverse_h(identity_h(x)), identity_h(x)) < 1e-12);
  }
}

TEST_CASE("degenerate interiors concatenate edges") {
  const int d = 2, N = 4;
  GradedTensor0 a = t0_exp(GradedTensor0::letter(d, N, 0)), b = t0_exp(GradedTensor0::letter(d, N, 1));
  Square S = make_square(a, one(d, N), a, one(d, N), Tensor1Hat::one(d, N));
  Square T = make_square(b, one(d, N), b, one(d, N), Tensor1Hat::one(d, N));
  Square R = compose_h(S, T);
  CHECK(max_level_diff(R.x, a * b) == 0.0);
  CHECK(max_level_diff(R.E, Tensor1Hat::one(d, N)) == 0.0);
  CHECK(boundary_residual(R) < 1e-14);
  CHECK_THROWS_AS(compose_v(S, T), DomainError);
}

TEST_CASE("interchange law and associativity") {
  oracle::Rng r(33);
  for (int it = 0; it < 10; ++it) {
    const int d = r.integer(2, 3), N = d == 2 ? 6 : 5;
    // grid  C D
    //       A B
    Square A = random_square(r, d, N);
    Square B = random_square(r, d, N, nullptr, &A.y);
    Square C = random_square(r, d, N, &A.z);
    // D needs bottom = B.z and left = C.y
    Square D = random_square(r, d, N, &B.z, &C.y);
    Square rows = compose_v(compose_h(A, B), compose_h(C, D));
    Square cols = compose_h(compose_v(A, C), compose_v(B, D));
    CHECK(square_diff(rows, cols) < 1e-10 * std::max(1.0, rows.E.body.norm()));
    CHECK(boundary_residual(rows) < 1e-10);

    Square E = random_square(r, d, N, nullptr, &B.y);
    Square l = compose_h(compose_h(A, B), E), rr = compose_h(A, compose_h(B, E));
    CHECK(square_diff(l, rr) < 1e-10 * std::max(1.0, l.E.body.norm()));
    Square F = random_square(r, d, N, &C.z);
    Square lv = compose_v(compose_v(A, C), F), rv = compose_v(A, compose_v(C, F));
    CHECK(square_diff(lv, rv) < 1e-10 * std::max(1.0, lv.E.body.norm()));
  }
}
