#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "freespec/acceptance.hpp"
#include "freespec/freemoments.hpp"
#include "freespec/ovcauchy.hpp"

using namespace freespec;

namespace {

LinearPencil pencil_of(const MatrixNCPoly& p) { return assemble_pencil(factorize(p)); }

cdouble semicircle_transform(cdouble z) {
  cdouble w = std::sqrt(z * z - 4.0);
  if (std::real(std::conj(z) * w) < 0) w = -w;
  return (z - w) / 2.0;
}

}  // namespace

TEST_CASE("solve_G: single generator closed form") {
  LinearPencil P = pencil_of(fixture_semicircle());
  SolveOptions opt;
  CauchyPoint cp = solve_G(P, cdouble(0, 2) * CMat::Identity(1, 1), opt);
  CHECK(std::abs(cp.G(0, 0) - cdouble(0.0, 1.0 - std::sqrt(2.0))) <= 1e-10);
  CHECK(cp.residual <= opt.tol);

  CauchyPoint cp10 = solve_G(P, cdouble(0, 10) * CMat::Identity(1, 1), opt);
  CHECK(std::abs(cp10.G(0, 0) - semicircle_transform(cdouble(0, 10))) <= 1e-10);
  CHECK(std::abs(cp10.G(0, 0).imag() + 0.0990195135927845) <= 1e-10);
}

TEST_CASE("solve_G: pure constant pencil is the embedded resolvent") {
  // a_i = 0 for i >= 1, a_0 = 0: G = Lambda^{-1} immediately
  LinearPencil P;
  P.k = 2;
  P.m = 2;
  P.r = 1;
  P.block_dims = {2};
  P.a = {CMat::Zero(2, 2), CMat::Zero(2, 2)};
  CMat lam = cdouble(1, 2) * CMat::Identity(2, 2);
  CauchyPoint cp = solve_G(P, lam);
  CHECK(opnorm(cp.G - P.Lambda(lam).inverse()) <= 1e-12);
  // one Picard step per continuation stage
  CHECK(cp.iterations <= 40);
}

TEST_CASE("solve_G: preconditions") {
  LinearPencil P = pencil_of(fixture_semicircle());
  CHECK_THROWS_AS(solve_G(P, cdouble(2, 0) * CMat::Identity(1, 1)), config_error);
  CHECK_THROWS_AS(solve_G(P, cdouble(0, -1) * CMat::Identity(1, 1)), config_error);
  SolveOptions bad;
  bad.tol = -1.0;
  CHECK_THROWS_AS(solve_G(P, cdouble(0, 1) * CMat::Identity(1, 1), bad), config_error);
}

TEST_CASE("scalar_g: reflection to the lower half-plane") {
  LinearPencil P = pencil_of(fixture_semicircle());
  cdouble up = scalar_g(P, cdouble(0, 2));
  cdouble down = scalar_g(P, cdouble(0, -2));
  CHECK(std::abs(down - std::conj(up)) == 0.0);
  CHECK(std::abs(down - cdouble(0.0, std::sqrt(2.0) - 1.0)) <= 1e-10);
  CHECK_THROWS_AS(scalar_g(P, cdouble(1, 0)), config_error);
}

TEST_CASE("scalar_g: squared generator matches the truncated moment series") {
  MatrixNCPoly p = fixture_square();
  LinearPencil P = pencil_of(p);
  cdouble lam(0, 5);
  cdouble g = scalar_g(P, lam);
  cdouble series = 0.0;
  for (int j = 0; j <= 11; ++j) series += poly_moment(p, j) / std::pow(lam, j + 1);
  // the remainder is dominated by the first neglected term m_12 / 5^13 = 1.7e-4
  CHECK(std::abs(g - series) <= 2e-4);
  CHECK(std::abs(g - series) >= 1e-5);
}

TEST_CASE("Herglotz corner and residual invariants on the fixtures") {
  for (const MatrixNCPoly& p :
       {fixture_semicircle(), fixture_square(), fixture_anticomm(), fixture_twoband()}) {
    LinearPencil P = pencil_of(p);
    for (cdouble lam : {cdouble(0, 2), cdouble(1.5, 0.4), cdouble(-0.7, 1.0)}) {
      CauchyPoint cp = solve_G(P, lam * CMat::Identity(P.m, P.m));
      CHECK(cp.residual <= 1e-10);
      CHECK(max_eig_hermitian(herm_im(cp.G.topLeftCorner(P.m, P.m))) <= 1e-10);
    }
  }
}

TEST_CASE("full Herglotz property for self-adjoint (degree-one) pencils") {
  LinearPencil P = pencil_of(fixture_twoband());
  CauchyPoint cp = solve_G(P, cdouble(0.5, 0.8) * CMat::Identity(2, 2));
  CHECK(max_eig_hermitian(herm_im(cp.G)) <= 1e-10);
}

TEST_CASE("norm bound proxy: |G| <= C' (1 + |Im lambda|^{-1})") {
  LinearPencil P = pencil_of(fixture_anticomm());
  double cprime = 0.0;
  for (double y : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    CauchyPoint cp = solve_G(P, cdouble(0.3, y) * CMat::Identity(1, 1));
    cprime = std::max(cprime, opnorm(cp.G) / (1.0 + 1.0 / y));
  }
  CHECK(cprime <= 10.0);  // empirical constant for this pencil
  CauchyPoint tight = solve_G(P, cdouble(0.3, 0.1) * CMat::Identity(1, 1));
  CHECK(opnorm(tight.G) <= cprime * (1.0 + 10.0) * 3.0);
}

TEST_CASE("asymptotics: lambda g(lambda) -> 1") {
  for (const MatrixNCPoly& p : {fixture_semicircle(), fixture_square(), fixture_anticomm()}) {
    LinearPencil P = pencil_of(p);
    for (double R : {50.0, 100.0, 200.0}) {
      cdouble g = scalar_g(P, cdouble(0, R));
      CHECK(std::abs(cdouble(0, R) * g - 1.0) <= 10.0 / R);
    }
  }
}

TEST_CASE("factorization independence of the scalar transform") {
  MatrixNCPoly sq = fixture_square();
  LinearPencil canonical = pencil_of(sq);

  CMat row_x = CMat::Zero(1, 2), row_c = CMat::Zero(1, 2);
  row_x(0, 0) = 1.0;
  row_c(0, 1) = 1.0;
  auto u1 = MatrixNCPoly::build(1, 2, 1, {{NCWord{1}, row_x}, {NCWord{}, row_c}});
  CMat col_x = CMat::Zero(2, 1);
  col_x(0, 0) = 1.0;
  auto u2 = MatrixNCPoly::build(2, 1, 1, {{NCWord{1}, col_x}});
  LinearPencil other = assemble_pencil(make_factorization({u1, u2}, &sq));

  for (cdouble lam : {cdouble(0, 2), cdouble(2, 0.5), cdouble(-1, 1)}) {
    cdouble g1 = scalar_g(canonical, lam);
    cdouble g2 = scalar_g(other, lam);
    CHECK(std::abs(g1 - g2) <= 1e-8);
  }
}

TEST_CASE("moment consistency: contour moments match the pairing oracle") {
  for (const MatrixNCPoly& p :
       {fixture_semicircle(), fixture_square(), fixture_anticomm(), fixture_twoband()}) {
    LinearPencil P = pencil_of(p);
    double radius = spectral_bound(p) + 2.0;
    auto got = moments_from_g(P, 6, radius, 64);
    for (int j = 0; j <= 6; ++j) {
      double oracle = poly_moment(p, j);
      CHECK(std::abs(got[j] - oracle) <= 1e-3 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST_CASE("warm starts reproduce the cold solution") {
  LinearPencil P = pencil_of(fixture_anticomm());
  CMat G1;
  cdouble cold = scalar_g(P, cdouble(0.4, 0.3), 1e-10, nullptr, &G1);
  cdouble warm = scalar_g(P, cdouble(0.42, 0.3), 1e-10, &G1, nullptr);
  cdouble cold2 = scalar_g(P, cdouble(0.42, 0.3));
  CHECK(std::abs(warm - cold2) <= 1e-9);
  CHECK(std::abs(cold - cold2) > 0.0);  // distinct points differ
}
