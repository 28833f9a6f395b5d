#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "freespec/acceptance.hpp"
#include "freespec/linearize.hpp"
#include "freespec/rng.hpp"

using namespace freespec;

namespace {

CMat one() { return CMat::Identity(1, 1); }

CMat random_herm(const CounterRng& rng, uint32_t trial, uint32_t slot, int n) {
  CMat h(n, n);
  uint32_t ord = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto [a, b] = rng.gauss_pair(trial, slot, ord++);
      h(i, j) = cdouble(a, b);
    }
  return (h + h.adjoint()) / 2.0;
}

double max_coeff_error(const MatrixNCPoly& diff) {
  double worst = 0.0;
  for (const auto& [w, c] : diff.terms()) worst = std::max(worst, c.cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TEST_CASE("factorize: degree one is the polynomial itself") {
  auto x1 = MatrixNCPoly::generator(1, 1);
  Factorization f = factorize(x1);
  CHECK(f.degree() == 1);
  CHECK(f.dims == std::vector<int>{1, 1});
  CHECK((f.factors[0] - x1).is_zero());
  CHECK_THROWS_AS(factorize(MatrixNCPoly::build(1, 1, 1, {})), config_error);
}

TEST_CASE("factorize: canonical dims and symbolic round trip") {
  auto p = MatrixNCPoly::build(1, 1, 2, {{NCWord{1, 2}, one()}});
  Factorization f = factorize(p);
  CHECK(f.dims == std::vector<int>{1, 3, 1});
  CHECK(max_coeff_error(f.product() - p) == 0.0);

  auto q = MatrixNCPoly::build(
      1, 1, 1, {{NCWord{1, 1}, one()}, {NCWord{1}, one()}, {NCWord{}, one()}});
  Factorization g = factorize(q);
  CHECK(g.dims == std::vector<int>{1, 2, 1});
  CHECK(max_coeff_error(g.product() - q) <= 1e-15);
}

TEST_CASE("factorize: random polynomials re-multiply exactly") {
  for (int i = 0; i < 30; ++i) {
    MatrixNCPoly p = random_selfadjoint_poly(99, i, 2, 3, 4);
    Factorization f = factorize(p);
    CHECK(max_coeff_error(f.product() - p) <= 1e-12);
  }
}

TEST_CASE("assemble: single generator pencil") {
  auto x1 = MatrixNCPoly::generator(1, 1);
  LinearPencil P = assemble_pencil(factorize(x1));
  CHECK(P.k == 1);
  CHECK(P.a[0](0, 0) == cdouble(0, 0));
  CHECK(P.a[1](0, 0) == cdouble(1, 0));
}

TEST_CASE("assemble: cyclic superdiagonal block shape") {
  auto p = MatrixNCPoly::build(1, 1, 2, {{NCWord{1, 2}, one()}});
  LinearPencil P = assemble_pencil(factorize(p));
  CHECK(P.k == 4);
  CHECK(P.block_dims == std::vector<int>{1, 3});
  // nonzero blocks only at (1,2) rows 0, cols 1..3 and (2,1) rows 1..3, col 0
  for (int i = 1; i <= 2; ++i) {
    CHECK(P.a[i].block(1, 1, 3, 3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(P.a[i](0, 0)) == 0.0);
  }
  CHECK(P.a[1].cwiseAbs().maxCoeff() > 0.0);
  CHECK(P.a[2].cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("pencil: A equals Lambda (x) 1 - S exactly, corner inverse matches") {
  CounterRng rng(41);
  MatrixNCPoly p = random_selfadjoint_poly(123, 5, 1, 2, 3);
  for (int idx = 6; !(p.r() == 2 && p.degree() == 3 && p.m() == 1); ++idx)
    p = random_selfadjoint_poly(123, idx, 1, 2, 3);
  Factorization f = factorize(p);
  LinearPencil P = assemble_pencil(f);
  CHECK(P.k == 13);

  int n = 3;
  std::vector<CMat> v{random_herm(rng, 0, 1, n), random_herm(rng, 0, 2, n)};
  CMat lam = cdouble(0, 2) * CMat::Identity(1, 1);

  CMat A = P.evaluate_A(lam, v);
  // block assembly agrees with the factor evaluation
  CMat S = P.evaluate_S(v);
  CMat LamBig = kron(P.Lambda(lam), CMat::Identity(n, n));
  CHECK(opnorm(A - (LamBig - S)) == 0.0);

  CMat Ainv = A.partialPivLu().solve(CMat::Identity(A.rows(), A.cols()));
  CMat corner = Ainv.topLeftCorner(n, n);
  CMat direct = (kron(lam, CMat::Identity(n, n)) - p.evaluate(v)).inverse();
  CHECK(opnorm(corner - direct) <= 1e-10 * opnorm(direct));
}

TEST_CASE("block inverse: degree one collapses to the resolvent") {
  auto x1 = MatrixNCPoly::generator(1, 1);
  Factorization f = factorize(x1);
  CMat a = CMat::Identity(2, 2);
  a(0, 0) = 0.5;
  CMat lam = cdouble(1, 1) * CMat::Identity(1, 1);
  CMat binv = pencil_block_inverse(f, lam, {a});
  CMat expect = (kron(lam, CMat::Identity(2, 2)) - a).inverse();
  CHECK(opnorm(binv - expect) <= 1e-13);
}

TEST_CASE("block inverse: random instances invert the pencil") {
  CounterRng rng(43);
  for (int i = 0; i < 10; ++i) {
    MatrixNCPoly p = random_selfadjoint_poly(7, i, 2, 2, 3);
    Factorization f = factorize(p);
    LinearPencil P = assemble_pencil(f);
    int n = 4;
    std::vector<CMat> v;
    for (int g = 0; g < p.r(); ++g)
      v.push_back(random_herm(rng, static_cast<uint32_t>(i), static_cast<uint32_t>(g), n));
    CMat lam = cdouble(0, 2) * CMat::Identity(p.m(), p.m());
    CMat bc = pencil_block_inverse(f, lam, v);
    CMat A = P.evaluate_A(lam, v);
    CHECK(opnorm(CMat(bc * A - CMat::Identity(A.rows(), A.cols()))) <= 1e-10);
    CMat dense = A.partialPivLu().solve(CMat::Identity(A.rows(), A.cols()));
    CHECK(opnorm(bc - dense) <= 1e-10 * (1.0 + opnorm(dense)));
  }
}

TEST_CASE("invertibility equivalence at an eigenvalue of p(v)") {
  CounterRng rng(47);
  MatrixNCPoly p = random_selfadjoint_poly(55, 1, 1, 2, 2);
  Factorization f = factorize(p);
  LinearPencil P = assemble_pencil(f);
  int n = 4;
  std::vector<CMat> v{random_herm(rng, 1, 1, n), random_herm(rng, 1, 2, n)};
  CMat Q = p.evaluate(v);
  Eigen::SelfAdjointEigenSolver<CMat> es(Q);
  double eig = es.eigenvalues()(0);

  CMat lam_sing = eig * CMat::Identity(1, 1);
  CMat A_sing = P.evaluate_A(lam_sing, v);
  Eigen::JacobiSVD<CMat> svd(A_sing);
  CHECK(svd.singularValues().minCoeff() <=
        1e-8 * svd.singularValues().maxCoeff());

  CMat lam_ok = (eig + cdouble(0, 1)) * CMat::Identity(1, 1);
  CMat A_ok = P.evaluate_A(lam_ok, v);
  Eigen::JacobiSVD<CMat> svd2(A_ok);
  CHECK(svd2.singularValues().minCoeff() > 1e-6 * svd2.singularValues().maxCoeff());

  // block-inverse rejects the singular parameter
  CHECK_THROWS_AS(pencil_block_inverse(f, lam_sing, v), numeric_error);
}

TEST_CASE("corner resolvent bound for Hermitian evaluations") {
  CounterRng rng(53);
  MatrixNCPoly p = random_selfadjoint_poly(77, 2, 2, 2, 2);
  int n = 4;
  std::vector<CMat> v{random_herm(rng, 2, 1, n), random_herm(rng, 2, 2, n)};
  CMat Q = p.evaluate(v);
  for (double y : {0.5, 1.0, 2.0}) {
    CMat lam = cdouble(0.3, y) * CMat::Identity(p.m(), p.m());
    CMat res = (kron(lam, CMat::Identity(n, n)) - Q).inverse();
    CHECK(opnorm(res) <= 1.0 / y + 1e-9);
  }
}

TEST_CASE("hand-rolled factorization validates against its target") {
  // (X1 1) * (X1 ; 0) = X1^2
  auto sq = MatrixNCPoly::build(1, 1, 1, {{NCWord{1, 1}, one()}});
  CMat row_x = CMat::Zero(1, 2), row_c = CMat::Zero(1, 2);
  row_x(0, 0) = 1.0;
  row_c(0, 1) = 1.0;
  auto u1 = MatrixNCPoly::build(1, 2, 1, {{NCWord{1}, row_x}, {NCWord{}, row_c}});
  CMat col_x = CMat::Zero(2, 1);
  col_x(0, 0) = 1.0;
  auto u2 = MatrixNCPoly::build(2, 1, 1, {{NCWord{1}, col_x}});
  Factorization f = make_factorization({u1, u2}, &sq);
  CHECK(f.dims == std::vector<int>{1, 2, 1});

  auto bad = MatrixNCPoly::build(1, 1, 1, {{NCWord{1}, one()}});
  CHECK_THROWS_AS(make_factorization({u1, u2}, &bad), config_error);
}
