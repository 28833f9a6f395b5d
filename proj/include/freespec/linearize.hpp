#pragma once

#include "freespec/ncpoly.hpp"

#include <nlohmann/json_fwd.hpp>

namespace freespec {

// Degree-1 factorization p = u_1 u_2 ... u_d with u_j of shape
// dims[j-1] x dims[j]; dims[0] = m, dims[d] = m'.
struct Factorization {
  std::vector<MatrixNCPoly> factors;
  std::vector<int> dims;

  int degree() const { return static_cast<int>(factors.size()); }
  int r() const { return factors.empty() ? 0 : factors[0].r(); }
  // Symbolic product of the factors.
  MatrixNCPoly product() const;
};

// Canonical factorization: u_1..u_{d-1} are the fixed generator row blocks,
// u_d carries the coefficients; dims grow as (r+1)^{j-1} * m.
Factorization factorize(const MatrixNCPoly& p);

// Wrap an explicit factor list, validating shapes, degrees, and (optionally)
// that the product reproduces `expect` coefficient-wise within tol.
Factorization make_factorization(std::vector<MatrixNCPoly> factors,
                                 const MatrixNCPoly* expect = nullptr, double tol = 1e-12);

// Affine pencil S = a_0 (x) 1 + sum_i a_i (x) X_i of total size k = sum m_j,
// with the cyclic superdiagonal block shape: nonzero blocks of every a_i sit
// at (j, j+1) for j < d and at (d, 1).
struct LinearPencil {
  int k = 0;
  int m = 0;   // corner dimension (= dims[0])
  int r = 0;   // generator count
  std::vector<int> block_dims;  // m_1..m_d
  std::vector<CMat> a;          // a[0..r], each k x k

  // Lambda-embedding lambda (+) 1_{k-m} for an m x m spectral parameter.
  CMat Lambda(const CMat& lambda_m) const;
  CMat Lambda(cdouble lambda) const { return Lambda(lambda * CMat::Identity(m, m)); }
  // Corner projection 1_m (+) 0.
  CMat corner_E() const;

  // S evaluated on numeric inputs (k*n x k*n).
  CMat evaluate_S(const std::vector<CMat>& v) const;
  // A(lambda, v) = Lambda (x) 1 - S(v).
  CMat evaluate_A(const CMat& lambda_m, const std::vector<CMat>& v) const;

  nlohmann::json to_json() const;
};

LinearPencil assemble_pencil(const Factorization& f);

// Closed-form inverse of A(lambda, v) built from partial products of the
// factors around (lambda (x) 1 - p(v))^{-1} plus the constant upper
// triangular part. Throws numeric_error when lambda (x) 1 - p(v) is
// ill-conditioned (condition number above cond_limit).
CMat pencil_block_inverse(const Factorization& f, const CMat& lambda_m,
                          const std::vector<CMat>& v, double cond_limit = 1e12);

}  // namespace freespec
