#pragma once

#include "freespec/linearize.hpp"

namespace freespec {

// One solve of the matrix fixed-point equation
//   a_0 + sum_i a_i G a_i + G^{-1} = Lambda
// at a spectral parameter with positive definite imaginary part. The branch
// is the one with Im G <= 0, reached by damped iteration from -i/(1+|l|).
struct CauchyPoint {
  CMat lambda;      // m x m spectral parameter
  CMat G;           // k x k transform
  double residual;  // operator norm of a0 + sum a_i G a_i + G^{-1} - Lambda
  int iterations;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  const CMat* warm = nullptr;  // warm start for continuation sweeps
  bool check_herglotz = true;  // verify Im G <= 0 after convergence
};

CauchyPoint solve_G(const LinearPencil& pencil, const CMat& lambda_m, SolveOptions opt = {});

// Scalar transform g(lambda) = (1/m) sum of the first m diagonal entries of
// G(lambda 1_m); reflection g(conj lambda) = conj g(lambda) for Im lambda<0.
cdouble scalar_g(const LinearPencil& pencil, cdouble lambda, double tol = 1e-10,
                 const CMat* warm = nullptr, CMat* G_out = nullptr);
cdouble scalar_g(const MatrixNCPoly& p, cdouble lambda, double tol = 1e-10);

// Moments of the limiting distribution extracted from g by trapezoid contour
// integration on |lambda| = radius (radius must exceed the spectral bound).
// Independent route from the symbolic oracle; used to cross-check it.
std::vector<double> moments_from_g(const LinearPencil& pencil, int jmax, double radius,
                                   int npts = 64, double tol = 1e-10);

// Crude spectral bound sum_w |c_w| 2^{|w|} for bracketing grids and contours.
double spectral_bound(const MatrixNCPoly& p);

}  // namespace freespec
