#pragma once

#include "freespec/ovcauchy.hpp"
#include "freespec/spectrum.hpp"

#include <nlohmann/json_fwd.hpp>

namespace freespec {

// Transpose-doubled pencil for the real-ensemble 1/n correction. The block
// coefficients are a_hat_i = diag(eps_i a_i^T, a_i) with eps_i = +1 for the
// plain kinds and -1 for the star kinds, matching the transpose signs of
// the underlying generators.
struct DoubledPencil {
  LinearPencil base;
  std::vector<int> eps;       // one sign per generator
  std::vector<CMat> a_hat;    // a_hat[0..r], each 2k x 2k
  int k2 = 0;

  CMat mu(cdouble lambda, const CMat& x) const;  // [[Lambda^T, x], [0, Lambda]]
};

DoubledPencil make_doubled(const LinearPencil& pencil, const std::vector<int>& eps);

// Nonlinear doubled solve: a_hat_0 + sum a_hat_i G a_hat_i + G^{-1} = mu.
// Used as the oracle for the linear route. Requires |x| < 1.
CMat solve_doubled_G(const DoubledPencil& dp, cdouble lambda, const CMat& x, double tol = 1e-10,
                     const CMat* warm_single = nullptr);

// The correction data at one spectral parameter:
//   K(lambda, x)   solves sum_i eps_i a_i^T K a_i - G^{-T} K G^{-1} = x,
//   R(lambda)      = -sum_j eps_j sum_{uv} a_j e_uv K(lambda, e_uv a_j),
//   L(lambda)      = -K(lambda, R G^{-1}),
//   l(lambda)      = (1/m) sum of the first m diagonal entries of L.
// Convention: g_n(lambda) = g(lambda) + l(lambda)/n + O(1/n^2).
struct CorrectionPoint {
  cdouble lambda;
  CMat G;      // k x k single-system transform
  CMat K_op;   // k^2 x k^2 materialized map x -> K(lambda, x)
  CMat R;
  CMat L;
  cdouble l;
};

// Materialize the K map for a given G (k^2 x k^2 linear solve). Falls back
// is not needed here; a singular system throws.
CMat solve_K_linear(const DoubledPencil& dp, const CMat& G, double cond_limit = 1e12);
CMat apply_K(const CMat& K_op, const CMat& x);

CMat compute_R(const DoubledPencil& dp, const CMat& K_op);

// Full correction point; Im lambda < 0 is reached through the adjoint
// reflection of the single-system transform.
CorrectionPoint correction_point(const DoubledPencil& dp, cdouble lambda, double tol = 1e-10,
                                 const CMat* warmG = nullptr);

cdouble compute_l(const DoubledPencil& dp, cdouble lambda, double tol = 1e-10);

struct DeltaDiagnostics {
  std::vector<double> y_schedule;
  std::vector<cdouble> integrals;   // per y
  double extrapolation_error = 0.0; // last Richardson correction + imag part
  cdouble raw = 0.0;
};

// Distribution value Delta(phi) = lim_{y->0+} (i/2pi) int phi(x)
// [l(x+iy) - l(x-iy)] dx, by composite Simpson in x and two-level
// Richardson in y. E (tr (x) tr) phi(Q_n) = (tr (x) tau) phi(q)
// + Delta(phi)/n + O(1/n^2).
double delta_functional(const DoubledPencil& dp, const TestFunction& phi,
                        std::vector<double> y_schedule = {0.05, 0.025, 0.0125},
                        double grid_step = 0.0025, double tol = 1e-10,
                        DeltaDiagnostics* diag = nullptr, int threads = 1);

}  // namespace freespec
