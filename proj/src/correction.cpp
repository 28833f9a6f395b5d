#include "freespec/correction.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "freespec/detail/fixed_point.hpp"
#include "freespec/parallel.hpp"

namespace freespec {

DoubledPencil make_doubled(const LinearPencil& P, const std::vector<int>& eps) {
  if (static_cast<int>(eps.size()) != P.r)
    throw config_error("make_doubled: need one transpose sign per generator");
  for (int e : eps)
    if (e != 1 && e != -1) throw config_error("make_doubled: signs must be +1 or -1");
  DoubledPencil dp;
  dp.base = P;
  dp.eps = eps;
  dp.k2 = 2 * P.k;
  dp.a_hat.reserve(P.r + 1);
  for (int i = 0; i <= P.r; ++i) {
    CMat ah = CMat::Zero(dp.k2, dp.k2);
    double sign = (i == 0) ? 1.0 : static_cast<double>(eps[i - 1]);
    ah.topLeftCorner(P.k, P.k) = sign * P.a[i].transpose();
    ah.bottomRightCorner(P.k, P.k) = P.a[i];
    dp.a_hat.push_back(ah);
  }
  return dp;
}

CMat DoubledPencil::mu(cdouble lambda, const CMat& x) const {
  const int k = base.k;
  CMat Lam = base.Lambda(lambda);
  CMat out = CMat::Zero(k2, k2);
  out.topLeftCorner(k, k) = Lam.transpose();
  out.topRightCorner(k, k) = x;
  out.bottomRightCorner(k, k) = Lam;
  return out;
}

namespace {

// Single-system transform valid on both half-planes: the lower one is the
// adjoint reflection of the upper one.
CMat single_G(const LinearPencil& P, cdouble lambda, double tol, const CMat* warm) {
  if (lambda.imag() == 0.0) throw config_error("correction: Im lambda must be nonzero");
  if (lambda.imag() > 0.0) {
    SolveOptions opt;
    opt.tol = tol;
    opt.warm = warm;
    return solve_G(P, lambda * CMat::Identity(P.m, P.m), opt).G;
  }
  CMat warm_conj;
  const CMat* w = nullptr;
  if (warm) {
    warm_conj = warm->adjoint();
    w = &warm_conj;
  }
  SolveOptions opt;
  opt.tol = tol;
  opt.warm = w;
  return solve_G(P, std::conj(lambda) * CMat::Identity(P.m, P.m), opt).G.adjoint();
}

}  // namespace

CMat solve_doubled_G(const DoubledPencil& dp, cdouble lambda, const CMat& x, double tol,
                     const CMat* warm_single) {
  const int k = dp.base.k;
  if (x.rows() != k || x.cols() != k) throw config_error("solve_doubled_G: x must be k x k");
  if (opnorm(x) >= 1.0)
    throw config_error("solve_doubled_G: |x| must be < 1 (rescale by linearity)");
  if (lambda.imag() <= 0.0) throw config_error("solve_doubled_G: Im lambda must be positive");

  CMat Gs = single_G(dp.base, lambda, tol, warm_single);
  CMat Mu = dp.mu(lambda, x);
  CMat G0 = CMat::Zero(dp.k2, dp.k2);
  G0.topLeftCorner(k, k) = Gs.transpose();
  G0.bottomRightCorner(k, k) = Gs;

  auto rhs_of = [&dp](const CMat& G) {
    CMat rhs = dp.a_hat[0];
    for (size_t i = 1; i < dp.a_hat.size(); ++i) rhs.noalias() += dp.a_hat[i] * G * dp.a_hat[i];
    return rhs;
  };
  auto r = detail::solve_fixed_point(rhs_of, Mu, G0, tol, 100000, 2000);
  if (!r.converged)
    throw numeric_error("solve_doubled_G: no convergence, residual " +
                        std::to_string(r.residual_fro));
  return r.G;
}

CMat solve_K_linear(const DoubledPencil& dp, const CMat& G, double cond_limit) {
  const int k = dp.base.k;
  CMat Ginv = G.partialPivLu().solve(CMat::Identity(k, k));
  // vec(sum_i eps_i a_i^T K a_i - G^{-T} K G^{-1}) = M vec(K), column-major
  CMat M = CMat::Zero(k * k, k * k);
  auto add_kron = [&](const CMat& A, const CMat& B, cdouble w) {
    // contribution of K -> A K B: kron(B^T, A)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (B(i, j) != 0.0)
          M.block(j * k, i * k, k, k) += w * B(i, j) * A;
  };
  for (int i = 1; i <= dp.base.r; ++i)
    add_kron(dp.base.a[i].transpose(), dp.base.a[i], static_cast<double>(dp.eps[i - 1]));
  add_kron(Ginv.transpose(), Ginv, -1.0);

  Eigen::PartialPivLU<CMat> lu(M);
  CMat K_op = lu.solve(CMat::Identity(k * k, k * k));
  if (!K_op.allFinite() || opnorm(M) * opnorm(K_op) > cond_limit)
    throw numeric_error("solve_K_linear: ill-conditioned K system");
  return K_op;
}

// Fallback route: materialize the map column by column from doubled
// nonlinear solves at x = e_uv / 2 (rescaled by linearity).
static CMat materialize_K_by_doubled(const DoubledPencil& dp, cdouble lambda, double tol) {
  const int k = dp.base.k;
  CMat K_op(k * k, k * k);
  for (int v = 0; v < k; ++v)
    for (int u = 0; u < k; ++u) {
      CMat x = CMat::Zero(k, k);
      x(u, v) = 0.5;
      CMat Gd = solve_doubled_G(dp, lambda, x, tol);
      CMat K = 2.0 * Gd.topRightCorner(k, k);
      K_op.col(v * k + u) = Eigen::Map<const CVec>(K.data(), k * k);
    }
  return K_op;
}

CMat apply_K(const CMat& K_op, const CMat& x) {
  const int k = static_cast<int>(x.rows());
  Eigen::Map<const CVec> vx(x.data(), k * k);
  CVec vk = K_op * vx;
  return Eigen::Map<const CMat>(vk.data(), k, k);
}

CMat compute_R(const DoubledPencil& dp, const CMat& K_op) {
  const int k = dp.base.k;
  CMat R = CMat::Zero(k, k);
  for (int j = 1; j <= dp.base.r; ++j) {
    const CMat& aj = dp.base.a[j];
    double sign = static_cast<double>(dp.eps[j - 1]);
    for (int u = 0; u < k; ++u)
      for (int v = 0; v < k; ++v) {
        // x = e_uv a_j has row u equal to row v of a_j
        CMat x = CMat::Zero(k, k);
        x.row(u) = aj.row(v);
        if (x.cwiseAbs().maxCoeff() == 0.0) continue;
        CMat K = apply_K(K_op, x);
        // a_j e_uv K adds a_j(:,u) K(v,:)
        R.noalias() -= sign * (aj.col(u) * K.row(v));
      }
  }
  return R;
}

CorrectionPoint correction_point(const DoubledPencil& dp, cdouble lambda, double tol,
                                 const CMat* warmG) {
  CorrectionPoint cp;
  cp.lambda = lambda;
  cp.G = single_G(dp.base, lambda, tol, warmG);
  try {
    cp.K_op = solve_K_linear(dp, cp.G);
  } catch (const numeric_error&) {
    if (lambda.imag() <= 0.0) throw;
    cp.K_op = materialize_K_by_doubled(dp, lambda, tol);
  }
  cp.R = compute_R(dp, cp.K_op);
  CMat Ginv = cp.G.partialPivLu().solve(CMat::Identity(dp.base.k, dp.base.k));
  cp.L = -apply_K(cp.K_op, CMat(cp.R * Ginv));
  cdouble acc = 0.0;
  for (int i = 0; i < dp.base.m; ++i) acc += cp.L(i, i);
  cp.l = acc / static_cast<double>(dp.base.m);
  return cp;
}

cdouble compute_l(const DoubledPencil& dp, cdouble lambda, double tol) {
  return correction_point(dp, lambda, tol).l;
}

double delta_functional(const DoubledPencil& dp, const TestFunction& phi,
                        std::vector<double> y_schedule, double grid_step, double tol,
                        DeltaDiagnostics* diag, int threads) {
  if (y_schedule.size() != 3) throw config_error("delta_functional: need a 3-level y schedule");
  for (size_t i = 0; i + 1 < y_schedule.size(); ++i) {
    if (y_schedule[i + 1] >= y_schedule[i])
      throw config_error("delta_functional: y schedule must decrease");
    if (std::abs(y_schedule[i] / y_schedule[i + 1] - 2.0) > 1e-9)
      throw config_error("delta_functional: y schedule ratios must be 2");
  }
  if (grid_step > 0.01) throw config_error("delta_functional: grid step must be <= 0.01");

  double lo = phi.lo() - 2.0 * grid_step, hi = phi.hi() + 2.0 * grid_step;
  int npts = static_cast<int>(std::ceil((hi - lo) / grid_step));
  if (npts % 2 == 1) ++npts;
  double h = (hi - lo) / npts;

  // l on both sides of the axis for every node and every y; chunked warm
  // starts as in the density sweeps.
  std::vector<cdouble> Iy(y_schedule.size());
  for (size_t s = 0; s < y_schedule.size(); ++s) {
    double y = y_schedule[s];
    std::vector<cdouble> lvals_up(npts + 1), lvals_dn(npts + 1);
    const int chunk = 64;
    int nchunks = (npts + 1 + chunk - 1) / chunk;
    parallel_for(nchunks, threads, [&](int c) {
      int a = c * chunk, b = std::min(npts + 1, a + chunk);
      CMat warm_up, warm_dn;
      for (int i = a; i < b; ++i) {
        double x = lo + i * h;
        CorrectionPoint up = correction_point(dp, cdouble(x, y), tol,
                                              warm_up.size() ? &warm_up : nullptr);
        warm_up = up.G;
        lvals_up[i] = up.l;
        CorrectionPoint dn = correction_point(dp, cdouble(x, -y), tol,
                                              warm_dn.size() ? &warm_dn : nullptr);
        warm_dn = dn.G;
        lvals_dn[i] = dn.l;
      }
    });
    cdouble acc = 0.0;
    for (int i = 0; i <= npts; ++i) {
      double wt = (i == 0 || i == npts) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += wt * phi(lo + i * h) * (lvals_up[i] - lvals_dn[i]);
    }
    Iy[s] = cdouble(0, 1) / (2.0 * M_PI) * acc * h / 3.0;
  }

  cdouble one_level = 2.0 * Iy[2] - Iy[1];
  cdouble extrap = Iy[0] / 3.0 - 2.0 * Iy[1] + (8.0 / 3.0) * Iy[2];
  if (diag) {
    diag->y_schedule = y_schedule;
    diag->integrals.assign(Iy.begin(), Iy.end());
    diag->raw = extrap;
    diag->extrapolation_error = std::abs(extrap - one_level) + std::abs(extrap.imag());
  }
  return extrap.real();
}

}  // namespace freespec
