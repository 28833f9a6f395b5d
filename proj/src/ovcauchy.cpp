#include "freespec/ovcauchy.hpp"

#include "freespec/detail/fixed_point.hpp"

namespace freespec {

namespace {

double residual_opnorm(const LinearPencil& P, const CMat& G, const CMat& Lam) {
  CMat rhs = P.a[0];
  for (int i = 1; i <= P.r; ++i) rhs += P.a[i] * G * P.a[i];
  return opnorm(rhs + G.inverse() - Lam);
}

detail::FixedPointResult run_solver(const LinearPencil& P, const CMat& Lam, const CMat& G0,
                                    double tol, int max_iter, int plateau,
                                    bool accelerate = true) {
  auto rhs_of = [&P](const CMat& G) {
    CMat rhs = P.a[0];
    for (int i = 1; i <= P.r; ++i) rhs.noalias() += P.a[i] * G * P.a[i];
    return rhs;
  };
  return detail::solve_fixed_point(rhs_of, Lam, G0, tol, max_iter, plateau, accelerate);
}

}  // namespace

namespace {

bool corner_herglotz_ok(const CMat& G, int m) {
  return max_eig_hermitian(herm_im(G.topLeftCorner(m, m))) <= 1e-8;
}

// Branch-safe solve by continuation in the spectral parameter: walk
// lambda + iT down from far inside the upper half-plane, warm-starting each
// stage. Every stage keeps Im lambda positive definite, where the physical
// branch is the analytic one and its corner block is Herglotz, so a corner
// sign check is valid at every stage.
detail::FixedPointResult solve_by_continuation(const LinearPencil& P, const CMat& lambda_m,
                                               double tol, int max_iter) {
  double s_bound = opnorm(P.a[0]);
  for (int i = 1; i <= P.r; ++i) s_bound += 2.0 * opnorm(P.a[i]);
  std::vector<double> ladder;
  for (double T = std::max(8.0, 4.0 * s_bound); T > 1e-3; T /= 2.0) ladder.push_back(T);
  ladder.push_back(0.0);

  CMat G = -I / (1.0 + ladder.front()) * CMat::Identity(P.k, P.k);
  detail::FixedPointResult r{G, 1.0, 0, false};
  int total = 0;
  for (double T : ladder) {
    CMat Lam_T = P.Lambda(CMat(lambda_m + I * T * CMat::Identity(P.m, P.m)));
    r = run_solver(P, Lam_T, G, tol, max_iter, T > 0.0 ? 300 : 800);
    total += r.iterations;
    if (r.converged && !corner_herglotz_ok(r.G, P.m)) {
      // acceleration hopped off the analytic branch; redo this stage with
      // plain damped steps from the previous stage's point
      r = run_solver(P, Lam_T, G, tol, max_iter, 4000, false);
      total += r.iterations;
      if (r.converged && !corner_herglotz_ok(r.G, P.m)) r.converged = false;
    }
    if (r.converged) G = r.G;
  }
  r.iterations = total;
  return r;
}

}  // namespace

CauchyPoint solve_G(const LinearPencil& P, const CMat& lambda_m, SolveOptions opt) {
  if (lambda_m.rows() != P.m || lambda_m.cols() != P.m)
    throw config_error("solve_G: lambda must be " + std::to_string(P.m) + "x" +
                       std::to_string(P.m));
  if (!is_pos_def_hermitian(herm_im(lambda_m)))
    throw config_error("solve_G: Im lambda must be positive definite");
  if (opt.tol <= 0.0) throw config_error("solve_G: tol must be positive");

  const CMat Lam = P.Lambda(lambda_m);
  detail::FixedPointResult r{CMat(), 1.0, 0, false};

  if (opt.warm && opt.warm->rows() == P.k) {
    r = run_solver(P, Lam, *opt.warm, opt.tol, opt.max_iter, 500);
    if (r.converged && opt.check_herglotz && !corner_herglotz_ok(r.G, P.m))
      r.converged = false;  // warm start drifted off the branch
  }
  if (!r.converged) {
    int prev_it = r.iterations;
    r = solve_by_continuation(P, Lam, opt.tol, opt.max_iter);
    r.iterations += prev_it;
  }

  if (!r.converged) {
    // The embedding has Im = Im lambda (+) 0; when the iteration stalls on
    // that degenerate imaginary part, solve at Lambda + i eta and
    // extrapolate linearly in eta to 0.
    const double etas[3] = {1e-2, 5e-3, 2.5e-3};
    CMat Gs[3];
    CMat warm = r.G;
    int total_it = r.iterations;
    bool shifted_ok = true;
    for (int e = 0; e < 3; ++e) {
      CMat Lam_eta = Lam + I * etas[e] * CMat::Identity(P.k, P.k);
      auto re = run_solver(P, Lam_eta, warm, opt.tol, opt.max_iter, 2000);
      total_it += re.iterations;
      if (!re.converged) {
        shifted_ok = false;
        break;
      }
      Gs[e] = re.G;
      warm = re.G;
    }
    if (shifted_ok) {
      CMat Gext = 2.0 * Gs[2] - Gs[1];
      double res_ext = residual_opnorm(P, Gext, Lam);
      if (res_ext <= 10.0 * opt.tol) r = {Gext, res_ext, total_it, true};
    }
    if (!r.converged)
      throw numeric_error("solve_G: no convergence, best residual " +
                          std::to_string(r.residual_fro));
  }

  if (opt.check_herglotz) {
    // The corner block averages the resolvent of the self-adjoint q, so its
    // imaginary part is negative semidefinite on the upper half-plane. The
    // full matrix satisfies that only when the pencil itself is
    // self-adjoint (degree-one polynomials).
    double top = max_eig_hermitian(herm_im(r.G.topLeftCorner(P.m, P.m)));
    if (top > 1e-8)
      throw numeric_error("solve_G: corner Im G not negative semidefinite, max eig " +
                          std::to_string(top));
    bool selfadjoint_pencil = true;
    for (const CMat& ai : P.a)
      selfadjoint_pencil = selfadjoint_pencil && opnorm(ai - ai.adjoint()) < 1e-12;
    if (selfadjoint_pencil) {
      double top_full = max_eig_hermitian(herm_im(r.G));
      if (top_full > 1e-8)
        throw numeric_error("solve_G: Im G not negative semidefinite, max eig " +
                            std::to_string(top_full));
    }
  }
  return {lambda_m, r.G, residual_opnorm(P, r.G, Lam), r.iterations};
}

cdouble scalar_g(const LinearPencil& P, cdouble lambda, double tol, const CMat* warm,
                 CMat* G_out) {
  if (lambda.imag() == 0.0) throw config_error("scalar_g: Im lambda must be nonzero");
  if (lambda.imag() < 0.0) return std::conj(scalar_g(P, std::conj(lambda), tol, warm, nullptr));
  SolveOptions opt;
  opt.tol = tol;
  opt.warm = warm;
  CauchyPoint cp = solve_G(P, lambda * CMat::Identity(P.m, P.m), opt);
  if (G_out) *G_out = cp.G;
  cdouble acc = 0.0;
  for (int i = 0; i < P.m; ++i) acc += cp.G(i, i);
  return acc / static_cast<double>(P.m);
}

cdouble scalar_g(const MatrixNCPoly& p, cdouble lambda, double tol) {
  LinearPencil P = assemble_pencil(factorize(p));
  return scalar_g(P, lambda, tol);
}

std::vector<double> moments_from_g(const LinearPencil& P, int jmax, double radius, int npts,
                                   double tol) {
  // Offset trapezoid nodes keep the contour off the real axis; values in
  // the lower half-plane come from the reflection symmetry of g.
  std::vector<cdouble> gv(npts);
  CMat warm;
  bool have_warm = false;
  for (int t = 0; t < npts; ++t) {
    double theta = 2.0 * M_PI * (t + 0.5) / npts;
    cdouble lam = radius * std::exp(I * theta);
    if (lam.imag() > 0.0) {
      gv[t] = scalar_g(P, lam, tol, have_warm ? &warm : nullptr, &warm);
      have_warm = true;
    }
  }
  for (int t = 0; t < npts; ++t) {
    double theta = 2.0 * M_PI * (t + 0.5) / npts;
    if (std::sin(theta) < 0.0) gv[t] = std::conj(gv[npts - 1 - t]);
  }
  std::vector<double> moments(jmax + 1);
  for (int j = 0; j <= jmax; ++j) {
    cdouble acc = 0.0;
    for (int t = 0; t < npts; ++t) {
      double theta = 2.0 * M_PI * (t + 0.5) / npts;
      cdouble lam = radius * std::exp(I * theta);
      acc += std::pow(lam, j + 1) * gv[t];
    }
    moments[j] = (acc / static_cast<double>(npts)).real();
  }
  return moments;
}

double spectral_bound(const MatrixNCPoly& p) {
  double bound = 0.0;
  for (const auto& [w, c] : p.terms())
    bound += opnorm(c) * std::pow(2.0, static_cast<double>(w.size()));
  return bound;
}

}  // namespace freespec
