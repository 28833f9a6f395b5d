#include "freespec/detail/fixed_point.hpp"

#include <deque>

namespace freespec::detail {

namespace {

struct History {
  std::deque<CVec> dG, dR;
  void push(const CVec& g, const CVec& r, size_t depth) {
    dG.push_back(g);
    dR.push_back(r);
    if (dG.size() > depth) {
      dG.pop_front();
      dR.pop_front();
    }
  }
};

}  // namespace

FixedPointResult solve_fixed_point(const std::function<CMat(const CMat&)>& rhs_of,
                                   const CMat& target, CMat G0, double tol, int max_iter,
                                   int plateau_window, bool accelerate) {
  const int k = static_cast<int>(G0.rows());
  const size_t depth = 3;
  const double beta_floor = 1.0 / 64.0;

  auto as_vec = [k](const CMat& m) { return CVec(Eigen::Map<const CVec>(m.data(), k * k)); };
  auto as_mat = [k](const CVec& v) { return CMat(Eigen::Map<const CMat>(v.data(), k, k)); };

  // One evaluation: picard image F(G) and the fixed-point defect
  // rhs(G) + G^{-1} - target = G^{-1} - (target - rhs(G)).
  auto evaluate = [&](const CMat& G, CMat& picard, double& defect) -> bool {
    CMat fmat = target - rhs_of(G);
    Eigen::PartialPivLU<CMat> lu_f(fmat);
    picard = lu_f.solve(CMat::Identity(k, k));
    CMat ginv = G.partialPivLu().solve(CMat::Identity(k, k));
    if (!picard.allFinite() || !ginv.allFinite()) return false;
    defect = (ginv - fmat).norm();
    return true;
  };

  CMat G = G0, picard;
  double defect = 0.0;
  if (!evaluate(G, picard, defect))
    return {G0, std::numeric_limits<double>::infinity(), 0, false};

  CMat best_G = G;
  double best = defect;
  double beta = 1.0;
  History hist;
  CVec prev_g, prev_r;
  bool have_prev = false;
  int since_improvement = 0;
  int it = 0;

  for (; it < max_iter && defect > tol; ++it) {
    CVec gv = as_vec(G);
    CVec rv = as_vec(picard) - gv;  // Picard residual
    if (have_prev) hist.push(gv - prev_g, rv - prev_r, depth);
    prev_g = gv;
    prev_r = rv;
    have_prev = true;

    CMat cand;
    bool accelerated = false;
    if (accelerate && !hist.dG.empty()) {
      // least squares min || rv - sum theta_j dR_j ||
      int m = static_cast<int>(hist.dR.size());
      CMat A(k * k, m);
      for (int j = 0; j < m; ++j) A.col(j) = hist.dR[j];
      CVec theta = A.colPivHouseholderQr().solve(rv);
      CVec gnew = gv + rv;
      for (int j = 0; j < m; ++j) gnew -= theta[j] * (hist.dG[j] + hist.dR[j]);
      cand = as_mat(gnew);
      accelerated = cand.allFinite();
    }
    if (!accelerated) cand = G + beta * as_mat(rv);

    CMat cand_picard;
    double cand_defect;
    bool ok = evaluate(cand, cand_picard, cand_defect);
    if (accelerated && (!ok || cand_defect > 2.0 * defect)) {
      // acceleration overshoots; take a damped Picard step instead
      cand = G + beta * as_mat(rv);
      ok = evaluate(cand, cand_picard, cand_defect);
      hist.dG.clear();
      hist.dR.clear();
      have_prev = false;
    }
    if (!ok) {
      beta = std::max(beta_floor, beta * 0.5);
      have_prev = false;
      continue;
    }
    beta = (cand_defect < defect) ? std::min(1.0, beta * 1.1892)
                                  : std::max(beta_floor, beta * 0.5);
    G = cand;
    picard = cand_picard;
    defect = cand_defect;
    if (defect < best * (1.0 - 1e-3) || defect <= tol)
      since_improvement = 0;
    else
      ++since_improvement;
    if (defect < best) {
      best = defect;
      best_G = G;
    }
    if (since_improvement > plateau_window) break;
  }
  return {best_G, best, it, best <= tol};
}

}  // namespace freespec::detail
